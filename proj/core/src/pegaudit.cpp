#include "fedsim/pegaudit.hpp"

namespace fedsim {

PegAuditReport peg_audit(std::span<const Block> main_blocks,
                         std::span<const Block> side_blocks,
                         const PegParams& params) {
    // sidechain replay: mint and burn totals, claimed locks
    uint64_t minted = 0, burned = 0;
    std::set<OutPoint> claimed;
    for (const auto& block : side_blocks) {
        for (const auto& tx : block.txs) {
            if (tx.pegin) {
                minted += tx.pegin->amount;
                claimed.insert(tx.pegin->lock_outpoint);
            }
            if (tx.pegout) burned += tx.pegout->amount;
        }
    }

    // main-chain replay: the live lock set, which locks came from users (as
    // opposed to federation change), and how much value left peg control
    std::map<OutPoint, uint64_t> lock_set;
    std::set<OutPoint> user_locks;
    uint64_t redeemed = 0;
    for (const auto& block : main_blocks) {
        for (const auto& tx : block.txs) {
            uint64_t spent_locked = 0;
            for (const auto& in : tx.inputs) {
                auto it = lock_set.find(in.prev);
                if (it == lock_set.end()) continue;
                spent_locked += it->second;
                lock_set.erase(it);
                user_locks.erase(in.prev);
            }
            Digest32 id = tx.txid();
            uint64_t relocked = 0;
            for (uint32_t i = 0; i < tx.outputs.size(); ++i) {
                const TxOutput& out = tx.outputs[i];
                if (!is_peg_lock(out.condition, params) || !out.is_explicit()) continue;
                OutPoint op{id, i};
                lock_set.emplace(op, out.explicit_amount());
                relocked += out.explicit_amount();
                // a lock created without consuming locked value is a user
                // peg-in; change from withdrawals is pool collateral
                if (spent_locked == 0) user_locks.insert(op);
            }
            redeemed += spent_locked > relocked ? spent_locked - relocked : 0;
        }
    }

    PegAuditReport report;
    for (const auto& [op, amount] : lock_set) report.locked += amount;
    report.circulating = minted - burned;
    for (const OutPoint& op : user_locks)
        if (!claimed.count(op)) report.in_flight_in += lock_set.at(op);
    report.in_flight_out = burned > redeemed ? burned - redeemed : 0;
    report.delta = int64_t(report.locked) - int64_t(report.circulating) -
                   int64_t(report.in_flight_in) - int64_t(report.in_flight_out);
    return report;
}

}  // namespace fedsim
