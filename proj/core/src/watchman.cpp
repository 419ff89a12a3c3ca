#include "fedsim/watchman.hpp"

#include <algorithm>
#include <stdexcept>

namespace fedsim {

SpendCondition peg_lock_condition(const PegParams& params) {
    return CondPegLock{CondMultiKey{params.watchman_threshold, params.watchman_keys},
                       params.backup_timelock,
                       CondMultiKey{params.backup_quorum, params.backup_keys}};
}

bool is_peg_lock(const SpendCondition& cond, const PegParams& params) {
    return cond == peg_lock_condition(params);
}

Transaction pegin_create(Wallet& user, const AssetId& main_asset, uint64_t amount,
                         const GroupElement& sidechain_dest, const PegParams& params,
                         BuildContext& ctx) {
    if (amount == 0) throw std::invalid_argument("zero peg-in");
    auto picked = user.select(main_asset, amount);
    uint64_t change = 0;
    for (const auto& o : picked) change += o.amount;
    change -= amount;

    Transaction tx;
    add_inputs(tx, picked);
    tx.lock_destination = sidechain_dest;
    // the lock must stay explicit so the sidechain can check the claim
    std::vector<PlannedOutput> plan;
    plan.push_back({main_asset, amount, peg_lock_condition(params)});
    if (change > 0) plan.push_back({main_asset, change, CondSingleKey{user.key.pub}});
    finalize_outputs(tx, std::move(plan), /*confidential=*/false, Scalar::zero(), ctx);
    for (size_t i = 0; i < tx.inputs.size(); ++i) sign_input(tx, i, 0, user.key.secret);
    return tx;
}

std::vector<Transaction> pegin_process(std::span<const Block> main_blocks,
                                       const ChainState& main, const ChainState& side,
                                       const PegParams& params) {
    std::vector<Transaction> mints;
    for (const auto& block : main_blocks) {
        for (const auto& tx : block.txs) {
            if (!tx.lock_destination) continue;
            Digest32 id = tx.txid();
            for (uint32_t i = 0; i < tx.outputs.size(); ++i) {
                const TxOutput& out = tx.outputs[i];
                if (!is_peg_lock(out.condition, params) || !out.is_explicit()) continue;
                OutPoint op{id, i};
                if (!main.utxos.count(op)) continue;               // already spent
                if (side.claimed_pegins.count(op)) continue;       // already minted
                if (main.depth_of(op) < params.pegin_depth) continue;

                Transaction mint;
                mint.pegin = PeginMetadata{op, out.explicit_amount(), *tx.lock_destination};
                mint.outputs.push_back({pegged_asset_id(), out.explicit_amount(),
                                        CondSingleKey{*tx.lock_destination}});
                mints.push_back(std::move(mint));
            }
        }
    }
    return mints;
}

Transaction pegout_request(Wallet& user, uint64_t amount, const GroupElement& dest,
                           const AuthorizationProof& proof, BuildContext& ctx) {
    if (amount == 0) throw std::invalid_argument("zero peg-out");
    auto picked = user.select(pegged_asset_id(), amount);
    uint64_t change = 0;
    for (const auto& o : picked) change += o.amount;
    change -= amount;

    Transaction tx;
    add_inputs(tx, picked);
    tx.pegout = PegoutMetadata{dest, proof, amount};
    std::vector<PlannedOutput> plan;
    bool conf = any_confidential(picked);
    if (change > 0 || conf)
        plan.push_back({pegged_asset_id(), change, CondSingleKey{user.key.pub}});
    finalize_outputs(tx, std::move(plan), conf, blinder_sum(picked), ctx);
    for (size_t i = 0; i < tx.inputs.size(); ++i) sign_input(tx, i, 0, user.key.secret);
    return tx;
}

std::vector<PegoutRequest> find_settled_pegouts(std::span<const Block> side_blocks,
                                                const ChainState& side, uint32_t depth) {
    std::vector<PegoutRequest> out;
    for (const auto& block : side_blocks) {
        uint64_t h = block.header.height;
        if (h + depth > side.height + 1) continue;  // not deep enough yet
        for (const auto& tx : block.txs)
            if (tx.pegout)
                out.push_back({tx.txid(), tx.pegout->destination, tx.pegout->amount, h});
    }
    return out;
}

namespace {

/// Currently locked explicit outputs, in outpoint order.
std::vector<std::pair<OutPoint, TxOutput>> locked_outputs(const ChainState& main,
                                                          const PegParams& params) {
    std::vector<std::pair<OutPoint, TxOutput>> locks;
    for (const auto& [op, out] : main.utxos)
        if (is_peg_lock(out.condition, params) && out.is_explicit())
            locks.emplace_back(op, out);
    return locks;  // map iteration is already outpoint-ordered
}

/// Lock outpoints whose peg-in mint is still outstanding. Every watchman
/// derives the same set from shared chain views, so the canonical
/// withdrawal stays byte-identical across the federation.
std::set<OutPoint> pending_pegin_locks(std::span<const Block> main_blocks,
                                       const ChainState& side,
                                       const PegParams& params) {
    std::set<OutPoint> pending;
    for (const auto& block : main_blocks) {
        for (const auto& tx : block.txs) {
            if (!tx.lock_destination) continue;
            Digest32 id = tx.txid();
            for (uint32_t i = 0; i < tx.outputs.size(); ++i) {
                OutPoint op{id, i};
                if (is_peg_lock(tx.outputs[i].condition, params) &&
                    !side.claimed_pegins.count(op))
                    pending.insert(op);
            }
        }
    }
    return pending;
}

}  // namespace

std::optional<Transaction> build_withdrawal(const PegoutRequest& request,
                                            std::span<const Block> main_blocks,
                                            const ChainState& main,
                                            const ChainState& side,
                                            const PegParams& params) {
    auto locks = locked_outputs(main, params);
    std::set<OutPoint> pending = pending_pegin_locks(main_blocks, side, params);
    Transaction tx;
    uint64_t gathered = 0;
    std::optional<AssetId> asset;
    for (const auto& [op, out] : locks) {
        if (gathered >= request.amount) break;
        if (pending.count(op)) continue;  // depositor's claim comes first
        if (asset && out.asset != *asset) continue;
        asset = out.asset;
        tx.inputs.push_back({op, SpendClause::primary, {}});
        gathered += out.explicit_amount();
    }
    if (gathered < request.amount) return std::nullopt;
    tx.outputs.push_back({*asset, request.amount, CondSingleKey{request.destination}});
    if (gathered > request.amount)
        tx.outputs.push_back(
            {*asset, gathered - request.amount, peg_lock_condition(params)});
    return tx;
}

bool WatchmanState::online(uint64_t now) const {
    if (online_windows.empty()) return true;
    return std::any_of(online_windows.begin(), online_windows.end(),
                       [&](const auto& w) { return w.first <= now && now < w.second; });
}

std::optional<SchnorrSignature> watchman_sign_withdrawal(
    WatchmanState& watchman, const Transaction& withdrawal,
    const PegoutRequest& request, std::span<const Block> side_blocks,
    const ChainState& side, std::span<const Block> main_blocks,
    const ChainState& main, const PegParams& params, uint64_t now) {
    if (!watchman.online(now)) return std::nullopt;
    if (watchman.signed_requests.count(request.side_txid)) return std::nullopt;

    // the burn must sit in our accepted sidechain history, deep enough
    const Transaction* burn = nullptr;
    for (const auto& block : side_blocks) {
        if (block.header.height + params.pegout_depth > side.height + 1) continue;
        for (const auto& tx : block.txs)
            if (tx.pegout && tx.txid() == request.side_txid) burn = &tx;
    }
    if (!burn) return std::nullopt;
    if (!(burn->pegout->destination == request.destination) ||
        burn->pegout->amount != request.amount)
        return std::nullopt;
    if (!(burn->pegout->proof.whitelist_key == request.destination)) return std::nullopt;
    if (!authorize_verify(burn->pegout->proof, params.auth_online, params.auth_offline))
        return std::nullopt;

    // refuse anything but the canonical withdrawal: exactly one authorized
    // output plus federation change
    auto canonical = build_withdrawal(request, main_blocks, main, side, params);
    if (!canonical || !(withdrawal == *canonical)) return std::nullopt;

    watchman.signed_requests.insert(request.side_txid);
    return schnorr_sign(watchman.key.secret, withdrawal.signing_message());
}

Transaction assemble_withdrawal(Transaction unsigned_tx,
                                std::span<const std::pair<uint8_t, SchnorrSignature>> shares) {
    for (auto& in : unsigned_tx.inputs)
        in.signatures.assign(shares.begin(), shares.end());
    return unsigned_tx;
}

std::optional<Transaction> backup_withdrawal(const ChainState& main,
                                             const PegParams& params,
                                             std::span<const Keypair> backup_keys,
                                             std::span<const uint32_t> signer_indices,
                                             uint64_t now) {
    if (now < params.backup_timelock) return std::nullopt;
    auto locks = locked_outputs(main, params);
    if (locks.empty()) return std::nullopt;

    Transaction tx;
    uint64_t total = 0;
    AssetId asset = locks.front().second.asset;
    for (const auto& [op, out] : locks) {
        if (out.asset != asset) continue;
        tx.inputs.push_back({op, SpendClause::backup, {}});
        total += out.explicit_amount();
    }
    tx.outputs.push_back(
        {asset, total, CondMultiKey{params.backup_quorum, params.backup_keys}});

    Bytes msg = tx.signing_message();
    for (uint32_t idx : signer_indices) {
        if (idx >= backup_keys.size()) throw std::invalid_argument("bad backup signer");
        SchnorrSignature sig = schnorr_sign(backup_keys[idx].secret, msg);
        for (auto& in : tx.inputs) in.signatures.emplace_back(uint8_t(idx), sig);
    }
    return tx;
}

Transaction confiscation_attempt(const ChainState& main, const PegParams& params,
                                 std::span<const Keypair> colluder_keys,
                                 std::span<const uint32_t> colluder_indices,
                                 const GroupElement& thief_dest) {
    auto locks = locked_outputs(main, params);
    Transaction tx;
    uint64_t total = 0;
    AssetId asset = locks.empty() ? AssetId{} : locks.front().second.asset;
    for (const auto& [op, out] : locks) {
        if (out.asset != asset) continue;
        tx.inputs.push_back({op, SpendClause::primary, {}});
        total += out.explicit_amount();
    }
    tx.outputs.push_back({asset, total, CondSingleKey{thief_dest}});

    Bytes msg = tx.signing_message();
    for (size_t i = 0; i < colluder_indices.size(); ++i) {
        SchnorrSignature sig = schnorr_sign(colluder_keys[i].secret, msg);
        for (auto& in : tx.inputs)
            in.signatures.emplace_back(uint8_t(colluder_indices[i]), sig);
    }
    return tx;
}

}  // namespace fedsim
