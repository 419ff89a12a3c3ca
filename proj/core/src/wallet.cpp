#include "fedsim/wallet.hpp"

#include <algorithm>
#include <stdexcept>

namespace fedsim {

uint64_t Wallet::balance(const AssetId& asset) const {
    uint64_t total = 0;
    for (const auto& o : utxos_)
        if (o.asset == asset) total += o.amount;
    return total;
}

void Wallet::scan_block(const Block& block, const SecretsRegistry& secrets) {
    for (const auto& tx : block.txs) {
        for (const auto& in : tx.inputs)
            std::erase_if(utxos_, [&](const OwnedOutput& o) { return o.outpoint == in.prev; });
        Digest32 id = tx.txid();
        for (uint32_t i = 0; i < tx.outputs.size(); ++i) {
            const TxOutput& out = tx.outputs[i];
            const auto* single = std::get_if<CondSingleKey>(&out.condition);
            if (!single || !(single->key == key.pub)) continue;
            OutPoint op{id, i};
            if (std::any_of(utxos_.begin(), utxos_.end(),
                            [&](const OwnedOutput& o) { return o.outpoint == op; }))
                continue;
            if (out.is_explicit()) {
                utxos_.push_back({op, out.asset, out.explicit_amount(), Scalar::zero(), false});
            } else if (auto it = secrets.find(op); it != secrets.end()) {
                utxos_.push_back({op, out.asset, it->second.amount, it->second.blinder, true});
            }
        }
    }
}

std::vector<OwnedOutput> Wallet::select(const AssetId& asset, uint64_t amount) {
    std::vector<OwnedOutput> picked;
    uint64_t total = 0;
    for (auto it = utxos_.begin(); it != utxos_.end() && total < amount;) {
        if (it->asset == asset) {
            total += it->amount;
            picked.push_back(*it);
            it = utxos_.erase(it);
        } else {
            ++it;
        }
    }
    if (total < amount) {
        // give the coins back before failing
        for (auto& o : picked) utxos_.push_back(std::move(o));
        throw std::runtime_error("insufficient funds");
    }
    return picked;
}

void finalize_outputs(Transaction& tx, std::vector<PlannedOutput> plan,
                      bool confidential, const Scalar& input_blinder_sum,
                      BuildContext& ctx) {
    if (!confidential) {
        for (auto& p : plan)
            tx.outputs.push_back({p.asset, p.amount, std::move(p.condition)});
        return;
    }
    // last blindable output absorbs the balancing blinder
    size_t last_blindable = plan.size();
    for (size_t i = 0; i < plan.size(); ++i)
        if (!std::holds_alternative<CondUnspendable>(plan[i].condition)) last_blindable = i;
    Scalar used = Scalar::zero();
    std::vector<std::pair<uint32_t, SecretRecord>> openings;
    for (size_t i = 0; i < plan.size(); ++i) {
        auto& p = plan[i];
        if (std::holds_alternative<CondUnspendable>(p.condition)) {
            tx.outputs.push_back({p.asset, p.amount, std::move(p.condition)});
            continue;
        }
        Scalar blinder = i == last_blindable ? input_blinder_sum - used
                                             : Scalar::random(*ctx.rng);
        used = used + blinder;
        ConfidentialAmount conf{commit(p.amount, blinder, p.asset),
                                range_prove(p.amount, blinder, p.asset, ctx.range_bits)};
        tx.outputs.push_back({p.asset, std::move(conf), std::move(p.condition)});
        openings.emplace_back(uint32_t(tx.outputs.size() - 1),
                              SecretRecord{p.amount, blinder});
    }
    // register openings only once the output list (and hence txid) is final
    if (ctx.secrets) {
        Digest32 id = tx.txid();
        for (auto& [index, record] : openings) (*ctx.secrets)[{id, index}] = record;
    }
}

Scalar blinder_sum(std::span<const OwnedOutput> inputs) {
    Scalar s = Scalar::zero();
    for (const auto& o : inputs) s = s + o.blinder;
    return s;
}

bool any_confidential(std::span<const OwnedOutput> inputs) {
    return std::any_of(inputs.begin(), inputs.end(),
                       [](const OwnedOutput& o) { return o.confidential; });
}

void add_inputs(Transaction& tx, std::span<const OwnedOutput> inputs) {
    for (const auto& o : inputs) tx.inputs.push_back({o.outpoint, SpendClause::primary, {}});
}

Transaction build_transfer(Wallet& from, const AssetId& asset, uint64_t amount,
                           const GroupElement& dest, bool confidential,
                           BuildContext& ctx) {
    if (amount == 0) throw std::invalid_argument("zero transfer");
    auto picked = from.select(asset, amount);
    uint64_t change = 0;
    for (const auto& o : picked) change += o.amount;
    change -= amount;

    bool conf = confidential || any_confidential(picked);
    Transaction tx;
    add_inputs(tx, picked);
    std::vector<PlannedOutput> plan;
    plan.push_back({asset, amount, CondSingleKey{dest}});
    if (change > 0) plan.push_back({asset, change, CondSingleKey{from.key.pub}});
    finalize_outputs(tx, std::move(plan), conf, blinder_sum(picked), ctx);
    for (size_t i = 0; i < tx.inputs.size(); ++i) sign_input(tx, i, 0, from.key.secret);
    return tx;
}

Transaction build_issuance(const Keypair& issuer, Bytes policy_note,
                           std::span<const std::pair<GroupElement, uint64_t>> recipients) {
    (void)issuer;
    uint64_t total = 0;
    for (const auto& [key, amount] : recipients) total += amount;
    if (total == 0) throw std::invalid_argument("zero issuance");

    Transaction tx;
    tx.issuances.push_back({total, std::move(policy_note)});
    AssetId asset{};  // resolved after the issuance slot is in place
    asset = tx.issued_asset_id(0);
    for (const auto& [key, amount] : recipients)
        if (amount > 0) tx.outputs.push_back({asset, amount, CondSingleKey{key}});
    return tx;
}

Transaction build_destroy(Wallet& holder, const AssetId& asset, uint64_t amount,
                          BuildContext& ctx) {
    if (amount == 0) throw std::invalid_argument("zero destruction");
    auto picked = holder.select(asset, amount);
    uint64_t change = 0;
    for (const auto& o : picked) change += o.amount;
    change -= amount;

    Transaction tx;
    add_inputs(tx, picked);
    std::vector<PlannedOutput> plan;
    plan.push_back({asset, amount, CondUnspendable{}});
    // confidential inputs need a blindable output to balance the blinders,
    // even when the whole balance burns
    if (change > 0 || any_confidential(picked))
        plan.push_back({asset, change, CondSingleKey{holder.key.pub}});
    finalize_outputs(tx, std::move(plan), any_confidential(picked), blinder_sum(picked), ctx);
    for (size_t i = 0; i < tx.inputs.size(); ++i) sign_input(tx, i, 0, holder.key.secret);
    return tx;
}

Transaction build_swap(Wallet& party_a, const AssetId& asset_a, uint64_t amount_a,
                       Wallet& party_b, const AssetId& asset_b, uint64_t amount_b,
                       bool confidential, BuildContext& ctx) {
    if (amount_a == 0 || amount_b == 0) throw std::invalid_argument("zero swap leg");
    auto picked_a = party_a.select(asset_a, amount_a);
    auto picked_b = party_b.select(asset_b, amount_b);
    uint64_t change_a = 0, change_b = 0;
    for (const auto& o : picked_a) change_a += o.amount;
    for (const auto& o : picked_b) change_b += o.amount;
    change_a -= amount_a;
    change_b -= amount_b;

    bool conf = confidential || any_confidential(picked_a) || any_confidential(picked_b);
    Transaction tx;
    add_inputs(tx, picked_a);
    add_inputs(tx, picked_b);
    std::vector<PlannedOutput> plan;
    plan.push_back({asset_a, amount_a, CondSingleKey{party_b.key.pub}});
    plan.push_back({asset_b, amount_b, CondSingleKey{party_a.key.pub}});
    if (change_a > 0) plan.push_back({asset_a, change_a, CondSingleKey{party_a.key.pub}});
    if (change_b > 0) plan.push_back({asset_b, change_b, CondSingleKey{party_b.key.pub}});
    finalize_outputs(tx, std::move(plan), conf,
                     blinder_sum(picked_a) + blinder_sum(picked_b), ctx);
    for (size_t i = 0; i < picked_a.size(); ++i) sign_input(tx, i, 0, party_a.key.secret);
    for (size_t i = 0; i < picked_b.size(); ++i)
        sign_input(tx, picked_a.size() + i, 0, party_b.key.secret);
    return tx;
}

}  // namespace fedsim
