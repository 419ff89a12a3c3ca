// Shared generator for randomized multi-asset transactions with a plaintext
// per-asset oracle, used by the ledger unit tests and the acceptance suite.
#pragma once

#include "fedsim/hash.hpp"
#include "fedsim/validation.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace fedsim::fuzz {

struct FuzzCase {
    Transaction tx;
    ChainState state;   // parent state holding the inputs
    bool oracle_ok;     // plaintext per-asset conservation verdict
};

/// Builds a random transaction over 1-3 assets with at most 8 inputs and 8
/// outputs, values < 2^13, optionally with confidential amounts. Roughly
/// half the cases are mutated to violate conservation by one unit in one
/// asset; `oracle_ok` records the plaintext verdict.
inline FuzzCase make_fuzz_case(DetRng& rng, bool confidential) {
    FuzzCase fc;
    Keypair owner = Keypair::generate(rng);

    size_t n_assets = 1 + rng.uniform(3);
    std::vector<AssetId> assets;
    for (size_t a = 0; a < n_assets; ++a) {
        Bytes tag{uint8_t('A' + a)};
        uint8_t salt[8];
        for (auto& s : salt) s = uint8_t(rng.next_u64());
        tag.insert(tag.end(), salt, salt + 8);
        assets.push_back(hash32("fuzz/asset", tag));
    }

    struct Opening {
        uint64_t value;
        Scalar blinder;
        bool conf;
    };
    std::map<AssetId, uint64_t> in_total;
    std::vector<std::pair<size_t, Opening>> input_openings;  // asset idx, opening

    size_t n_inputs = n_assets + rng.uniform(8 - n_assets + 1);
    if (n_inputs > 8) n_inputs = 8;
    fc.state.height = 1;
    for (size_t i = 0; i < n_inputs; ++i) {
        size_t a = i < n_assets ? i : rng.uniform(n_assets);
        // 8 inputs of one asset must still fit the 16-bit range proofs
        Opening op{1 + rng.uniform((uint64_t(1) << 13) - 1), Scalar::zero(), false};
        op.conf = confidential && rng.uniform(3) == 0 && i < 3;
        Digest32 fake_parent;
        rng.fill(fake_parent);
        OutPoint prev{fake_parent, uint32_t(i)};
        TxOutput parent_out;
        parent_out.asset = assets[a];
        parent_out.condition = CondSingleKey{owner.pub};
        if (op.conf) {
            op.blinder = Scalar::random(rng);
            parent_out.amount = ConfidentialAmount{
                commit(op.value, op.blinder, assets[a]),
                range_prove(op.value, op.blinder, assets[a], 16)};
        } else {
            parent_out.amount = op.value;
        }
        fc.state.utxos[prev] = parent_out;
        fc.state.utxo_height[prev] = 1;
        fc.tx.inputs.push_back({prev, SpendClause::primary, {}});
        in_total[assets[a]] += op.value;
        input_openings.emplace_back(a, op);
    }

    // per-asset fee, then outputs carrying the remainder
    Scalar in_blinders = Scalar::zero();
    bool any_conf_input = false;
    for (const auto& [a, op] : input_openings) {
        in_blinders = in_blinders + op.blinder;
        any_conf_input = any_conf_input || op.conf;
    }
    std::map<AssetId, uint64_t> out_total;
    struct PlannedOut {
        AssetId asset;
        uint64_t value;
        bool conf;
    };
    std::vector<PlannedOut> plan;
    for (size_t a = 0; a < n_assets; ++a) {
        uint64_t total = in_total[assets[a]];
        uint64_t fee = total > 2 ? rng.uniform(3) : 0;
        if (fee > 0) fc.tx.fee[assets[a]] = fee;
        uint64_t rest = total - fee;
        size_t pieces = 1 + rng.uniform(2);
        for (size_t p = 0; p + 1 < pieces && rest > 1 && plan.size() + n_assets < 8;
             ++p) {
            uint64_t v = 1 + rng.uniform(rest - 1);
            plan.push_back({assets[a], v, confidential && rng.uniform(2) == 0});
            rest -= v;
        }
        plan.push_back({assets[a], rest, confidential && rng.uniform(2) == 0});
    }
    if (any_conf_input && std::none_of(plan.begin(), plan.end(),
                                       [](const PlannedOut& p) { return p.conf; }))
        plan.back().conf = true;

    // half the cases: break conservation by one unit in one asset
    fc.oracle_ok = rng.uniform(2) == 0;
    size_t broken = fc.oracle_ok ? plan.size() : rng.uniform(plan.size());

    size_t conf_outputs = 0;
    for (const auto& p : plan) conf_outputs += p.conf ? 1 : 0;
    size_t conf_seen = 0;
    Scalar out_blinders = Scalar::zero();
    for (size_t i = 0; i < plan.size(); ++i) {
        PlannedOut p = plan[i];
        if (i == broken) p.value += 1;
        TxOutput out;
        out.asset = p.asset;
        out.condition = CondSingleKey{owner.pub};
        if (p.conf) {
            ++conf_seen;
            Scalar b = conf_seen == conf_outputs ? in_blinders - out_blinders
                                                 : Scalar::random(rng);
            out_blinders = out_blinders + b;
            out.amount = ConfidentialAmount{commit(p.value, b, p.asset),
                                            range_prove(p.value, b, p.asset, 16)};
        } else {
            out.amount = p.value;
        }
        fc.tx.outputs.push_back(std::move(out));
        out_total[p.asset] += p.value;
    }

    for (size_t i = 0; i < fc.tx.inputs.size(); ++i)
        sign_input(fc.tx, i, 0, owner.secret);

    // plaintext oracle: per-asset input sums equal output sums plus fees
    std::map<AssetId, uint64_t> debit = out_total;
    for (const auto& [asset, fee] : fc.tx.fee) debit[asset] += fee;
    bool oracle = in_total == debit;
    fc.oracle_ok = oracle;
    return fc;
}

}  // namespace fedsim::fuzz
