#include "fedsim/validation.hpp"

#include "fedsim/hash.hpp"

#include <algorithm>

namespace fedsim {

const char* reject_name(Reject r) {
    switch (r) {
        case Reject::none: return "ok";
        case Reject::structure: return "structure";
        case Reject::double_spend: return "double-spend";
        case Reject::balance: return "balance";
        case Reject::proof: return "proof";
        case Reject::signature: return "signature";
        case Reject::script: return "script";
        case Reject::issuance: return "issuance";
        case Reject::peg: return "peg";
        case Reject::stamp: return "stamp";
        case Reject::chain_link: return "chain-link";
    }
    return "unknown";
}

namespace {

bool multikey_satisfied(const CondMultiKey& cond,
                        const std::vector<std::pair<uint8_t, SchnorrSignature>>& sigs,
                        std::span<const uint8_t> msg) {
    if (cond.threshold == 0 || cond.threshold > cond.keys.size()) return false;
    std::vector<bool> seen(cond.keys.size(), false);
    uint32_t valid = 0;
    for (const auto& [idx, sig] : sigs) {
        if (idx >= cond.keys.size() || seen[idx]) continue;
        if (!schnorr_verify(cond.keys[idx], msg, sig)) continue;
        seen[idx] = true;
        ++valid;
    }
    return valid >= cond.threshold;
}

ValidationResult check_condition(const SpendCondition& cond, const TxInput& input,
                                 std::span<const uint8_t> msg, uint64_t now) {
    if (const auto* single = std::get_if<CondSingleKey>(&cond)) {
        for (const auto& [idx, sig] : input.signatures)
            if (idx == 0 && schnorr_verify(single->key, msg, sig))
                return ValidationResult::accept();
        return ValidationResult::reject(Reject::signature, "missing key signature");
    }
    if (const auto* multi = std::get_if<CondMultiKey>(&cond)) {
        if (!multikey_satisfied(*multi, input.signatures, msg))
            return ValidationResult::reject(Reject::signature, "multisig threshold not met");
        return ValidationResult::accept();
    }
    if (const auto* locked = std::get_if<CondTimelock>(&cond)) {
        if (now < locked->not_before)
            return ValidationResult::reject(Reject::script, "timelock not yet satisfied");
        if (!multikey_satisfied(locked->keys, input.signatures, msg))
            return ValidationResult::reject(Reject::signature, "multisig threshold not met");
        return ValidationResult::accept();
    }
    if (std::holds_alternative<CondUnspendable>(cond))
        return ValidationResult::reject(Reject::script, "unspendable output used as input");
    const auto& peg = std::get<CondPegLock>(cond);
    if (input.clause == SpendClause::primary) {
        if (!multikey_satisfied(peg.federation, input.signatures, msg))
            return ValidationResult::reject(Reject::signature,
                                            "federation threshold not met");
        return ValidationResult::accept();
    }
    if (now < peg.backup_timelock)
        return ValidationResult::reject(Reject::script, "backup clause timelocked");
    if (!multikey_satisfied(peg.backup, input.signatures, msg))
        return ValidationResult::reject(Reject::signature, "backup quorum not met");
    return ValidationResult::accept();
}

bool amount_in_range(uint64_t v) { return v < (uint64_t(1) << kMaxValueBits); }

// per-asset integer accounting for fully explicit transactions
ValidationResult explicit_balance(const Transaction& tx,
                                  std::span<const TxOutput> resolved_inputs) {
    std::map<AssetId, uint64_t> credit, debit;
    for (const auto& out : resolved_inputs) credit[out.asset] += out.explicit_amount();
    for (uint32_t i = 0; i < tx.issuances.size(); ++i)
        credit[tx.issued_asset_id(i)] += tx.issuances[i].amount;
    if (tx.pegin) credit[pegged_asset_id()] += tx.pegin->amount;
    for (const auto& out : tx.outputs) debit[out.asset] += out.explicit_amount();
    for (const auto& [asset, amount] : tx.fee) debit[asset] += amount;
    if (tx.pegout) debit[pegged_asset_id()] += tx.pegout->amount;
    if (credit != debit)
        return ValidationResult::reject(Reject::balance, "per-asset sums differ");
    return ValidationResult::accept();
}

// commitment accounting for transactions with any confidential amount
ValidationResult confidential_balance(const Transaction& tx,
                                      std::span<const TxOutput> resolved_inputs) {
    std::vector<Commitment> ins, outs;
    auto as_commitment = [](const TxOutput& out) {
        if (out.is_explicit()) return commit(out.explicit_amount(), Scalar::zero(), out.asset);
        return std::get<ConfidentialAmount>(out.amount).commitment;
    };
    for (const auto& out : resolved_inputs) ins.push_back(as_commitment(out));
    for (uint32_t i = 0; i < tx.issuances.size(); ++i)
        ins.push_back(commit(tx.issuances[i].amount, Scalar::zero(), tx.issued_asset_id(i)));
    if (tx.pegin) ins.push_back(commit(tx.pegin->amount, Scalar::zero(), pegged_asset_id()));
    for (const auto& out : tx.outputs) outs.push_back(as_commitment(out));
    if (tx.pegout)
        outs.push_back(commit(tx.pegout->amount, Scalar::zero(), pegged_asset_id()));
    if (!balance_check(ins, outs, tx.fee))
        return ValidationResult::reject(Reject::balance, "commitments do not balance");
    return ValidationResult::accept();
}

}  // namespace

ValidationResult tx_validate(const Transaction& tx, const ChainState& state,
                             const ChainRules& rules, uint64_t now) {
    try {
        if (tx.inputs.empty() && tx.issuances.empty() && !tx.pegin)
            return ValidationResult::reject(Reject::structure, "no value source");
        if (tx.inputs.size() > 4096 || tx.outputs.size() > 4096)
            return ValidationResult::reject(Reject::structure, "oversized transaction");

        // intra-transaction double spends
        std::vector<OutPoint> points;
        for (const auto& in : tx.inputs) points.push_back(in.prev);
        std::sort(points.begin(), points.end());
        if (std::adjacent_find(points.begin(), points.end()) != points.end())
            return ValidationResult::reject(Reject::double_spend,
                                            "outpoint spent twice in one transaction");

        // resolve inputs against the utxo set
        std::vector<TxOutput> resolved;
        resolved.reserve(tx.inputs.size());
        for (const auto& in : tx.inputs) {
            auto it = state.utxos.find(in.prev);
            if (it == state.utxos.end())
                return ValidationResult::reject(Reject::double_spend,
                                                "input outpoint unknown or spent");
            resolved.push_back(it->second);
        }

        // memo over the signature and proof checks; outputs are immutable, so
        // for a fixed (txid, now) these can never change
        Digest32 cache_key{};
        bool cached_ok = false;
        if (rules.cache) {
            ByteWriter kw;
            kw.digest(tx.txid());
            kw.u64(now);
            cache_key = hash32("fedsim/tx-cache", kw.bytes());
            if (auto hit = rules.cache->lookup(cache_key)) {
                if (!*hit)
                    return ValidationResult::reject(Reject::signature,
                                                    "cached signature/proof failure");
                cached_ok = true;
            }
        }

        if (!cached_ok) {
            Bytes msg = tx.signing_message();
            for (size_t i = 0; i < tx.inputs.size(); ++i) {
                ValidationResult r =
                    check_condition(resolved[i].condition, tx.inputs[i], msg, now);
                if (!r.ok()) {
                    if (rules.cache) rules.cache->store(cache_key, false);
                    return r;
                }
            }
        }

        for (const auto& iss : tx.issuances)
            if (iss.amount == 0 || !amount_in_range(iss.amount))
                return ValidationResult::reject(Reject::issuance, "bad issuance amount");

        if (tx.pegin) {
            if (!rules.sidechain || !rules.parent_view)
                return ValidationResult::reject(Reject::peg, "peg-in not accepted here");
            if (state.claimed_pegins.count(tx.pegin->lock_outpoint))
                return ValidationResult::reject(Reject::peg, "lock already claimed");
            auto it = rules.parent_view->utxos.find(tx.pegin->lock_outpoint);
            if (it == rules.parent_view->utxos.end())
                return ValidationResult::reject(Reject::peg, "lock outpoint not found");
            if (!std::holds_alternative<CondPegLock>(it->second.condition))
                return ValidationResult::reject(Reject::peg, "outpoint is not a peg lock");
            if (!it->second.is_explicit() ||
                it->second.explicit_amount() != tx.pegin->amount)
                return ValidationResult::reject(Reject::peg, "claimed amount mismatch");
            if (rules.parent_view->depth_of(tx.pegin->lock_outpoint) < rules.pegin_depth)
                return ValidationResult::reject(Reject::peg, "lock not mature");
        }

        if (tx.pegout) {
            if (!rules.sidechain)
                return ValidationResult::reject(Reject::peg, "peg-out not accepted here");
            if (tx.pegout->amount == 0 || !amount_in_range(tx.pegout->amount))
                return ValidationResult::reject(Reject::peg, "bad peg-out amount");
            if (!(tx.pegout->proof.whitelist_key == tx.pegout->destination))
                return ValidationResult::reject(Reject::proof,
                                                "authorization bound to different key");
            if (!cached_ok &&
                !authorize_verify(tx.pegout->proof, rules.auth_online, rules.auth_offline)) {
                if (rules.cache) rules.cache->store(cache_key, false);
                return ValidationResult::reject(Reject::proof,
                                                "authorization proof invalid");
            }
        }

        bool any_confidential = false;
        for (const auto& out : tx.outputs) {
            if (out.is_explicit()) {
                if (!amount_in_range(out.explicit_amount()))
                    return ValidationResult::reject(Reject::balance,
                                                    "explicit amount out of range");
            } else {
                any_confidential = true;
                const auto& conf = std::get<ConfidentialAmount>(out.amount);
                if (!cached_ok && !range_verify(conf.commitment, out.asset, conf.proof)) {
                    if (rules.cache) rules.cache->store(cache_key, false);
                    return ValidationResult::reject(Reject::proof, "range proof invalid");
                }
            }
        }
        for (const auto& [asset, amount] : tx.fee)
            if (!amount_in_range(amount))
                return ValidationResult::reject(Reject::balance, "fee out of range");
        for (const auto& out : resolved)
            if (!out.is_explicit()) any_confidential = true;

        if (rules.cache && !cached_ok) rules.cache->store(cache_key, true);
        if (any_confidential) return confidential_balance(tx, resolved);
        return explicit_balance(tx, resolved);
    } catch (const std::exception& e) {
        return ValidationResult::reject(Reject::structure, e.what());
    }
}

ValidationResult stamp_validate(const BlockHeader& header, const ChainRules& rules) {
    if (!rules.sidechain) {
        if (!std::holds_alternative<WorkStamp>(header.stamp))
            return ValidationResult::reject(Reject::stamp, "expected work stamp");
        return ValidationResult::accept();
    }
    const auto* multi = std::get_if<MultisigStamp>(&header.stamp);
    if (!multi) return ValidationResult::reject(Reject::stamp, "expected multisig stamp");

    Digest32 cache_key{};
    if (rules.cache) {
        ByteWriter w;
        header.serialize(w);
        cache_key = hash32("fedsim/stamp-cache", w.bytes());
        if (auto hit = rules.cache->lookup(cache_key))
            return *hit ? ValidationResult::accept()
                        : ValidationResult::reject(Reject::stamp, "stamp threshold not met");
    }

    CondMultiKey cond{rules.stamp_threshold, rules.blocksigner_keys};
    Bytes msg = header_signing_message(header.digest());
    bool ok = multikey_satisfied(cond, multi->signatures, msg);
    if (rules.cache) rules.cache->store(cache_key, ok);
    if (!ok)
        return ValidationResult::reject(Reject::stamp, "stamp threshold not met");
    return ValidationResult::accept();
}

namespace {

void apply_tx(ChainState& st, const Transaction& tx) {
    Digest32 id = tx.txid();
    for (const auto& in : tx.inputs) {
        st.utxos.erase(in.prev);
        st.utxo_height.erase(in.prev);
    }
    for (uint32_t i = 0; i < tx.issuances.size(); ++i)
        st.supply[tx.issued_asset_id(i)] += tx.issuances[i].amount;
    if (tx.pegin) {
        st.supply[pegged_asset_id()] += tx.pegin->amount;
        st.claimed_pegins.insert(tx.pegin->lock_outpoint);
    }
    if (tx.pegout) st.supply[pegged_asset_id()] -= tx.pegout->amount;
    for (uint32_t i = 0; i < tx.outputs.size(); ++i) {
        const TxOutput& out = tx.outputs[i];
        OutPoint op{id, i};
        st.utxos.emplace(op, out);
        st.utxo_height.emplace(op, st.height);
        // sends to an unspendable script destroy the tokens
        if (std::holds_alternative<CondUnspendable>(out.condition) && out.is_explicit())
            st.supply[out.asset] -= out.explicit_amount();
    }
    for (const auto& [asset, amount] : tx.fee) st.fee_pool[asset] += amount;
}

}  // namespace

ApplyResult block_apply(const ChainState& state, const Block& block,
                        const ChainRules& rules, bool check_stamp) {
    const BlockHeader& h = block.header;
    if (h.height != state.height + 1)
        return {std::nullopt,
                ValidationResult::reject(Reject::chain_link, "height not successor")};
    if (h.prev != state.tip_digest)
        return {std::nullopt,
                ValidationResult::reject(Reject::chain_link, "prev digest mismatch")};
    if (h.timestamp < state.time)
        return {std::nullopt,
                ValidationResult::reject(Reject::chain_link, "timestamp regression")};
    if (h.merkle_root != block.compute_merkle_root())
        return {std::nullopt,
                ValidationResult::reject(Reject::structure, "merkle root mismatch")};
    if (check_stamp) {
        ValidationResult sr = stamp_validate(h, rules);
        if (!sr.ok()) return {std::nullopt, sr};
    }

    ChainState next = state;
    next.height = h.height;
    next.time = h.timestamp;
    next.tip_digest = h.digest();
    next.headers.push_back(h);
    for (const auto& tx : block.txs) {
        ValidationResult r = tx_validate(tx, next, rules, h.timestamp);
        if (!r.ok()) return {std::nullopt, r};
        apply_tx(next, tx);
    }
    return {std::move(next), ValidationResult::accept()};
}

}  // namespace fedsim
