#pragma once

#include "fedsim/chainstate.hpp"

#include <optional>
#include <unordered_map>

namespace fedsim {

enum class Reject {
    none,  // accepted
    structure,
    double_spend,
    balance,
    proof,
    signature,
    script,
    issuance,
    peg,
    stamp,
    chain_link,
};

struct ValidationResult {
    Reject reason = Reject::none;
    std::string detail;

    bool ok() const { return reason == Reject::none; }
    static ValidationResult accept() { return {}; }
    static ValidationResult reject(Reject r, std::string d) { return {r, std::move(d)}; }
};

const char* reject_name(Reject r);

/// Memo for the state-independent parts of validation (signatures, range
/// proofs, authorization proofs, stamp signatures). Outputs are immutable
/// once created, so results keyed by digest never go stale.
class ValidationCache {
public:
    std::optional<bool> lookup(const Digest32& key) const {
        auto it = map_.find(to_hex(key));
        return it == map_.end() ? std::nullopt : std::optional<bool>(it->second);
    }
    void store(const Digest32& key, bool ok) { map_[to_hex(key)] = ok; }

private:
    std::unordered_map<std::string, bool> map_;
};

struct ChainRules {
    bool sidechain = false;
    /// Multisig stamp threshold (k); ignored for work-stamped chains.
    uint32_t stamp_threshold = 0;
    std::vector<GroupElement> blocksigner_keys;
    /// Federation authorization keys (online P_j / offline Q_j) that peg-out
    /// proofs are verified against.
    std::vector<GroupElement> auth_online;
    std::vector<GroupElement> auth_offline;
    /// Required parent-chain confirmation depth for peg-in mints.
    uint32_t pegin_depth = 2;
    /// Parent-chain view used to validate peg-in claims (sidechain only).
    const ChainState* parent_view = nullptr;
    /// Optional shared memo; validation works identically without it.
    ValidationCache* cache = nullptr;
};

/// Full transaction check against a chain state. `now` is the timestamp of
/// the block the transaction would confirm in (timelock evaluation).
/// Returns a structured rejection; never throws on malformed input.
ValidationResult tx_validate(const Transaction& tx, const ChainState& state,
                             const ChainRules& rules, uint64_t now);

/// Header stamp check only (k-of-n multisig or work stamp).
ValidationResult stamp_validate(const BlockHeader& header, const ChainRules& rules);

struct ApplyResult {
    std::optional<ChainState> state;  // set iff accepted
    ValidationResult result;
};

/// Validates the whole block (link, merkle root, stamp, every transaction in
/// order) and returns the successor state. Pure: the input state is shared
/// read-only and never mutated. `check_stamp=false` validates an unstamped
/// candidate block before any signatures exist.
ApplyResult block_apply(const ChainState& state, const Block& block,
                        const ChainRules& rules, bool check_stamp = true);

}  // namespace fedsim
