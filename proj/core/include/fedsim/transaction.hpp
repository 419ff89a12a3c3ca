#pragma once

#include "fedsim/authproof.hpp"
#include "fedsim/rangeproof.hpp"
#include "fedsim/schnorr.hpp"

#include <map>
#include <optional>
#include <variant>
#include <vector>

namespace fedsim {

/// Reserved asset id for the asset pegged in from the parent chain. Native
/// assets get ids derived from their issuing transaction.
AssetId pegged_asset_id();

struct OutPoint {
    Digest32 txid{};
    uint32_t index = 0;

    auto operator<=>(const OutPoint&) const = default;
    void serialize(ByteWriter& w) const {
        w.digest(txid);
        w.u32(index);
    }
    static OutPoint deserialize(ByteReader& r) {
        OutPoint o;
        o.txid = r.digest();
        o.index = r.u32();
        return o;
    }
};

// ---- spend conditions -----------------------------------------------------

struct CondSingleKey {
    GroupElement key;
    bool operator==(const CondSingleKey&) const = default;
};
struct CondMultiKey {
    uint32_t threshold = 0;
    std::vector<GroupElement> keys;
    bool operator==(const CondMultiKey&) const = default;
};
struct CondTimelock {
    uint64_t not_before = 0;  // simulated seconds (chain timestamp)
    CondMultiKey keys;
    bool operator==(const CondTimelock&) const = default;
};
struct CondUnspendable {
    bool operator==(const CondUnspendable&) const = default;
};
/// Parent-chain peg lock: spendable by the watchman federation threshold,
/// or after the backup timelock by the backup quorum.
struct CondPegLock {
    CondMultiKey federation;
    uint64_t backup_timelock = 0;
    CondMultiKey backup;
    bool operator==(const CondPegLock&) const = default;
};

using SpendCondition =
    std::variant<CondSingleKey, CondMultiKey, CondTimelock, CondUnspendable, CondPegLock>;

void serialize_condition(ByteWriter& w, const SpendCondition& c);
SpendCondition deserialize_condition(ByteReader& r);

// ---- amounts --------------------------------------------------------------

struct ConfidentialAmount {
    Commitment commitment;
    RangeProof proof;
    bool operator==(const ConfidentialAmount&) const = default;
};

using Amount = std::variant<uint64_t, ConfidentialAmount>;

struct TxOutput {
    AssetId asset{};
    Amount amount = uint64_t{0};
    SpendCondition condition = CondUnspendable{};

    bool is_explicit() const { return std::holds_alternative<uint64_t>(amount); }
    uint64_t explicit_amount() const { return std::get<uint64_t>(amount); }
    bool operator==(const TxOutput&) const = default;

    void serialize(ByteWriter& w) const;
    static TxOutput deserialize(ByteReader& r);
};

// ---- transaction ----------------------------------------------------------

/// Unlock clause selector for outputs with more than one spend path.
enum class SpendClause : uint8_t { primary = 0, backup = 1 };

struct TxInput {
    OutPoint prev;
    SpendClause clause = SpendClause::primary;
    /// (key index within the condition's key list, signature over txid)
    std::vector<std::pair<uint8_t, SchnorrSignature>> signatures;

    bool operator==(const TxInput&) const = default;
};

struct Issuance {
    uint64_t amount = 0;  // full issuance, explicit
    Bytes policy_note;    // opaque issuer policy bytes
    bool operator==(const Issuance&) const = default;
};

struct PegoutMetadata {
    GroupElement destination;  // W
    AuthorizationProof proof;
    uint64_t amount = 0;  // pegged units burned
    bool operator==(const PegoutMetadata&) const = default;
};

struct PeginMetadata {
    OutPoint lock_outpoint;  // the freezing transaction on the parent chain
    uint64_t amount = 0;
    GroupElement destination;  // sidechain key receiving the mint
    bool operator==(const PeginMetadata&) const = default;
};

struct Transaction {
    std::vector<TxInput> inputs;
    std::vector<Issuance> issuances;
    std::vector<TxOutput> outputs;
    std::map<AssetId, uint64_t> fee;  // public per-asset amounts
    std::optional<PegoutMetadata> pegout;
    std::optional<PeginMetadata> pegin;
    /// Annotation on a parent-chain lock transaction: the sidechain key the
    /// locked value should be minted to. Carries no validation semantics on
    /// the parent chain; watchmen read it when processing peg-ins.
    std::optional<GroupElement> lock_destination;

    bool operator==(const Transaction&) const = default;

    /// Digest of the canonical serialization with input signatures omitted;
    /// the id every unlocking signature commits to.
    Digest32 txid() const;

    void serialize(ByteWriter& w) const { serialize_impl(w, true); }
    static Transaction deserialize(ByteReader& r);

    /// Asset id of the issuance at `position` in this transaction.
    AssetId issued_asset_id(uint32_t position) const;

    /// Signature message for unlocking this transaction's inputs.
    Bytes signing_message() const;

private:
    void serialize_impl(ByteWriter& w, bool with_signatures) const;
};

/// Signs every input of `tx` whose condition is satisfiable by `secret`
/// holding key index `key_index` (helper for single-key and multisig flows).
void sign_input(Transaction& tx, size_t input_index, uint8_t key_index,
                const Scalar& secret);

}  // namespace fedsim
