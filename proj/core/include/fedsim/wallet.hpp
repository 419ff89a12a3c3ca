#pragma once

#include "fedsim/validation.hpp"

namespace fedsim {

/// Out-of-band record of a confidential output's opening. Counterparties
/// exchange these alongside the transaction; the simulator keeps one shared
/// registry per run.
struct SecretRecord {
    uint64_t amount = 0;
    Scalar blinder;
};
using SecretsRegistry = std::map<OutPoint, SecretRecord>;

struct OwnedOutput {
    OutPoint outpoint;
    AssetId asset{};
    uint64_t amount = 0;
    Scalar blinder;  // zero for explicit outputs
    bool confidential = false;
};

/// Single-key user wallet over one chain. Tracks owned unspent outputs with
/// their plaintext openings.
class Wallet {
public:
    Keypair key;

    explicit Wallet(Keypair k) : key(std::move(k)) {}

    uint64_t balance(const AssetId& asset) const;
    const std::vector<OwnedOutput>& utxos() const { return utxos_; }

    /// Removes spent outputs and picks up outputs paying our key. Confidential
    /// amounts are opened through the registry; unknown ones are ignored.
    void scan_block(const Block& block, const SecretsRegistry& secrets);

    /// Selects outputs covering at least `amount`; throws on insufficient
    /// funds. Selected outputs are removed from the wallet (optimistic spend).
    std::vector<OwnedOutput> select(const AssetId& asset, uint64_t amount);

    void add_utxo(OwnedOutput out) { utxos_.push_back(std::move(out)); }

private:
    std::vector<OwnedOutput> utxos_;
};

struct BuildContext {
    DetRng* rng = nullptr;            // blinder source
    SecretsRegistry* secrets = nullptr;  // openings of produced outputs
    uint8_t range_bits = kDefaultRangeBits;
};

struct PlannedOutput {
    AssetId asset{};
    uint64_t amount = 0;
    SpendCondition condition;
};

/// Fills tx.outputs from the plan. Confidential mode blinds every key-locked
/// output and balances the blinder sum against the inputs; unspendable
/// outputs stay explicit so destruction remains auditable.
void finalize_outputs(Transaction& tx, std::vector<PlannedOutput> plan,
                      bool confidential, const Scalar& input_blinder_sum,
                      BuildContext& ctx);

Scalar blinder_sum(std::span<const OwnedOutput> inputs);
bool any_confidential(std::span<const OwnedOutput> inputs);
void add_inputs(Transaction& tx, std::span<const OwnedOutput> inputs);

/// Payment from `from` to a destination key. Confidential payments blind
/// both the payment and the change output.
Transaction build_transfer(Wallet& from, const AssetId& asset, uint64_t amount,
                           const GroupElement& dest, bool confidential,
                           BuildContext& ctx);

/// One-shot native-asset issuance split across recipients; the new asset id
/// derives from this transaction. Throws on zero total.
Transaction build_issuance(const Keypair& issuer, Bytes policy_note,
                           std::span<const std::pair<GroupElement, uint64_t>> recipients);

/// Destroys `amount` of the holder's asset by paying an unspendable output.
Transaction build_destroy(Wallet& holder, const AssetId& asset, uint64_t amount,
                          BuildContext& ctx);

/// Atomic two-party swap: A pays amount_a of asset_a to B, B pays amount_b of
/// asset_b to A, in one transaction signed by both.
Transaction build_swap(Wallet& party_a, const AssetId& asset_a, uint64_t amount_a,
                       Wallet& party_b, const AssetId& asset_b, uint64_t amount_b,
                       bool confidential, BuildContext& ctx);

}  // namespace fedsim
