#pragma once

#include "fedsim/wallet.hpp"

namespace fedsim {

/// Two-way-peg policy shared by every watchman.
struct PegParams {
    std::vector<GroupElement> watchman_keys;  // main-chain multisig key set
    uint32_t watchman_threshold = 0;          // k-of-n on the lock's primary clause
    std::vector<GroupElement> backup_keys;
    uint32_t backup_quorum = 0;
    uint64_t backup_timelock = 0;  // absolute chain time T
    uint32_t pegin_depth = 2;      // main-chain confirmations before minting
    uint32_t pegout_depth = 1;     // sidechain confirmations before co-signing
    /// Federation authorization keys peg-out proofs are checked against.
    std::vector<GroupElement> auth_online;
    std::vector<GroupElement> auth_offline;
};

/// The special freezing condition: watchman threshold, or backup quorum once
/// the timelock passes.
SpendCondition peg_lock_condition(const PegParams& params);
bool is_peg_lock(const SpendCondition& cond, const PegParams& params);

/// Step 1 of the peg cycle: a main-chain transaction freezing `amount` under
/// the peg-lock condition, annotated with the sidechain destination key.
Transaction pegin_create(Wallet& user, const AssetId& main_asset, uint64_t amount,
                         const GroupElement& sidechain_dest, const PegParams& params,
                         BuildContext& ctx);

/// Steps 2-3: scan the main chain for matured, still-unclaimed locks and
/// build the corresponding sidechain mint transactions. Deterministic and
/// idempotent: every watchman derives byte-identical mints, and locks already
/// claimed on the sidechain are skipped. Locks without a destination
/// annotation are ignored (recoverable only through the backup clause).
std::vector<Transaction> pegin_process(std::span<const Block> main_blocks,
                                       const ChainState& main, const ChainState& side,
                                       const PegParams& params);

/// Step 4: a sidechain transaction burning `amount` pegged units, carrying
/// the destination key and its authorization proof.
Transaction pegout_request(Wallet& user, uint64_t amount, const GroupElement& dest,
                           const AuthorizationProof& proof, BuildContext& ctx);

/// A confirmed burn awaiting its main-chain withdrawal.
struct PegoutRequest {
    Digest32 side_txid{};
    GroupElement destination;
    uint64_t amount = 0;
    uint64_t side_height = 0;  // sidechain block it confirmed in
    bool operator==(const PegoutRequest&) const = default;
};

/// All peg-outs confirmed at depth >= `depth` on the sidechain, oldest first.
std::vector<PegoutRequest> find_settled_pegouts(std::span<const Block> side_blocks,
                                                const ChainState& side, uint32_t depth);

/// Steps 5-6, unsigned: the canonical withdrawal every watchman derives
/// independently — locked outpoints consumed in outpoint order until the
/// amount is covered, one output paying the destination exactly, change
/// refrozen under the peg lock. Locks still awaiting their peg-in claim
/// (destination-annotated, not yet in the sidechain's claimed set) are never
/// consumed: spending them would strand the depositor's value. Empty when
/// the remaining locked funds are insufficient.
std::optional<Transaction> build_withdrawal(const PegoutRequest& request,
                                            std::span<const Block> main_blocks,
                                            const ChainState& main,
                                            const ChainState& side,
                                            const PegParams& params);

/// One watchman's main-chain signing agent.
struct WatchmanState {
    uint32_t id = 0;  // index into watchman_keys
    Keypair key;
    /// Online windows as [start, end) pairs; empty means always online.
    std::vector<std::pair<uint64_t, uint64_t>> online_windows;
    std::set<Digest32> signed_requests;  // by sidechain txid

    bool online(uint64_t now) const;
};

/// Policy check + signature share. Returns the share only when the request is
/// confirmed deep enough in a stamped sidechain block, the proof verifies,
/// and every withdrawal output is either the authorized destination or
/// federation change. Honest watchmen sign each request at most once.
std::optional<SchnorrSignature> watchman_sign_withdrawal(
    WatchmanState& watchman, const Transaction& withdrawal,
    const PegoutRequest& request, std::span<const Block> side_blocks,
    const ChainState& side, std::span<const Block> main_blocks,
    const ChainState& main, const PegParams& params, uint64_t now);

/// Attaches gathered shares to every input of the canonical withdrawal.
Transaction assemble_withdrawal(Transaction unsigned_tx,
                                std::span<const std::pair<uint8_t, SchnorrSignature>> shares);

/// Backup escape hatch: spends every currently locked outpoint to the backup
/// quorum condition. Returns nothing before the timelock. `signer_indices`
/// selects which backup keys sign.
std::optional<Transaction> backup_withdrawal(const ChainState& main,
                                             const PegParams& params,
                                             std::span<const Keypair> backup_keys,
                                             std::span<const uint32_t> signer_indices,
                                             uint64_t now);

/// Colluding-watchmen theft attempt: an unauthorized withdrawal of every
/// locked output to `thief_dest`, signed by the colluding subset. Whether it
/// validates is up to the main chain's multisig threshold — authorization
/// proofs are watchman policy, not a main-chain rule.
Transaction confiscation_attempt(const ChainState& main, const PegParams& params,
                                 std::span<const Keypair> colluder_keys,
                                 std::span<const uint32_t> colluder_indices,
                                 const GroupElement& thief_dest);

}  // namespace fedsim
