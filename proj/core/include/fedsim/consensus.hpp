#pragma once

#include "fedsim/validation.hpp"
#include "fedsim/upgrade.hpp"

#include <deque>
#include <functional>
#include <set>

namespace fedsim {

struct FederationParams {
    uint32_t n = 0;
    uint32_t k = 0;  // signing threshold (chain rule, fixed)
    uint32_t precommit_threshold = 0;  // >= k, per-run policy
    double block_interval = 60.0;      // simulated seconds
    double proposal_timeout = 5.0;
    /// Software-upgrade policy: publisher key and required countersignatures.
    GroupElement usp_key;
    uint32_t supermajority = 0;

    /// Throws std::invalid_argument when 1 <= k <= n or
    /// k <= precommit_threshold <= n is violated.
    void validate() const;
};

/// Proposer for a round: (height + attempt) mod n. Timeouts bump the
/// attempt, so a crashed proposer's turn gets missed.
uint32_t round_proposer(uint64_t height, uint32_t attempt, uint32_t n);

/// Max equivocating signers that cannot fork the chain: max(0, 2k - n - 1).
uint32_t fork_robustness(uint32_t k, uint32_t n);

/// Max unavailable signers with block production preserved: n - k.
uint32_t liveness_tolerance(uint32_t k, uint32_t n);

// ---- behaviors ------------------------------------------------------------

enum class BehaviorKind : uint8_t {
    honest,
    crashed,          // emits nothing (the network also drops its inbox)
    equivocator,      // precommits/signs conflicting candidates; equivocates as proposer
    censor,           // omits filtered txs from proposals, vetoes blocks carrying them
    sign_withholder,  // precommits but never signs
};

struct Behavior {
    BehaviorKind kind = BehaviorKind::honest;
    /// censor: transaction ids that must never confirm.
    std::set<Digest32> censor_filter;
    /// equivocator: the colluding coalition (used to aim conflicting
    /// candidates at disjoint halves of the honest signers).
    std::set<uint32_t> accomplices;
};

// ---- fork proofs ----------------------------------------------------------

/// Two validly stamped headers at one height: machine-checkable evidence of
/// signer equivocation.
struct ForkProof {
    BlockHeader header_a;
    BlockHeader header_b;
    std::vector<uint32_t> overlap;  // signer ids present in both stamps

    bool valid(const ChainRules& rules) const;
    void serialize(ByteWriter& w) const;
    static ForkProof deserialize(ByteReader& r);
};

/// Scans stamp-valid headers for the first pair sharing a height with
/// distinct digests.
std::optional<ForkProof> detect_equivocation(std::span<const BlockHeader> headers,
                                             const ChainRules& rules);

// ---- messages -------------------------------------------------------------

struct RoundId {
    uint64_t height = 0;
    uint32_t attempt = 0;
    auto operator<=>(const RoundId&) const = default;
};

struct MsgRoundStart { RoundId round; };
struct MsgTimeout { RoundId round; };
struct MsgProposal {
    RoundId round;
    uint32_t proposer = 0;
    Block block;
    SchnorrSignature sig;  // proposer's, over (round, header digest)
};
struct MsgPrecommit {
    RoundId round;
    uint32_t signer = 0;
    Digest32 candidate{};
    SchnorrSignature sig;  // over (round, candidate, signer)
};
/// The stamp component itself: a signature over the header digest.
struct MsgBlockSignature {
    RoundId round;
    uint32_t signer = 0;
    Digest32 candidate{};
    SchnorrSignature sig;
};
struct MsgBlockAnnounce { Block block; };
struct MsgForkProof { ForkProof proof; };
struct MsgSubmitTx { Transaction tx; };
struct MsgUpgrade { UpgradePackage package; };

using ConsensusMessage =
    std::variant<MsgRoundStart, MsgTimeout, MsgProposal, MsgPrecommit,
                 MsgBlockSignature, MsgBlockAnnounce, MsgForkProof, MsgSubmitTx,
                 MsgUpgrade>;

const char* message_name(const ConsensusMessage& m);

struct Outbound {
    /// Empty target list means broadcast to every signer.
    std::vector<uint32_t> targets;
    ConsensusMessage message;
};

struct StepResult {
    std::vector<Outbound> out;
    std::optional<Block> accepted;   // block accepted by this node this step
    bool start_next_attempt = false; // round timed out; caller schedules the next
    std::optional<ForkProof> fork_detected;
};

// ---- the blocksigner state machine ---------------------------------------

enum class Phase : uint8_t { idle, proposed, precommitted, signed_phase };

/// One federation blocksigner. Advanced strictly one event at a time; owns
/// no shared state and communicates only through returned messages.
class ConsensusNode {
public:
    ConsensusNode(uint32_t id, FederationParams params, Keypair key,
                  ChainRules rules, Behavior behavior, uint64_t genesis_time = 0);

    /// Pure-ish transition: same (state, message, now) always yields the same
    /// result. Stale or malformed events are consumed with no output.
    StepResult step(const ConsensusMessage& msg, uint64_t now);

    uint32_t id() const { return id_; }
    const ChainState& chain() const { return chain_; }
    uint64_t height() const { return chain_.height; }
    bool halted() const { return halted_; }
    uint64_t version() const { return version_; }
    Phase phase() const { return phase_; }
    const RoundId& current_round() const { return round_; }
    const FederationParams& params() const { return params_; }
    Behavior& behavior() { return behavior_; }
    const std::vector<Transaction>& mempool() const { return mempool_; }
    const GroupElement& pub() const { return key_.pub; }

    /// The accepted chain as full blocks, for export and re-verification.
    const std::vector<Block>& accepted_blocks() const { return accepted_blocks_; }

private:
    uint32_t id_;
    FederationParams params_;
    Keypair key_;
    ChainRules rules_;
    Behavior behavior_;
    uint64_t genesis_time_;

    ChainState chain_;
    std::vector<Block> accepted_blocks_;
    std::vector<Transaction> mempool_;
    std::set<std::string> mempool_ids_;

    RoundId round_;
    Phase phase_ = Phase::idle;
    // per-candidate bookkeeping for the current round
    std::map<Digest32, Block> proposals_;
    std::map<Digest32, std::set<uint32_t>> precommits_;
    std::map<Digest32, std::vector<std::pair<uint8_t, SchnorrSignature>>> signatures_;
    std::set<Digest32> signed_candidates_;
    std::set<Digest32> announced_;
    std::optional<Digest32> my_precommit_;
    bool signed_once_ = false;

    // fork watch: first stamp-valid header seen per height
    std::map<uint64_t, BlockHeader> observed_headers_;
    bool halted_ = false;
    uint64_t version_ = 0;

    void handle_round_start(const MsgRoundStart& m, uint64_t now, StepResult& res);
    void handle_proposal(const MsgProposal& m, uint64_t now, StepResult& res);
    void handle_precommit(const MsgPrecommit& m, StepResult& res);
    void handle_signature(const MsgBlockSignature& m, uint64_t now, StepResult& res);
    void handle_announce(const Block& b, uint64_t now, StepResult& res);
    void try_sign(const Digest32& candidate, StepResult& res);
    void try_assemble(const Digest32& candidate, StepResult& res);
    void accept_block(const Block& b, StepResult& res);
    void observe_header(const BlockHeader& h, StepResult& res);
    Block build_candidate(uint64_t now, uint64_t salt) const;
    void emit_precommit(const Digest32& candidate, StepResult& res);
    bool validate_candidate(const Block& b);
    void reset_round(const RoundId& r);
};

/// Signed-message helpers shared with the verifier side.
Bytes proposal_message(const RoundId& r, const Digest32& header_digest);
Bytes precommit_message(const RoundId& r, const Digest32& candidate, uint32_t signer);

}  // namespace fedsim
