#include "fedsim/consensus.hpp"

#include "fedsim/hash.hpp"

#include <algorithm>
#include <stdexcept>

namespace fedsim {

void FederationParams::validate() const {
    if (k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
    if (precommit_threshold < k || precommit_threshold > n)
        throw std::invalid_argument("need k <= precommit_threshold <= n");
    if (supermajority > n) throw std::invalid_argument("supermajority exceeds n");
}

uint32_t round_proposer(uint64_t height, uint32_t attempt, uint32_t n) {
    if (n == 0) throw std::invalid_argument("empty federation");
    return uint32_t((height + attempt) % n);
}

uint32_t fork_robustness(uint32_t k, uint32_t n) {
    if (k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
    int64_t v = int64_t(2) * k - int64_t(n) - 1;
    return v > 0 ? uint32_t(v) : 0;
}

uint32_t liveness_tolerance(uint32_t k, uint32_t n) {
    if (k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
    return n - k;
}

Bytes proposal_message(const RoundId& r, const Digest32& header_digest) {
    ByteWriter w;
    w.u64(r.height);
    w.u32(r.attempt);
    w.digest(header_digest);
    Digest32 d = hash32("fedsim/proposal", w.bytes());
    return Bytes(d.begin(), d.end());
}

Bytes precommit_message(const RoundId& r, const Digest32& candidate, uint32_t signer) {
    ByteWriter w;
    w.u64(r.height);
    w.u32(r.attempt);
    w.digest(candidate);
    w.u32(signer);
    Digest32 d = hash32("fedsim/precommit", w.bytes());
    return Bytes(d.begin(), d.end());
}

const char* message_name(const ConsensusMessage& m) {
    switch (m.index()) {
        case 0: return "round_start";
        case 1: return "timeout";
        case 2: return "proposal";
        case 3: return "precommit";
        case 4: return "block_signature";
        case 5: return "block_announce";
        case 6: return "fork_proof";
        case 7: return "submit_tx";
        case 8: return "upgrade";
    }
    return "?";
}

namespace {

/// Schnorr check with a shared memo, so the network verifies each distinct
/// (key, message, signature) triple only once.
bool cached_verify(const GroupElement& pk, std::span<const uint8_t> msg,
                   const SchnorrSignature& sig, ValidationCache* cache) {
    if (!cache) return schnorr_verify(pk, msg, sig);
    ByteWriter w;
    pk.serialize(w);
    w.var_bytes(msg);
    sig.serialize(w);
    Digest32 key = hash32("fedsim/msg-sig-memo", w.bytes());
    if (auto hit = cache->lookup(key)) return *hit;
    bool ok = schnorr_verify(pk, msg, sig);
    cache->store(key, ok);
    return ok;
}

std::vector<uint32_t> stamp_overlap(const BlockHeader& a, const BlockHeader& b) {
    std::vector<uint32_t> out;
    const auto* ma = std::get_if<MultisigStamp>(&a.stamp);
    const auto* mb = std::get_if<MultisigStamp>(&b.stamp);
    if (!ma || !mb) return out;
    std::set<uint8_t> sa;
    for (const auto& [idx, sig] : ma->signatures) sa.insert(idx);
    std::set<uint8_t> seen;
    for (const auto& [idx, sig] : mb->signatures)
        if (sa.count(idx) && seen.insert(idx).second) out.push_back(idx);
    return out;
}

}  // namespace

bool ForkProof::valid(const ChainRules& rules) const {
    if (header_a.height != header_b.height) return false;
    if (header_a.digest() == header_b.digest()) return false;
    return stamp_validate(header_a, rules).ok() && stamp_validate(header_b, rules).ok();
}

void ForkProof::serialize(ByteWriter& w) const {
    header_a.serialize(w);
    header_b.serialize(w);
    w.u32(uint32_t(overlap.size()));
    for (uint32_t id : overlap) w.u32(id);
}

ForkProof ForkProof::deserialize(ByteReader& r) {
    ForkProof p;
    p.header_a = BlockHeader::deserialize(r);
    p.header_b = BlockHeader::deserialize(r);
    uint32_t n = r.seq_len();
    for (uint32_t i = 0; i < n; ++i) p.overlap.push_back(r.u32());
    return p;
}

std::optional<ForkProof> detect_equivocation(std::span<const BlockHeader> headers,
                                             const ChainRules& rules) {
    std::map<uint64_t, const BlockHeader*> seen;
    for (const auto& h : headers) {
        if (!stamp_validate(h, rules).ok()) continue;
        auto [it, fresh] = seen.emplace(h.height, &h);
        if (fresh || it->second->digest() == h.digest()) continue;
        ForkProof proof{*it->second, h, stamp_overlap(*it->second, h)};
        return proof;
    }
    return std::nullopt;
}

// ---- ConsensusNode --------------------------------------------------------

ConsensusNode::ConsensusNode(uint32_t id, FederationParams params, Keypair key,
                             ChainRules rules, Behavior behavior, uint64_t genesis_time)
    : id_(id),
      params_(params),
      key_(std::move(key)),
      rules_(std::move(rules)),
      behavior_(std::move(behavior)),
      genesis_time_(genesis_time) {
    params_.validate();
    if (id_ >= params_.n) throw std::invalid_argument("signer index out of range");
    chain_.time = genesis_time_;
}

void ConsensusNode::reset_round(const RoundId& r) {
    round_ = r;
    phase_ = Phase::idle;
    proposals_.clear();
    precommits_.clear();
    signatures_.clear();
    signed_candidates_.clear();
    my_precommit_.reset();
    signed_once_ = false;
}

StepResult ConsensusNode::step(const ConsensusMessage& msg, uint64_t now) {
    StepResult res;
    if (behavior_.kind == BehaviorKind::crashed) return res;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, MsgRoundStart>) {
                handle_round_start(m, now, res);
            } else if constexpr (std::is_same_v<T, MsgTimeout>) {
                if (!halted_ && m.round == round_ && chain_.height < m.round.height)
                    res.start_next_attempt = true;
            } else if constexpr (std::is_same_v<T, MsgProposal>) {
                handle_proposal(m, now, res);
            } else if constexpr (std::is_same_v<T, MsgPrecommit>) {
                handle_precommit(m, res);
            } else if constexpr (std::is_same_v<T, MsgBlockSignature>) {
                handle_signature(m, now, res);
            } else if constexpr (std::is_same_v<T, MsgBlockAnnounce>) {
                handle_announce(m.block, now, res);
            } else if constexpr (std::is_same_v<T, MsgForkProof>) {
                if (behavior_.kind != BehaviorKind::equivocator && !halted_ &&
                    m.proof.valid(rules_)) {
                    halted_ = true;
                    res.fork_detected = m.proof;
                }
            } else if constexpr (std::is_same_v<T, MsgSubmitTx>) {
                std::string id = to_hex(m.tx.txid());
                if (mempool_ids_.insert(id).second) mempool_.push_back(m.tx);
            } else if constexpr (std::is_same_v<T, MsgUpgrade>) {
                if (!halted_ && params_.supermajority > 0 &&
                    upgrade_apply(m.package, params_.usp_key, rules_.blocksigner_keys,
                                  params_.supermajority) == UpgradeOutcome::accepted &&
                    m.package.version > version_)
                    version_ = m.package.version;
            }
        },
        msg);
    return res;
}

Block ConsensusNode::build_candidate(uint64_t now, uint64_t salt) const {
    Block block;
    block.header.height = chain_.height + 1;
    block.header.prev = chain_.tip_digest;
    block.header.timestamp = std::max(now, chain_.time) + salt;

    // conservative greedy inclusion: each tx is checked against the tip with
    // earlier picks' inputs removed; chained spends wait for the next block
    ChainState scratch = chain_;
    scratch.height = block.header.height;
    scratch.time = block.header.timestamp;
    for (const auto& tx : mempool_) {
        if (behavior_.kind == BehaviorKind::censor &&
            behavior_.censor_filter.count(tx.txid()))
            continue;
        if (!tx_validate(tx, scratch, rules_, block.header.timestamp).ok()) continue;
        block.txs.push_back(tx);
        for (const auto& in : tx.inputs) scratch.utxos.erase(in.prev);
        if (tx.pegin) scratch.claimed_pegins.insert(tx.pegin->lock_outpoint);
    }
    block.header.merkle_root = block.compute_merkle_root();
    return block;
}

void ConsensusNode::handle_round_start(const MsgRoundStart& m, uint64_t now,
                                       StepResult& res) {
    if (halted_) return;
    if (m.round.height != chain_.height + 1) return;  // stale or premature
    if (m.round.height == round_.height && m.round.attempt < round_.attempt) return;
    reset_round(m.round);
    if (round_proposer(round_.height, round_.attempt, params_.n) != id_) return;

    if (behavior_.kind == BehaviorKind::equivocator) {
        // two conflicting candidates, each aimed at half the honest signers;
        // accomplices receive both so they can feed signatures to each
        Block a = build_candidate(now, 0);
        Block b = build_candidate(now, 1);
        std::vector<uint32_t> honest, accomplices;
        for (uint32_t i = 0; i < params_.n; ++i) {
            if (i == id_ || behavior_.accomplices.count(i))
                accomplices.push_back(i);
            else
                honest.push_back(i);
        }
        auto half = honest.begin() + ptrdiff_t((honest.size() + 1) / 2);
        std::vector<uint32_t> to_a(honest.begin(), half), to_b(half, honest.end());
        to_a.insert(to_a.end(), accomplices.begin(), accomplices.end());
        to_b.insert(to_b.end(), accomplices.begin(), accomplices.end());
        for (auto& [block, targets] :
             {std::pair{&a, &to_a}, std::pair{&b, &to_b}}) {
            MsgProposal p{round_, id_, *block,
                          schnorr_sign(key_.secret,
                                       proposal_message(round_, block->header.digest()))};
            res.out.push_back({*targets, std::move(p)});
        }
        phase_ = Phase::proposed;
        return;
    }

    Block block = build_candidate(now, 0);
    MsgProposal p{round_, id_, std::move(block), {}};
    p.sig = schnorr_sign(key_.secret, proposal_message(round_, p.block.header.digest()));
    res.out.push_back({{}, std::move(p)});
    phase_ = Phase::proposed;
}

bool ConsensusNode::validate_candidate(const Block& b) {
    return block_apply(chain_, b, rules_, /*check_stamp=*/false).state.has_value();
}

void ConsensusNode::emit_precommit(const Digest32& candidate, StepResult& res) {
    MsgPrecommit pc{round_, id_, candidate,
                    schnorr_sign(key_.secret, precommit_message(round_, candidate, id_))};
    precommits_[candidate].insert(id_);
    res.out.push_back({{}, std::move(pc)});
    if (phase_ == Phase::idle || phase_ == Phase::proposed) phase_ = Phase::precommitted;
}

void ConsensusNode::handle_proposal(const MsgProposal& m, uint64_t now, StepResult& res) {
    (void)now;
    if (halted_ || chain_.height >= m.round.height) return;
    if (m.round.height != chain_.height + 1) return;
    if (m.proposer >= params_.n ||
        m.proposer != round_proposer(m.round.height, m.round.attempt, params_.n))
        return;
    Digest32 digest = m.block.header.digest();
    if (!cached_verify(rules_.blocksigner_keys[m.proposer],
                       proposal_message(m.round, digest), m.sig, rules_.cache))
        return;
    // a signed proposal for a later attempt means our timeout already fired
    // elsewhere; fast-forward rather than drop it
    if (m.round.attempt > round_.attempt || m.round.height > round_.height)
        reset_round(m.round);
    if (m.round != round_) return;
    if (proposals_.count(digest)) return;
    if (!validate_candidate(m.block)) return;
    proposals_.emplace(digest, m.block);

    bool precommit = false;
    switch (behavior_.kind) {
        case BehaviorKind::honest:
        case BehaviorKind::sign_withholder:
            precommit = !my_precommit_.has_value();
            break;
        case BehaviorKind::censor:
            precommit = !my_precommit_.has_value() &&
                        std::none_of(m.block.txs.begin(), m.block.txs.end(),
                                     [&](const Transaction& tx) {
                                         return behavior_.censor_filter.count(tx.txid());
                                     });
            break;
        case BehaviorKind::equivocator:
            precommit = true;  // happily precommits conflicting candidates
            break;
        case BehaviorKind::crashed:
            break;
    }
    if (precommit) {
        if (!my_precommit_) my_precommit_ = digest;
        emit_precommit(digest, res);
    }
    try_sign(digest, res);
}

void ConsensusNode::handle_precommit(const MsgPrecommit& m, StepResult& res) {
    if (halted_ || m.signer >= params_.n) return;
    if (m.round.height != chain_.height + 1) return;
    if (!cached_verify(rules_.blocksigner_keys[m.signer],
                       precommit_message(m.round, m.candidate, m.signer), m.sig,
                       rules_.cache))
        return;
    if (m.round.attempt > round_.attempt) reset_round(m.round);
    if (m.round != round_) return;
    precommits_[m.candidate].insert(m.signer);
    try_sign(m.candidate, res);
}

void ConsensusNode::try_sign(const Digest32& candidate, StepResult& res) {
    if (halted_) return;
    auto pit = proposals_.find(candidate);
    if (pit == proposals_.end()) return;
    if (precommits_[candidate].size() < params_.precommit_threshold) return;

    switch (behavior_.kind) {
        case BehaviorKind::sign_withholder:
        case BehaviorKind::crashed:
            return;
        case BehaviorKind::honest:
            if (signed_once_ || my_precommit_ != candidate) return;
            break;
        case BehaviorKind::censor:
            if (signed_once_ || my_precommit_ != candidate) return;
            if (std::any_of(pit->second.txs.begin(), pit->second.txs.end(),
                            [&](const Transaction& tx) {
                                return behavior_.censor_filter.count(tx.txid());
                            }))
                return;
            break;
        case BehaviorKind::equivocator:
            if (signed_candidates_.count(candidate)) return;
            break;
    }
    signed_once_ = true;
    signed_candidates_.insert(candidate);
    SchnorrSignature sig =
        schnorr_sign(key_.secret, header_signing_message(candidate));
    signatures_[candidate].emplace_back(uint8_t(id_), sig);
    res.out.push_back({{}, MsgBlockSignature{round_, id_, candidate, sig}});
    phase_ = Phase::signed_phase;
    try_assemble(candidate, res);
}

void ConsensusNode::handle_signature(const MsgBlockSignature& m, uint64_t now,
                                     StepResult& res) {
    (void)now;
    if (halted_ || m.signer >= params_.n) return;
    if (!cached_verify(rules_.blocksigner_keys[m.signer],
                       header_signing_message(m.candidate), m.sig, rules_.cache))
        return;
    if (m.round.height == chain_.height + 1 && m.round.attempt > round_.attempt)
        reset_round(m.round);
    if (m.round != round_) return;
    auto& sigs = signatures_[m.candidate];
    for (const auto& [idx, sig] : sigs)
        if (idx == m.signer) return;
    sigs.emplace_back(uint8_t(m.signer), m.sig);
    try_sign(m.candidate, res);  // our own signature may still be pending
    try_assemble(m.candidate, res);
}

void ConsensusNode::try_assemble(const Digest32& candidate, StepResult& res) {
    if (halted_) return;
    auto pit = proposals_.find(candidate);
    if (pit == proposals_.end()) return;
    auto sit = signatures_.find(candidate);
    if (sit == signatures_.end() || sit->second.size() < params_.k) return;
    if (announced_.count(candidate)) return;

    Block block = pit->second;
    auto sigs = sit->second;
    std::sort(sigs.begin(), sigs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    sigs.resize(params_.k);
    block.header.stamp = MultisigStamp{std::move(sigs)};

    announced_.insert(candidate);
    observe_header(block.header, res);
    if (!halted_ && block.header.height == chain_.height + 1) {
        ApplyResult applied = block_apply(chain_, block, rules_);
        if (applied.state) {
            accept_block(block, res);
            chain_ = std::move(*applied.state);
        }
    }
    res.out.push_back({{}, MsgBlockAnnounce{std::move(block)}});
}

void ConsensusNode::accept_block(const Block& b, StepResult& res) {
    accepted_blocks_.push_back(b);
    for (const auto& tx : b.txs) {
        std::string id = to_hex(tx.txid());
        if (mempool_ids_.erase(id))
            std::erase_if(mempool_, [&](const Transaction& t) {
                return to_hex(t.txid()) == id;
            });
    }
    res.accepted = b;
}

void ConsensusNode::observe_header(const BlockHeader& h, StepResult& res) {
    if (behavior_.kind == BehaviorKind::equivocator) return;  // no self-reporting
    auto [it, fresh] = observed_headers_.emplace(h.height, h);
    if (fresh || it->second.digest() == h.digest()) return;
    ForkProof proof{it->second, h, stamp_overlap(it->second, h)};
    halted_ = true;
    res.fork_detected = proof;
    res.out.push_back({{}, MsgForkProof{std::move(proof)}});
}

void ConsensusNode::handle_announce(const Block& b, uint64_t now, StepResult& res) {
    (void)now;
    if (halted_) return;
    if (!stamp_validate(b.header, rules_).ok()) return;
    observe_header(b.header, res);
    if (halted_) return;
    if (b.header.height != chain_.height + 1) return;
    ApplyResult applied = block_apply(chain_, b, rules_);
    if (!applied.state) return;
    accept_block(b, res);
    chain_ = std::move(*applied.state);
}

}  // namespace fedsim
