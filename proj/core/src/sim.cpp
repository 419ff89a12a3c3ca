#include "fedsim/sim.hpp"

#include "fedsim/pegaudit.hpp"
#include "fedsim/watchman.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <queue>

namespace fedsim {

using nlohmann::json;

namespace {

std::string hex_of(const Block& b) {
    ByteWriter w;
    b.serialize(w);
    return to_hex(w.bytes());
}

class Sim {
public:
    explicit Sim(const Scenario& sc)
        : sc_(sc),
          master_(sc.seed),
          net_rng_(master_.fork("net-delays")),
          main_rng_(master_.fork("main-intervals")),
          workload_rng_(master_.fork("workload")),
          key_rng_(master_.fork("keys")) {}

    SimResult run();

private:
    struct Event {
        double time;
        uint64_t seq;
        std::function<void()> fn;
    };
    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            return a.time > b.time || (a.time == b.time && a.seq > b.seq);
        }
    };
    struct PartitionWindow {
        double start = 0, end = 0;
        std::map<uint32_t, int> group_of;
    };
    struct RoundInfo {
        uint32_t proposer = 0;
        std::vector<Digest32> txids;
        std::set<std::string> digests;  // candidate header digests
    };

    Scenario sc_;
    DetRng master_, net_rng_, main_rng_, workload_rng_, key_rng_;

    // key material (derived from the seed)
    std::vector<Keypair> signer_keys_, watchman_kp_, backup_kp_;
    std::vector<Keypair> auth_online_kp_, auth_offline_kp_;
    Keypair usp_key_;

    ValidationCache cache_;
    ChainRules side_rules_, main_rules_;
    ChainState main_view_;  // shared parent-chain view for all signers
    PegParams peg_;
    std::unique_ptr<MainchainModel> main_;
    std::vector<ConsensusNode> nodes_;
    std::vector<WatchmanState> watchmen_;

    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    uint64_t seq_ = 0;
    double now_ = 0;
    bool stopped_ = false;

    // canonical sidechain bookkeeping
    std::vector<Block> canon_;
    ChainState canon_state_;
    std::map<uint64_t, std::set<std::string>> accepted_heights_;
    std::set<std::string> traced_blocks_;
    std::map<std::pair<uint64_t, uint32_t>, RoundInfo> rounds_;
    std::set<std::string> accepted_digests_;
    double last_accept_ = 0;

    // faults
    std::set<uint32_t> crashed_;
    std::set<uint32_t> compromised_watchmen_;
    std::vector<PartitionWindow> partitions_;

    // workload
    SecretsRegistry secrets_;
    BuildContext build_ctx_;
    std::vector<Wallet> side_wallets_;
    std::unique_ptr<Wallet> main_wallet_;
    std::set<OutPoint> pending_main_spends_;  // inputs of unconfirmed main txs
    Keypair main_user_key_;
    AssetId main_asset_{};
    std::vector<AssetId> issued_assets_;
    std::vector<Digest32> marked_txids_;
    uint64_t marked_counter_ = 0;
    std::map<std::string, double> submit_time_;
    std::vector<double> latencies_;
    uint32_t issuance_done_ = 0, swap_done_ = 0;

    // peg pipeline
    std::map<std::string, std::vector<std::pair<uint8_t, SchnorrSignature>>> gathered_;
    std::map<std::string, Transaction> gathered_for_;  // unsigned withdrawal snapshot
    std::set<std::string> processed_pegouts_;
    bool backup_submitted_ = false;
    std::optional<Digest32> confiscation_txid_;

    Metrics metrics_;
    std::vector<TraceEvent> trace_;
    std::vector<ForkProof> forks_;
    std::set<std::string> fork_keys_;

    void schedule(double t, std::function<void()> fn) {
        queue_.push({t, seq_++, std::move(fn)});
    }
    void trace(const std::string& actor, const std::string& kind, json payload) {
        trace_.push_back({now_, actor, kind, std::move(payload)});
    }
    double net_delay() { return net_rng_.uniform_real(sc_.delay_min, sc_.delay_max); }

    void setup();
    void deliver(uint32_t to, const ConsensusMessage& msg);
    void process(uint32_t from, StepResult& res);
    void send(uint32_t from, const Outbound& out);
    bool partitioned(uint32_t a, uint32_t b, double t) const;
    void start_round(uint32_t node, RoundId r);
    void on_accept(uint32_t node, const Block& b);
    void record_fork(const ForkProof& p);
    void main_block_event(uint32_t miner);
    void peg_duties();
    void process_pegouts();
    void sample_audit();
    void rescan_main_wallet();
    void apply_fault(const FaultEvent& f);
    void submit_to_signers(const Transaction& tx, const char* kind);
    void workload_transfer();
    void workload_pegin();
    void workload_pegout();
    void workload_marked();
    void workload_issuance();
    void workload_swap();
    void finalize(SimResult& result);
};

void Sim::setup() {
    for (uint32_t i = 0; i < sc_.n; ++i) signer_keys_.push_back(Keypair::generate(key_rng_));
    for (uint32_t i = 0; i < sc_.watchmen.count; ++i) {
        watchman_kp_.push_back(Keypair::generate(key_rng_));
        auth_online_kp_.push_back(Keypair::generate(key_rng_));
        auth_offline_kp_.push_back(Keypair::generate(key_rng_));
    }
    for (uint32_t i = 0; i < sc_.watchmen.backup_size; ++i)
        backup_kp_.push_back(Keypair::generate(key_rng_));
    usp_key_ = Keypair::generate(key_rng_);
    main_user_key_ = Keypair::generate(key_rng_);

    auto pubs = [](const std::vector<Keypair>& kps) {
        std::vector<GroupElement> out;
        for (const auto& k : kps) out.push_back(k.pub);
        return out;
    };

    peg_.watchman_keys = pubs(watchman_kp_);
    peg_.watchman_threshold = sc_.watchmen.threshold;
    peg_.backup_keys = pubs(backup_kp_);
    peg_.backup_quorum = sc_.watchmen.backup_quorum;
    peg_.backup_timelock = uint64_t(sc_.watchmen.backup_timelock);
    peg_.pegin_depth = sc_.mainchain.confirm_depth;
    peg_.pegout_depth = sc_.watchmen.pegout_depth;
    peg_.auth_online = pubs(auth_online_kp_);
    peg_.auth_offline = pubs(auth_offline_kp_);

    main_rules_.sidechain = false;
    main_rules_.cache = &cache_;
    side_rules_.sidechain = true;
    side_rules_.stamp_threshold = sc_.k;
    side_rules_.blocksigner_keys = pubs(signer_keys_);
    side_rules_.auth_online = peg_.auth_online;
    side_rules_.auth_offline = peg_.auth_offline;
    side_rules_.pegin_depth = peg_.pegin_depth;
    side_rules_.parent_view = &main_view_;
    side_rules_.cache = &cache_;

    FederationParams fp;
    fp.n = sc_.n;
    fp.k = sc_.k;
    fp.precommit_threshold = sc_.precommit_threshold;
    fp.block_interval = sc_.block_interval;
    fp.proposal_timeout = sc_.proposal_timeout;
    fp.usp_key = usp_key_.pub;
    fp.supermajority = sc_.supermajority;
    for (uint32_t i = 0; i < sc_.n; ++i)
        nodes_.emplace_back(i, fp, signer_keys_[i], side_rules_, Behavior{}, 0);

    for (uint32_t i = 0; i < sc_.watchmen.count; ++i) {
        WatchmanState w;
        w.id = i;
        w.key = watchman_kp_[i];
        if (sc_.watchmen.wake_interval > 0) {
            for (double t = 0; t < sc_.duration; t += sc_.watchmen.wake_interval)
                w.online_windows.emplace_back(uint64_t(t),
                                              uint64_t(t + sc_.watchmen.wake_duration));
        }
        watchmen_.push_back(std::move(w));
    }

    main_ = std::make_unique<MainchainModel>(main_rules_);
    build_ctx_.rng = &workload_rng_;
    build_ctx_.secrets = &secrets_;

    // funding block: an issuance of the main-chain asset to the peg user
    main_wallet_ = std::make_unique<Wallet>(main_user_key_);
    Transaction funding = build_issuance(
        main_user_key_, Bytes{'g', 'e', 'n'},
        std::vector<std::pair<GroupElement, uint64_t>>{
            {main_user_key_.pub, uint64_t(1) << 40}});
    main_asset_ = funding.issued_asset_id(0);
    main_->submit(funding);
    const Block& funded = main_->mine(0, 0);
    trace("miner0", "block",
          {{"chain", "main"},
           {"height", funded.header.height},
           {"digest", to_hex(funded.header.digest())},
           {"txs", funded.txs.size()},
           {"hex", hex_of(funded)}});
    main_view_ = main_->best();
    rescan_main_wallet();

    for (uint32_t i = 0; i < sc_.n; ++i) side_wallets_.emplace_back(Keypair::generate(key_rng_));

    // genesis schedule
    for (uint32_t i = 0; i < sc_.n; ++i)
        schedule(0, [this, i] { start_round(i, {1, 0}); });
    for (uint32_t m = 0; m < sc_.mainchain.miners; ++m) {
        double t = main_rng_.exponential(sc_.mainchain.mean_interval *
                                         double(sc_.mainchain.miners));
        schedule(t, [this, m] { main_block_event(m); });
    }
    for (const auto& f : sc_.faults)
        schedule(f.time, [this, f] { apply_fault(f); });
    if (sc_.workload.tx_interval > 0)
        schedule(sc_.workload.tx_interval, [this] { workload_transfer(); });
    if (sc_.workload.pegin_interval > 0)
        schedule(sc_.workload.pegin_interval, [this] { workload_pegin(); });
    if (sc_.workload.pegout_interval > 0)
        schedule(sc_.workload.pegout_interval, [this] { workload_pegout(); });
    if (sc_.workload.marked_tx_interval > 0 && sc_.workload.censor_victim >= 0)
        schedule(1.0, [this] { workload_marked(); });
    for (uint32_t i = 0; i < sc_.workload.issuance_events; ++i)
        schedule(sc_.duration * double(i + 1) / double(sc_.workload.issuance_events + 1),
                 [this] { workload_issuance(); });
    for (uint32_t i = 0; i < sc_.workload.swap_events; ++i)
        schedule(sc_.duration * double(i + 1) / double(sc_.workload.swap_events + 2) + 30,
                 [this] { workload_swap(); });
}

bool Sim::partitioned(uint32_t a, uint32_t b, double t) const {
    for (const auto& p : partitions_) {
        if (t < p.start || t >= p.end) continue;
        auto ga = p.group_of.count(a) ? p.group_of.at(a) : -int(a) - 1;
        auto gb = p.group_of.count(b) ? p.group_of.at(b) : -int(b) - 1;
        if (ga != gb) return true;
    }
    return false;
}

void Sim::deliver(uint32_t to, const ConsensusMessage& msg) {
    if (stopped_ || crashed_.count(to)) return;
    RoundId before = nodes_[to].current_round();
    bool was_halted = nodes_[to].halted();
    StepResult res = nodes_[to].step(msg, uint64_t(now_));
    if (!was_halted && nodes_[to].halted())
        trace("node" + std::to_string(to), "halt", {{"id", to}});
    if (!(nodes_[to].current_round() == before)) {
        // the node entered a new round; arm its proposal timeout
        RoundId r = nodes_[to].current_round();
        schedule(now_ + sc_.proposal_timeout,
                 [this, to, r] { deliver(to, MsgTimeout{r}); });
    }
    process(to, res);
}

void Sim::send(uint32_t from, const Outbound& out) {
    metrics_.message_counts[message_name(out.message)]++;
    if (const auto* p = std::get_if<MsgProposal>(&out.message)) {
        auto& info = rounds_[{p->round.height, p->round.attempt}];
        info.proposer = p->proposer;
        if (info.digests.empty())
            for (const auto& tx : p->block.txs) info.txids.push_back(tx.txid());
        info.digests.insert(to_hex(p->block.header.digest()));
    }
    std::vector<uint32_t> targets = out.targets;
    if (targets.empty())
        for (uint32_t j = 0; j < sc_.n; ++j) targets.push_back(j);
    for (uint32_t j : targets) {
        if (j != from && partitioned(from, j, now_)) continue;
        double delay = j == from ? 0.0 : net_delay();
        ConsensusMessage copy = out.message;
        schedule(now_ + delay, [this, j, copy = std::move(copy)] { deliver(j, copy); });
    }
}

void Sim::process(uint32_t from, StepResult& res) {
    for (const auto& out : res.out) send(from, out);
    if (res.fork_detected) record_fork(*res.fork_detected);
    if (res.accepted) on_accept(from, *res.accepted);
    if (res.start_next_attempt) {
        RoundId r = nodes_[from].current_round();
        schedule(now_, [this, from, r] { start_round(from, {r.height, r.attempt + 1}); });
    }
}

void Sim::start_round(uint32_t node, RoundId r) {
    deliver(node, MsgRoundStart{r});
}

void Sim::record_fork(const ForkProof& p) {
    std::string a = to_hex(p.header_a.digest()), b = to_hex(p.header_b.digest());
    std::string key = a < b ? a + b : b + a;
    if (!fork_keys_.insert(key).second) return;
    forks_.push_back(p);
    ByteWriter w;
    p.serialize(w);
    trace("network", "fork_proof",
          {{"height", p.header_a.height},
           {"overlap", p.overlap},
           {"proof_hex", to_hex(w.bytes())}});
}

void Sim::on_accept(uint32_t node, const Block& b) {
    std::string digest = to_hex(b.header.digest());
    accepted_digests_.insert(digest);
    auto& at_height = accepted_heights_[b.header.height];
    if (at_height.insert(digest).second && at_height.size() > 1)
        metrics_.duplicate_heights++;

    if (traced_blocks_.insert(digest).second)
        trace("node" + std::to_string(node), "block",
              {{"chain", "side"},
               {"height", b.header.height},
               {"digest", digest},
               {"txs", b.txs.size()},
               {"hex", hex_of(b)}});

    // canonical chain: first accepted block per successor height
    if (b.header.height == canon_.size() + 1 &&
        (canon_.empty() || b.header.prev == canon_.back().header.digest())) {
        if (sc_.block_interval > 0 && !canon_.empty() &&
            now_ - last_accept_ > 2.5 * sc_.block_interval)
            metrics_.stall_intervals.emplace_back(last_accept_, now_);
        last_accept_ = now_;
        canon_.push_back(b);
        ApplyResult ar = block_apply(canon_state_, b, side_rules_);
        if (ar.state) canon_state_ = std::move(*ar.state);
        for (auto& w : side_wallets_) w.scan_block(b, secrets_);
        for (const auto& tx : b.txs) {
            metrics_.peg_ops++;
            std::string id = to_hex(tx.txid());
            if (auto it = submit_time_.find(id); it != submit_time_.end()) {
                latencies_.push_back(now_ - it->second);
                metrics_.tx_confirmed++;
                submit_time_.erase(it);
            }
        }
        process_pegouts();
        sample_audit();
        if (sc_.max_height > 0 && canon_.size() >= sc_.max_height) stopped_ = true;
    }

    // the accepting node moves on to the next height's round
    uint64_t h = nodes_[node].height();
    double t = std::max(now_, double(h) * sc_.block_interval);
    schedule(t, [this, node, h] { start_round(node, {h + 1, 0}); });
}

void Sim::rescan_main_wallet() {
    // full rescan (the main chain can reorganize), minus outputs already
    // committed to unconfirmed transactions still in the miners' mempools
    Wallet scanned(main_user_key_);
    for (const auto& b : main_->best_chain()) scanned.scan_block(b, secrets_);
    main_wallet_ = std::make_unique<Wallet>(main_user_key_);
    for (const auto& out : scanned.utxos())
        if (!pending_main_spends_.count(out.outpoint)) main_wallet_->add_utxo(out);
}

void Sim::sample_audit() {
    PegAuditReport report = peg_audit(main_->best_chain(), canon_, peg_);
    metrics_.peg_audit_series.push_back({now_, report});
    if (report.delta != 0) metrics_.audit_all_zero = false;
}

void Sim::main_block_event(uint32_t miner) {
    if (stopped_) return;
    const Block& b = main_->mine(miner, uint64_t(now_));
    main_view_ = main_->best();
    rescan_main_wallet();
    trace("miner" + std::to_string(miner), "block",
          {{"chain", "main"},
           {"height", b.header.height},
           {"digest", to_hex(b.header.digest())},
           {"txs", b.txs.size()},
           {"hex", hex_of(b)}});
    if (confiscation_txid_) {
        for (const auto& tx : b.txs)
            if (tx.txid() == *confiscation_txid_) metrics_.confiscation_succeeded = true;
    }
    for (const auto& tx : b.txs)
        for (const auto& in : tx.inputs)
            if (in.clause == SpendClause::backup) {
                for (const auto& out : tx.outputs)
                    if (out.is_explicit()) metrics_.backup_recovered += out.explicit_amount();
                metrics_.backup_time = now_;
                break;
            }

    // propagation to competing miners
    Digest32 tip = main_->best_tip();
    for (uint32_t m = 0; m < sc_.mainchain.miners; ++m)
        if (m != miner)
            schedule(now_ + sc_.mainchain.miner_delay,
                     [this, m, tip] { main_->notify_miner(m, tip); });

    peg_duties();
    sample_audit();
    double t = now_ + main_rng_.exponential(sc_.mainchain.mean_interval *
                                            double(sc_.mainchain.miners));
    schedule(t, [this, miner] { main_block_event(miner); });
}

void Sim::peg_duties() {
    bool any_online = std::any_of(watchmen_.begin(), watchmen_.end(),
                                  [&](const WatchmanState& w) {
                                      return w.online(uint64_t(now_));
                                  });
    if (any_online) {
        auto chain = main_->best_chain();
        for (auto& mint : pegin_process(chain, main_->best(), canon_state_, peg_)) {
            trace("watchmen", "pegin_mint",
                  {{"lock_txid", to_hex(mint.pegin->lock_outpoint.txid)},
                   {"amount", mint.pegin->amount}});
            submit_to_signers(mint, nullptr);
        }
        process_pegouts();
    }

    // colluding quorum drains the peg once keys are compromised
    if (!compromised_watchmen_.empty() && !confiscation_txid_) {
        std::vector<Keypair> keys;
        std::vector<uint32_t> indices(compromised_watchmen_.begin(),
                                      compromised_watchmen_.end());
        for (uint32_t i : indices) keys.push_back(watchman_kp_[i]);
        GroupElement thief = Keypair::generate(workload_rng_).pub;
        Transaction theft =
            confiscation_attempt(main_->best(), peg_, keys, indices, thief);
        if (!theft.inputs.empty()) {
            confiscation_txid_ = theft.txid();
            main_->submit(theft);
            trace("colluders", "confiscation_attempt",
                  {{"watchmen", indices}, {"txid", to_hex(*confiscation_txid_)}});
        }
    }

    if (peg_.backup_timelock > 0 && !backup_submitted_) {
        std::vector<uint32_t> signers;
        for (uint32_t i = 0; i < peg_.backup_quorum; ++i) signers.push_back(i);
        auto tx = backup_withdrawal(main_->best(), peg_, backup_kp_, signers,
                                    uint64_t(now_));
        trace("backup", "backup_withdrawal_attempt",
              {{"emitted", tx.has_value()}, {"time", now_}});
        if (tx) {
            main_->submit(*tx);
            backup_submitted_ = true;
        }
    }
}

void Sim::process_pegouts() {
    auto settled = find_settled_pegouts(canon_, canon_state_, peg_.pegout_depth);
    if (settled.empty()) return;
    auto main_chain = main_->best_chain();
    for (const auto& req : settled) {
        std::string key = to_hex(req.side_txid);
        if (processed_pegouts_.count(key)) continue;
        auto unsigned_tx =
            build_withdrawal(req, main_chain, main_->best(), canon_state_, peg_);
        if (!unsigned_tx) continue;  // not enough locked value yet
        auto& shares = gathered_[key];
        if (auto it = gathered_for_.find(key);
            it != gathered_for_.end() && !(it->second == *unsigned_tx)) {
            // the lock set moved under us; stale shares are worthless
            shares.clear();
            for (auto& w : watchmen_) w.signed_requests.erase(req.side_txid);
        }
        gathered_for_[key] = *unsigned_tx;
        for (auto& w : watchmen_) {
            bool already = std::any_of(shares.begin(), shares.end(),
                                       [&](const auto& s) { return s.first == w.id; });
            if (already) continue;
            auto share = watchman_sign_withdrawal(w, *unsigned_tx, req, canon_,
                                                  canon_state_, main_chain,
                                                  main_->best(), peg_, uint64_t(now_));
            if (share) shares.emplace_back(uint8_t(w.id), *share);
        }
        if (shares.size() >= peg_.watchman_threshold) {
            Transaction tx = assemble_withdrawal(*unsigned_tx, shares);
            main_->submit(tx);
            processed_pegouts_.insert(key);
            trace("watchmen", "pegout_withdrawal",
                  {{"request", key}, {"amount", req.amount}, {"shares", shares.size()}});
            break;  // one withdrawal per pass: the lock set changes underneath
        }
    }
}

void Sim::apply_fault(const FaultEvent& f) {
    trace("faults", fault_kind_name(f.kind),
          {{"ids", f.ids}, {"duration", f.duration}});
    switch (f.kind) {
        case FaultEvent::Kind::crash:
            for (uint32_t id : f.ids) {
                crashed_.insert(id);
                nodes_[id].behavior().kind = BehaviorKind::crashed;
            }
            break;
        case FaultEvent::Kind::recover:
            for (uint32_t id : f.ids) {
                crashed_.erase(id);
                nodes_[id].behavior().kind = BehaviorKind::honest;
                // catch up from the canonical chain, then rejoin the rounds
                for (const auto& b : canon_) {
                    if (b.header.height <= nodes_[id].height()) continue;
                    StepResult res = nodes_[id].step(MsgBlockAnnounce{b}, uint64_t(now_));
                    process(id, res);
                }
                uint64_t h = nodes_[id].height();
                schedule(now_, [this, id, h] { start_round(id, {h + 1, 0}); });
            }
            break;
        case FaultEvent::Kind::equivocate:
            for (uint32_t id : f.ids) {
                nodes_[id].behavior().kind = BehaviorKind::equivocator;
                nodes_[id].behavior().accomplices =
                    std::set<uint32_t>(f.ids.begin(), f.ids.end());
            }
            break;
        case FaultEvent::Kind::censor:
            for (uint32_t id : f.ids) {
                nodes_[id].behavior().kind = BehaviorKind::censor;
                nodes_[id].behavior().censor_filter =
                    std::set<Digest32>(marked_txids_.begin(), marked_txids_.end());
            }
            break;
        case FaultEvent::Kind::withhold:
            for (uint32_t id : f.ids)
                nodes_[id].behavior().kind = BehaviorKind::sign_withholder;
            break;
        case FaultEvent::Kind::partition: {
            PartitionWindow w;
            w.start = now_;
            w.end = now_ + f.duration;
            for (size_t g = 0; g < f.groups.size(); ++g)
                for (uint32_t id : f.groups[g]) w.group_of[id] = int(g);
            partitions_.push_back(std::move(w));
            break;
        }
        case FaultEvent::Kind::compromise_keys:
            for (uint32_t id : f.ids) compromised_watchmen_.insert(id);
            break;
        case FaultEvent::Kind::tamper_alarm:
            for (uint32_t id : f.ids) {
                crashed_.insert(id);
                nodes_[id].behavior().kind = BehaviorKind::crashed;
                trace("node" + std::to_string(id), "integrity_warning",
                      {{"id", id}});
            }
            break;
    }
}

void Sim::submit_to_signers(const Transaction& tx, const char* kind) {
    std::string id = to_hex(tx.txid());
    if (kind) {
        submit_time_.emplace(id, now_);
        metrics_.tx_submitted++;
        trace("workload", kind, {{"txid", id}});
    }
    for (uint32_t j = 0; j < sc_.n; ++j) {
        ConsensusMessage msg = MsgSubmitTx{tx};
        schedule(now_ + net_delay(), [this, j, msg = std::move(msg)] { deliver(j, msg); });
    }
}

void Sim::workload_transfer() {
    if (!stopped_ && sc_.n >= 2) {
        uint32_t a = uint32_t(workload_rng_.uniform(sc_.n));
        uint32_t b = uint32_t(workload_rng_.uniform(sc_.n));
        if (b == a) b = (a + 1) % sc_.n;
        uint64_t balance = side_wallets_[a].balance(pegged_asset_id());
        if (balance > 0) {
            uint64_t amount = 1 + workload_rng_.uniform(std::min<uint64_t>(balance, 50));
            try {
                Transaction tx = build_transfer(side_wallets_[a], pegged_asset_id(),
                                                amount, side_wallets_[b].key.pub,
                                                sc_.workload.confidential, build_ctx_);
                submit_to_signers(tx, "tx_submit");
            } catch (const std::exception&) {
                // wallet raced against an unconfirmed spend; skip this tick
            }
        }
        schedule(now_ + sc_.workload.tx_interval, [this] { workload_transfer(); });
    }
}

void Sim::workload_pegin() {
    if (!stopped_) {
        uint64_t amount = 5 + workload_rng_.uniform(45);
        uint32_t dest = uint32_t(workload_rng_.uniform(sc_.n));
        try {
            Transaction tx = pegin_create(*main_wallet_, main_asset_, amount,
                                          side_wallets_[dest].key.pub, peg_, build_ctx_);
            for (const auto& in : tx.inputs) pending_main_spends_.insert(in.prev);
            main_->submit(tx);
            trace("workload", "pegin_lock",
                  {{"txid", to_hex(tx.txid())}, {"amount", amount}});
        } catch (const std::exception&) {
        }
        schedule(now_ + sc_.workload.pegin_interval, [this] { workload_pegin(); });
    }
}

void Sim::workload_pegout() {
    if (!stopped_) {
        uint32_t who = uint32_t(workload_rng_.uniform(sc_.n));
        uint64_t balance = side_wallets_[who].balance(pegged_asset_id());
        if (balance > 0) {
            uint64_t amount = 1 + workload_rng_.uniform(std::min<uint64_t>(balance, 30));
            Keypair dest = Keypair::generate(workload_rng_);
            size_t idx = size_t(workload_rng_.uniform(auth_online_kp_.size()));
            AuthorizationProof proof = authorize_key(
                idx, auth_online_kp_[idx].secret,
                dest.secret + auth_offline_kp_[idx].secret, dest.pub,
                peg_.auth_online, peg_.auth_offline);
            try {
                Transaction tx = pegout_request(side_wallets_[who], amount, dest.pub,
                                                proof, build_ctx_);
                submit_to_signers(tx, "pegout_submit");
            } catch (const std::exception&) {
            }
        }
        schedule(now_ + sc_.workload.pegout_interval, [this] { workload_pegout(); });
    }
}

void Sim::workload_marked() {
    if (!stopped_) {
        uint32_t victim = uint32_t(sc_.workload.censor_victim);
        Bytes note{'m', 'a', 'r', 'k'};
        note.push_back(uint8_t(marked_counter_++));
        Transaction tx = build_issuance(
            side_wallets_[victim].key, note,
            std::vector<std::pair<GroupElement, uint64_t>>{
                {side_wallets_[victim].key.pub, 1}});
        Digest32 id = tx.txid();
        marked_txids_.push_back(id);
        for (auto& n : nodes_)
            if (n.behavior().kind == BehaviorKind::censor)
                n.behavior().censor_filter.insert(id);
        trace("workload", "marked_tx", {{"txid", to_hex(id)}, {"victim", victim}});
        ConsensusMessage msg = MsgSubmitTx{std::move(tx)};
        schedule(now_ + net_delay(),
                 [this, victim, msg = std::move(msg)] { deliver(victim, msg); });
        schedule(now_ + sc_.workload.marked_tx_interval, [this] { workload_marked(); });
    }
}

void Sim::workload_issuance() {
    if (stopped_) return;
    uint32_t issuer = uint32_t(workload_rng_.uniform(sc_.n));
    Bytes note{'a', 's', 's', 'e', 't'};
    note.push_back(uint8_t(issuance_done_++));
    std::vector<std::pair<GroupElement, uint64_t>> recipients;
    for (uint32_t i = 0; i < std::min<uint32_t>(3, sc_.n); ++i)
        recipients.emplace_back(side_wallets_[(issuer + i) % sc_.n].key.pub,
                                100 + workload_rng_.uniform(100));
    Transaction tx = build_issuance(side_wallets_[issuer].key, note, recipients);
    issued_assets_.push_back(tx.issued_asset_id(0));
    submit_to_signers(tx, "issuance_submit");
}

void Sim::workload_swap() {
    if (stopped_ || issued_assets_.empty()) return;
    // find one wallet holding an issued asset and another holding pegged funds
    const AssetId& asset = issued_assets_[workload_rng_.uniform(issued_assets_.size())];
    int holder = -1, counter = -1;
    for (uint32_t i = 0; i < sc_.n; ++i) {
        if (holder < 0 && side_wallets_[i].balance(asset) >= 10) holder = int(i);
        else if (counter < 0 && side_wallets_[i].balance(pegged_asset_id()) >= 5)
            counter = int(i);
    }
    if (holder < 0 || counter < 0) {
        schedule(now_ + 120, [this] { workload_swap(); });  // retry once funded
        return;
    }
    try {
        Transaction tx = build_swap(side_wallets_[holder], asset, 10,
                                    side_wallets_[counter], pegged_asset_id(), 5,
                                    sc_.workload.confidential, build_ctx_);
        submit_to_signers(tx, "swap_submit");
    } catch (const std::exception&) {
    }
}

void Sim::finalize(SimResult& result) {
    metrics_.blocks = canon_.size();
    metrics_.main_blocks = main_->best().height;
    metrics_.main_orphans = main_->orphan_count();
    metrics_.fork_proofs = forks_.size();
    if (!latencies_.empty()) {
        double sum = 0;
        for (double v : latencies_) sum += v;
        metrics_.latency_mean = sum / double(latencies_.size());
        metrics_.latency_p50 = percentile(latencies_, 50);
        metrics_.latency_p90 = percentile(latencies_, 90);
    }
    if (canon_.empty() && sc_.block_interval > 0 && sc_.duration > 0)
        metrics_.stall_intervals.emplace_back(0.0, sc_.duration);

    std::vector<RoundRecord> history;
    for (const auto& [round, info] : rounds_) {
        bool success = std::any_of(info.digests.begin(), info.digests.end(),
                                   [&](const std::string& d) {
                                       return accepted_digests_.count(d) > 0;
                                   });
        history.push_back({info.proposer, info.txids, success});
    }
    for (uint32_t flagged : censorship_monitor(history, 10))
        metrics_.censorship_flags.push_back(flagged);
    for (const auto& n : nodes_) metrics_.node_versions.push_back(n.version());

    result.final_audit = peg_audit(main_->best_chain(), canon_, peg_);
    metrics_.final_delta = result.final_audit.delta;

    result.metrics = std::move(metrics_);
    result.trace = std::move(trace_);
    result.side_blocks = std::move(canon_);
    result.main_blocks = main_->best_chain();
    result.fork_proofs = std::move(forks_);
    result.round_history = std::move(history);
    result.scenario_json = sc_.to_json();
    result.blocksigner_keys = side_rules_.blocksigner_keys;
    result.stamp_threshold = sc_.k;
    result.auth_online = peg_.auth_online;
    result.auth_offline = peg_.auth_offline;
}

SimResult Sim::run() {
    sc_.validate();
    setup();
    while (!queue_.empty() && !stopped_) {
        Event e = queue_.top();
        queue_.pop();
        if (e.time > sc_.duration) break;
        now_ = std::max(now_, e.time);
        e.fn();
    }
    SimResult result;
    finalize(result);
    return result;
}

}  // namespace

SimResult sim_run(const Scenario& scenario) {
    Sim sim(scenario);
    return sim.run();
}

LatencyComparison latency_compare(uint64_t seed, uint64_t tx_count,
                                  double side_interval, double main_mean,
                                  uint32_t confirmations, bool main_deterministic) {
    if (tx_count == 0 || side_interval <= 0 || main_mean <= 0 || confirmations < 1)
        throw std::invalid_argument("bad latency comparison parameters");
    DetRng rng(seed);
    DetRng arrivals_rng = rng.fork("main-intervals");

    // main-chain block arrival times
    std::vector<double> arrivals;
    double horizon = side_interval * double(tx_count + 1) +
                     main_mean * double(confirmations + 64);
    double t = 0;
    while (t < horizon) {
        t += main_deterministic ? main_mean : arrivals_rng.exponential(main_mean);
        arrivals.push_back(t);
    }

    // each transaction is submitted just after a sidechain block boundary
    constexpr double kEps = 1e-9;
    double side_sum = 0, main_sum = 0;
    size_t cursor = 0;
    uint64_t samples = 0;
    for (uint64_t i = 0; i < tx_count; ++i) {
        double submit = double(i) * side_interval + kEps;
        while (cursor < arrivals.size() && arrivals[cursor] <= submit) ++cursor;
        size_t last = cursor + confirmations - 1;
        if (last >= arrivals.size()) break;
        side_sum += double(i + 1) * side_interval - submit;
        main_sum += arrivals[last] - submit;
        ++samples;
    }
    LatencyComparison cmp;
    cmp.confirmations = confirmations;
    cmp.samples = samples;
    if (samples > 0) {
        cmp.side_mean = side_sum / double(samples);
        cmp.main_mean = main_sum / double(samples);
        cmp.ratio = cmp.main_mean / cmp.side_mean;
    }
    return cmp;
}

}  // namespace fedsim
