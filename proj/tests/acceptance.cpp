// Acceptance suite: one check per shipped guarantee, one PASS/FAIL line each.
// Usage: acceptance <path-to-fedsim-cli>
#include "fedsim/sim.hpp"
#include "fedsim/watchman.hpp"

#include "fuzz_util.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace fedsim;

namespace {

std::string g_cli;
int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

void report(int id, const std::string& label, bool pass, const std::string& note) {
    std::cout << (pass ? "PASS" : "FAIL") << " " << (id < 10 ? " " : "") << id
              << ": " << label;
    if (!note.empty()) std::cout << " [" << note << "]";
    std::cout << "\n" << std::flush;
    if (!pass) ++g_failures;
}

template <typename Fn>
void criterion(int id, const std::string& label, Fn&& fn) {
    try {
        std::string note;
        bool ok = fn(note);
        report(id, label, ok, note);
    } catch (const std::exception& e) {
        report(id, label, false, std::string("exception: ") + e.what());
    }
}

/// Bundled scenarios are simulated at most once and shared between checks.
std::map<std::string, SimResult> g_cache;
const SimResult& bundled_run(const std::string& name) {
    auto it = g_cache.find(name);
    if (it == g_cache.end())
        it = g_cache.emplace(name, sim_run(bundled_scenario(name))).first;
    return it->second;
}

Scenario robustness_cell(uint32_t k, uint32_t n, uint32_t equivocators,
                         uint64_t rounds) {
    Scenario s;
    s.name = "cell";
    s.n = n;
    s.k = k;
    s.precommit_threshold = k;
    s.supermajority = k;
    s.block_interval = 0;
    s.duration = 4000;
    s.max_height = rounds;
    FaultEvent f;
    f.kind = FaultEvent::Kind::equivocate;
    f.time = 0;
    for (uint32_t i = 0; i < equivocators; ++i) f.ids.push_back(i);
    if (equivocators > 0) s.faults.push_back(std::move(f));
    s.validate();
    return s;
}

int run_cli(const std::string& args) {
    std::string cmd = "'" + g_cli + "' " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string write_trace_file(const SimResult& r, const std::string& path) {
    std::ofstream out(path);
    nlohmann::json header = trace_header(r.scenario_json, r.blocksigner_keys,
                                         r.stamp_threshold, r.auth_online,
                                         r.auth_offline);
    write_trace(out, header, r.trace);
    return path;
}

// ---- criteria -------------------------------------------------------------

bool c1_robustness_boundary(std::string& note) {
    auto t0 = std::chrono::steady_clock::now();
    struct Cell { uint32_t k, n, e; bool forks; };
    // at the bound 2k-n-1 nothing forks; one more traitor yields a ForkProof
    std::vector<Cell> cells{{5, 8, 1, false}, {5, 8, 2, true},
                            {6, 8, 3, false}, {6, 8, 4, true},
                            {8, 11, 4, false}, {8, 11, 5, true}};
    for (const Cell& c : cells) {
        SimResult r = sim_run(robustness_cell(c.k, c.n, c.e, 1000));
        if (c.forks) {
            if (r.fork_proofs.empty()) {
                note = "no fork proof at (" + std::to_string(c.k) + "," +
                       std::to_string(c.n) + ") with " + std::to_string(c.e);
                return false;
            }
        } else if (r.metrics.fork_proofs != 0 || r.metrics.blocks < 1000) {
            note = "(" + std::to_string(c.k) + "," + std::to_string(c.n) +
                   ") with " + std::to_string(c.e) + ": " +
                   std::to_string(r.metrics.fork_proofs) + " forks, " +
                   std::to_string(r.metrics.blocks) + " blocks";
            return false;
        }
    }
    double secs = seconds_since(t0);
    note = "6 cells in " + std::to_string(secs).substr(0, 4) + "s";
    return secs < 60.0;
}

bool c2_liveness_boundary(std::string& note) {
    Scenario crash3;  // liquid parameters minus the workload, three signers down
    crash3.name = "liveness-3";
    FaultEvent f;
    f.kind = FaultEvent::Kind::crash;
    f.time = 0;
    f.ids = {0, 1, 2};
    crash3.faults.push_back(std::move(f));
    crash3.validate();
    SimResult alive = sim_run(crash3);
    const SimResult& stalled = bundled_run("stall-boundary");  // four signers down
    note = "3 crashed: " + std::to_string(alive.metrics.blocks) +
           " blocks; 4 crashed: " + std::to_string(stalled.metrics.blocks);
    return alive.metrics.blocks >= 59 && alive.metrics.blocks <= 60 &&
           stalled.metrics.blocks == 0;
}

bool c3_no_reorg(std::string& note) {
    auto t0 = std::chrono::steady_clock::now();
    for (const char* name : {"liquid-default", "stall-boundary", "censorship",
                             "pegcycle", "robustness-5of8", "robustness-6of8"}) {
        const SimResult& r = bundled_run(name);
        if (r.metrics.duplicate_heights != 0 || r.metrics.fork_proofs != 0) {
            note = std::string(name) + " produced a duplicate height or fork";
            return false;
        }
        for (size_t i = 1; i < r.side_blocks.size(); ++i)
            if (r.side_blocks[i].header.prev != r.side_blocks[i - 1].header.digest()) {
                note = std::string(name) + ": canonical chain link broken";
                return false;
            }
    }
    uint64_t liquid_blocks = bundled_run("liquid-default").metrics.blocks;
    if (liquid_blocks < 59 || liquid_blocks > 60) {
        note = "liquid-default made " + std::to_string(liquid_blocks) + " blocks";
        return false;
    }

    // meanwhile a two-miner work chain with lossy propagation does orphan tips
    MainchainModel race{ChainRules{}};
    DetRng rng(424242);
    uint64_t t = 0;
    while (race.blocks_mined() < 500) {
        uint32_t miner = uint32_t(rng.uniform(2));
        t += uint64_t(MainchainModel::draw_interval(rng, 30.0)) + 1;
        race.mine(miner, t);
        if (rng.uniform(10) != 0) {  // one announcement in ten gets lost
            race.notify_miner(0, race.best_tip());
            race.notify_miner(1, race.best_tip());
        }
    }
    double secs = seconds_since(t0);
    note = std::to_string(race.orphan_count()) + " orphans/500 blocks, " +
           std::to_string(liquid_blocks) + " liquid blocks, " +
           std::to_string(secs).substr(0, 4) + "s";
    return race.orphan_count() >= 1 && secs < 30.0;
}

bool c4_latency_ratio(std::string& note) {
    LatencyComparison lc = latency_compare(11, 3000, 60.0, 600.0, 1);
    std::ostringstream os;
    os << "ratio " << lc.ratio << " over " << lc.samples << " txs";
    note = os.str();
    return lc.samples == 3000 && lc.ratio >= 8.0 && lc.ratio <= 12.0;
}

bool c5_peg_conservation(std::string& note) {
    const SimResult& r = bundled_run("pegcycle");
    uint64_t ops = r.metrics.peg_ops + r.metrics.tx_confirmed;
    note = std::to_string(ops) + " settled operations, " +
           std::to_string(r.metrics.peg_audit_series.size()) + " audit points";
    return ops >= 500 && r.metrics.audit_all_zero && r.metrics.final_delta == 0 &&
           !r.metrics.peg_audit_series.empty();
}

bool c6_ct_oracle(std::string& note) {
    DetRng rng(606);
    int accepted = 0, rejected = 0;
    ChainRules rules;
    rules.sidechain = true;
    for (int i = 0; i < 1000; ++i) {
        fuzz::FuzzCase fc = fuzz::make_fuzz_case(rng, i % 2 == 1);
        if (tx_validate(fc.tx, fc.state, rules, 0).ok() != fc.oracle_ok) {
            note = "validator/oracle disagreement at case " + std::to_string(i);
            return false;
        }
        (fc.oracle_ok ? accepted : rejected)++;
    }
    if (accepted < 250 || rejected < 250) {
        note = "generator imbalance";
        return false;
    }

    AssetId asset = hash32("accept", Bytes{'a'});
    Scalar b = Scalar::random(rng);
    Commitment c = commit(31337, b, asset);
    RangeProof p = range_prove(31337, b, asset, 16);
    ByteWriter w;
    p.serialize(w);
    Bytes base = w.bytes();
    int mutations = 10000, survived = 0;
    for (int i = 0; i < mutations; ++i) {
        Bytes m = base;
        size_t bit = rng.uniform(m.size() * 8);
        m[bit / 8] ^= uint8_t(1u << (bit % 8));
        try {
            ByteReader r(m);
            RangeProof q = RangeProof::deserialize(r);
            if (range_verify(c, asset, q)) ++survived;
        } catch (const std::exception&) {
        }
    }
    note = std::to_string(accepted) + " balanced / " + std::to_string(rejected) +
           " unbalanced agreed; " + std::to_string(mutations - survived) + "/" +
           std::to_string(mutations) + " mutations rejected";
    return survived == 0;
}

bool c7_pegout_authorization(std::string& note) {
    DetRng rng(707);
    std::vector<Keypair> online, offline;
    std::vector<GroupElement> all_p, all_q;
    for (int i = 0; i < 11; ++i) {
        online.push_back(Keypair::generate(rng));
        offline.push_back(Keypair::generate(rng));
        all_p.push_back(online.back().pub);
        all_q.push_back(offline.back().pub);
    }
    Keypair dest = Keypair::generate(rng);
    for (size_t i = 0; i < 11; ++i) {
        AuthorizationProof proof =
            authorize_key(i, online[i].secret, dest.secret + offline[i].secret,
                          dest.pub, all_p, all_q);
        if (!authorize_verify(proof, all_p, all_q)) {
            note = "round-trip failed for participant " + std::to_string(i);
            return false;
        }
    }

    // a compromised minority (k-1 of the 8-of-11 watchmen) cannot steal
    Scenario minority = bundled_scenario("confiscation");
    minority.faults[0].ids = {0, 1, 2, 3, 4, 5, 6};  // one short of the threshold
    SimResult weak = sim_run(minority);
    if (weak.metrics.confiscation_succeeded || weak.metrics.final_delta != 0 ||
        !weak.metrics.audit_all_zero) {
        note = "a sub-threshold coalition moved locked value";
        return false;
    }

    // garbage key: provable destination nobody can spend
    Scalar t = Scalar::random(rng);
    GroupElement w = GroupElement::base_mul(t) - all_q[3];
    AuthorizationProof garbage = authorize_key(3, online[3].secret, t, w, all_p, all_q);
    Bytes msg{'s', 'p', 'e', 'n', 'd'};
    bool unspendable = !schnorr_verify(w, msg, schnorr_sign(t, msg)) &&
                       !schnorr_verify(w, msg, schnorr_sign(online[3].secret, msg)) &&
                       !schnorr_verify(w, msg, schnorr_sign(offline[3].secret, msg));
    note = "11 round-trips, sub-threshold theft refused, garbage key inert";
    return authorize_verify(garbage, all_p, all_q) && unspendable;
}

bool c8_censorship_detection(std::string& note) {
    Scenario base = bundled_scenario("censorship");
    int flagged = 0;
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        Scenario s = base;
        s.seed = seed;
        SimResult r = sim_run(s);
        const auto& f = r.metrics.censorship_flags;
        if (std::find(f.begin(), f.end(), 0u) != f.end()) ++flagged;
    }

    // control: uniform 5% proposal failure must not look like censorship
    int clean = 0;
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        DetRng rng(seed);
        std::vector<RoundRecord> history;
        for (int round = 0; round < 200; ++round) {
            RoundRecord rec;
            rec.proposer = uint32_t(round % 5);
            rec.success = rng.uniform(100) >= 5;
            history.push_back(rec);
        }
        if (censorship_monitor(history, 10).empty()) ++clean;
    }
    note = "victim flagged in " + std::to_string(flagged) +
           "/100 runs; control clean in " + std::to_string(clean) + "/100";
    return flagged >= 95 && clean >= 95;
}

bool c9_fork_halt(std::string& note) {
    SimResult r = sim_run(robustness_cell(5, 8, 2, 1000));
    if (r.fork_proofs.empty()) {
        note = "equivocation produced no fork proof";
        return false;
    }
    Scenario sc = Scenario::from_json(r.scenario_json);
    double fork_time = -1;
    std::map<uint32_t, double> halts;
    for (const TraceEvent& ev : r.trace) {
        if (ev.kind == "fork_proof" && fork_time < 0) fork_time = ev.time;
        if (ev.kind == "halt") {
            uint32_t id = ev.payload.at("id").get<uint32_t>();
            if (!halts.count(id)) halts[id] = ev.time;
        }
    }
    if (fork_time < 0) {
        note = "fork proof missing from the trace";
        return false;
    }
    for (uint32_t id = 2; id < 8; ++id) {  // signers 0,1 are the equivocators
        auto it = halts.find(id);
        if (it == halts.end() || it->second > fork_time + sc.delay_max + 1e-9) {
            note = "signer " + std::to_string(id) +
                   " did not halt within one max delay of the fork proof";
            return false;
        }
    }

    std::string forked = write_trace_file(r, "/tmp/fedsim_accept_fork.jsonl");
    int rc_fork = run_cli("verify '" + forked + "' --quiet");
    std::string honest = write_trace_file(bundled_run("liquid-default"),
                                          "/tmp/fedsim_accept_honest.jsonl");
    int rc_honest = run_cli("verify '" + honest + "' --quiet");
    note = "all honest signers halted; verifier exit " + std::to_string(rc_fork) +
           " on forked trace, " + std::to_string(rc_honest) + " on honest trace";
    return rc_fork == 3 && rc_honest == 0;
}

bool c10_confiscation_and_backup(std::string& note) {
    const SimResult& theft = bundled_run("confiscation");  // full 8-of-11 quorum
    if (!theft.metrics.confiscation_succeeded || theft.metrics.final_delta >= 0) {
        note = "a full colluding quorum failed to drain the peg";
        return false;
    }
    Scenario minority = bundled_scenario("confiscation");
    minority.faults[0].ids = {0, 1, 2, 3, 4, 5, 6};
    SimResult weak = sim_run(minority);
    if (weak.metrics.confiscation_succeeded || weak.metrics.final_delta != 0) {
        note = "k-1 colluders moved locked value";
        return false;
    }

    Scenario bw_sc = bundled_scenario("backup-withdrawal");
    const SimResult& bw = bundled_run("backup-withdrawal");
    double t_lock = bw_sc.watchmen.backup_timelock;
    if (bw.metrics.backup_recovered == 0 || bw.metrics.backup_time < t_lock) {
        note = "backup recovery missing or earlier than the timelock";
        return false;
    }

    // the builder itself refuses to act before T
    DetRng rng(1010);
    PegParams params;
    std::vector<Keypair> backup;
    for (int i = 0; i < 2; ++i) {
        backup.push_back(Keypair::generate(rng));
        params.backup_keys.push_back(backup.back().pub);
    }
    params.backup_quorum = 2;
    params.backup_timelock = 2400;
    Keypair watch = Keypair::generate(rng);
    params.watchman_keys = {watch.pub};
    params.watchman_threshold = 1;
    ChainState main;
    Digest32 fake{};
    main.utxos[{fake, 0}] =
        TxOutput{hash32("accept", Bytes{'l'}), uint64_t{100},
                 peg_lock_condition(params)};
    std::vector<uint32_t> both{0, 1};
    bool early = backup_withdrawal(main, params, backup, both, 2399).has_value();
    bool on_time = backup_withdrawal(main, params, backup, both, 2400).has_value();
    std::ostringstream os;
    os << "theft delta " << theft.metrics.final_delta << "; backup recovered "
       << bw.metrics.backup_recovered << " at t=" << bw.metrics.backup_time;
    note = os.str();
    return !early && on_time;
}

bool c11_upgrade_protocol(std::string& note) {
    DetRng rng(1111);
    Keypair usp = Keypair::generate(rng);
    std::vector<Keypair> fns;
    std::vector<GroupElement> fn_keys;
    for (int i = 0; i < 11; ++i) {
        fns.push_back(Keypair::generate(rng));
        fn_keys.push_back(fns.back().pub);
    }
    Digest32 image = hash32("accept", Bytes{'u'});
    std::vector<uint32_t> eight{0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<uint32_t> seven{0, 1, 2, 3, 4, 5, 6};
    UpgradePackage full = upgrade_build(9, image, usp, fns, eight);
    UpgradePackage thin = upgrade_build(9, image, usp, fns, seven);
    if (upgrade_apply(full, usp.pub, fn_keys, 8) != UpgradeOutcome::accepted ||
        upgrade_apply(thin, usp.pub, fn_keys, 8) != UpgradeOutcome::rejected_quorum) {
        note = "static package check failed";
        return false;
    }

    // honest nodes adopt the full package and ignore the thin one
    FederationParams params;
    params.n = 11;
    params.k = 8;
    params.precommit_threshold = 8;
    params.supermajority = 8;
    params.usp_key = usp.pub;
    params.validate();
    ChainRules rules;
    rules.sidechain = true;
    rules.stamp_threshold = 8;
    rules.blocksigner_keys = fn_keys;
    std::vector<ConsensusNode> nodes;
    for (uint32_t i = 0; i < 11; ++i)
        nodes.emplace_back(i, params, fns[i], rules, Behavior{});
    for (auto& nd : nodes) (void)nd.step(MsgUpgrade{thin}, 0);
    for (auto& nd : nodes)
        if (nd.version() == 9) {
            note = "a node adopted a sub-supermajority upgrade";
            return false;
        }
    for (auto& nd : nodes) (void)nd.step(MsgUpgrade{full}, 0);
    for (auto& nd : nodes)
        if (nd.version() != 9) {
            note = "a node ignored a valid supermajority upgrade";
            return false;
        }
    note = "8 of 11 signatures adopt everywhere; 7 never do";
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-fedsim-cli>\n";
        return 2;
    }
    g_cli = argv[1];

    criterion(1, "robustness boundary: forks appear exactly beyond 2k-n-1",
              c1_robustness_boundary);
    criterion(2, "liveness boundary: n-k crashes tolerated, n-k+1 stalls",
              c2_liveness_boundary);
    criterion(3, "no reorgs on the federated chain; orphans on the work chain",
              c3_no_reorg);
    criterion(4, "1-conf latency advantage is ~10x over a shared workload",
              c4_latency_ratio);
    criterion(5, "peg audit delta stays zero across a 500+ operation workload",
              c5_peg_conservation);
    criterion(6, "confidential balance agrees with the plaintext oracle",
              c6_ct_oracle);
    criterion(7, "peg-out authorization: round-trips, minority theft refused",
              c7_pegout_authorization);
    criterion(8, "censorship monitor: sensitive to censors, blind to bad luck",
              c8_censorship_detection);
    criterion(9, "every honest signer halts on a fork proof; verifier flags it",
              c9_fork_halt);
    criterion(10, "confiscation needs a full quorum; backup waits for its timelock",
              c10_confiscation_and_backup);
    criterion(11, "upgrades apply at the supermajority, never one below",
              c11_upgrade_protocol);

    if (g_failures) std::cout << g_failures << " criteria failed\n";
    else std::cout << "all 11 criteria satisfied\n";
    return g_failures == 0 ? 0 : 1;
}
