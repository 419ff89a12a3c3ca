// fedsim: federated-sidechain simulator command-line front end.
//
// Exit codes are a stable contract: 0 success, 2 input/validation error,
// 3 expectation or verification failure.

#include "fedsim/pegaudit.hpp"
#include "fedsim/sim.hpp"
#include "fedsim/watchman.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace fedsim;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitExpectation = 3;

Scenario load_scenario_arg(const std::string& arg) {
    if (std::filesystem::exists(arg)) return Scenario::load_file(arg);
    return bundled_scenario(arg);
}

std::vector<std::string> failed_expectations(const Scenario& sc, const Metrics& m) {
    std::vector<std::string> fails;
    const Expectations& e = sc.expect;
    auto fail = [&](const std::string& msg) { fails.push_back(msg); };
    if (e.min_blocks && m.blocks < *e.min_blocks)
        fail("blocks " + std::to_string(m.blocks) + " < expected minimum " +
             std::to_string(*e.min_blocks));
    if (e.max_blocks && m.blocks > *e.max_blocks)
        fail("blocks " + std::to_string(m.blocks) + " > expected maximum " +
             std::to_string(*e.max_blocks));
    if (e.fork_proofs && m.fork_proofs != *e.fork_proofs)
        fail("fork proofs " + std::to_string(m.fork_proofs) + " != expected " +
             std::to_string(*e.fork_proofs));
    if (e.audit_delta_zero && *e.audit_delta_zero &&
        (!m.audit_all_zero || m.final_delta != 0))
        fail("peg audit delta nonzero (final delta " +
             std::to_string(m.final_delta) + ")");
    if (e.censorship_flagged) {
        bool found = std::find(m.censorship_flags.begin(), m.censorship_flags.end(),
                               *e.censorship_flagged) != m.censorship_flags.end();
        if (!found)
            fail("signer " + std::to_string(*e.censorship_flagged) +
                 " was not flagged for censorship");
    }
    if (e.no_censorship_flags && *e.no_censorship_flags && !m.censorship_flags.empty())
        fail("unexpected censorship flags raised");
    return fails;
}

int cmd_simulate(const std::string& scenario_arg, std::optional<uint64_t> seed,
                 const std::string& out_path, const std::string& trace_path,
                 bool quiet) {
    Scenario sc;
    try {
        sc = load_scenario_arg(scenario_arg);
        if (seed) {
            sc.seed = *seed;
            sc.validate();
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInput;
    }

    SimResult result = sim_run(sc);
    auto fails = failed_expectations(sc, result.metrics);

    json doc;
    doc["schema"] = "fedsim-report";
    doc["version"] = 1;
    doc["scenario"] = result.scenario_json;
    doc["metrics"] = result.metrics.to_json();
    doc["expectations_met"] = fails.empty();
    doc["expectation_failures"] = fails;

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return kExitInput;
        }
        out << doc.dump(2) << "\n";
    }
    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) {
            std::cerr << "error: cannot write " << trace_path << "\n";
            return kExitInput;
        }
        write_trace(out,
                    trace_header(result.scenario_json, result.blocksigner_keys,
                                 result.stamp_threshold, result.auth_online,
                                 result.auth_offline),
                    result.trace);
    }
    if (!quiet) std::cout << doc.dump(2) << "\n";
    for (const auto& f : fails) std::cerr << "expectation failed: " << f << "\n";
    return fails.empty() ? kExitOk : kExitExpectation;
}

// ---- demo-pegcycle ---------------------------------------------------------

struct DemoStage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int cmd_demo_pegcycle(bool break_auth, bool quiet) {
    auto say = [&](const std::string& line) {
        if (!quiet) std::cout << line << "\n";
    };
    std::string stage = "setup";
    try {
        DetRng rng(42);
        DetRng key_rng = rng.fork("keys");
        DetRng build_rng = rng.fork("builders");

        // 3 blocksigners (2-of-3) and 3 watchmen (2-of-3)
        std::vector<Keypair> signers, watchman_keys, auth_on, auth_off, backup;
        for (int i = 0; i < 3; ++i) {
            signers.push_back(Keypair::generate(key_rng));
            watchman_keys.push_back(Keypair::generate(key_rng));
            auth_on.push_back(Keypair::generate(key_rng));
            auth_off.push_back(Keypair::generate(key_rng));
        }
        backup.push_back(Keypair::generate(key_rng));
        auto pubs = [](const std::vector<Keypair>& ks) {
            std::vector<GroupElement> out;
            for (const auto& k : ks) out.push_back(k.pub);
            return out;
        };

        PegParams peg;
        peg.watchman_keys = pubs(watchman_keys);
        peg.watchman_threshold = 2;
        peg.backup_keys = pubs(backup);
        peg.backup_quorum = 1;
        peg.backup_timelock = 1'000'000'000;  // far future; unused by the demo
        peg.pegin_depth = 2;
        peg.pegout_depth = 1;
        peg.auth_online = pubs(auth_on);
        peg.auth_offline = pubs(auth_off);

        ChainRules main_rules;
        main_rules.sidechain = false;
        ChainRules side_rules;
        side_rules.sidechain = true;
        side_rules.stamp_threshold = 2;
        side_rules.blocksigner_keys = pubs(signers);
        side_rules.auth_online = peg.auth_online;
        side_rules.auth_offline = peg.auth_offline;
        side_rules.pegin_depth = peg.pegin_depth;

        MainchainModel main(main_rules);
        ChainState side;
        std::vector<Block> side_blocks;
        side_rules.parent_view = nullptr;  // set per use below

        SecretsRegistry secrets;
        BuildContext ctx;
        ctx.rng = &build_rng;
        ctx.secrets = &secrets;

        Keypair main_user = Keypair::generate(key_rng);
        Wallet main_wallet(main_user);
        Wallet alice(Keypair::generate(key_rng));
        Wallet bob(Keypair::generate(key_rng));

        auto mine_main = [&](uint64_t t) {
            const Block& b = main.mine(0, t);
            Wallet fresh(main_user);
            for (const auto& blk : main.best_chain()) fresh.scan_block(blk, secrets);
            main_wallet = fresh;
            return b;
        };
        auto make_side_block = [&](std::vector<Transaction> txs, uint64_t t) {
            Block b;
            b.header.height = side.height + 1;
            b.header.prev = side.tip_digest;
            b.header.timestamp = t;
            b.txs = std::move(txs);
            b.header.merkle_root = b.compute_merkle_root();
            Bytes msg = header_signing_message(b.header.digest());
            MultisigStamp stamp;
            for (uint8_t i = 0; i < 2; ++i)
                stamp.signatures.emplace_back(i,
                                              schnorr_sign(signers[i].secret, msg));
            b.header.stamp = stamp;
            ChainState main_view = main.best();
            ChainRules rules = side_rules;
            rules.parent_view = &main_view;
            ApplyResult r = block_apply(side, b, rules);
            if (!r.state)
                throw DemoStage("sidechain block rejected: " + r.result.detail);
            side = std::move(*r.state);
            side_blocks.push_back(b);
            alice.scan_block(b, secrets);
            bob.scan_block(b, secrets);
            return b;
        };

        Transaction funding = build_issuance(
            main_user, Bytes{'c', 'o', 'i', 'n'},
            std::vector<std::pair<GroupElement, uint64_t>>{{main_user.pub, 1000}});
        AssetId main_asset = funding.issued_asset_id(0);
        main.submit(funding);
        mine_main(0);

        stage = "lock";
        say("step 1/6  lock: freezing 5 units on the parent chain under the "
            "federation peg condition");
        Transaction lock =
            pegin_create(main_wallet, main_asset, 5, alice.key.pub, peg, ctx);
        main.submit(lock);
        mine_main(600);
        mine_main(1200);  // reach the 2-confirmation maturity depth
        say("          lock txid " + to_hex(lock.txid()) + ", confirmed at depth 2");

        stage = "mint";
        say("step 2/6  mint: watchmen observe the matured lock and mint 5 pegged "
            "units on the sidechain");
        std::vector<Transaction> mints;
        {
            auto chain = main.best_chain();
            mints = pegin_process(chain, main.best(), side, peg);
        }
        if (mints.size() != 1) throw DemoStage("expected exactly one mint");
        make_side_block(mints, 60);
        say("          alice now holds " +
            std::to_string(alice.balance(pegged_asset_id())) + " pegged units");

        stage = "confidential transfer";
        say("step 3/6  transfer: alice pays bob 3 units confidentially (amounts "
            "hidden in commitments, balance publicly checkable)");
        Transaction pay =
            build_transfer(alice, pegged_asset_id(), 3, bob.key.pub, true, ctx);
        make_side_block({pay}, 120);

        stage = "issuance and swap";
        say("step 4/6  issue + swap: bob issues 100 units of a native asset, then "
            "atomically swaps 10 of them for 1 of alice's pegged units");
        Transaction issue = build_issuance(
            bob.key, Bytes{'d', 'e', 'm', 'o'},
            std::vector<std::pair<GroupElement, uint64_t>>{{bob.key.pub, 100}});
        AssetId native = issue.issued_asset_id(0);
        make_side_block({issue}, 180);
        Transaction swap =
            build_swap(bob, native, 10, alice, pegged_asset_id(), 1, false, ctx);
        make_side_block({swap}, 240);

        stage = "authorization";
        say("step 5/6  peg-out: bob burns 3 pegged units toward a destination key "
            "carrying a federation authorization proof");
        Keypair dest = Keypair::generate(key_rng);
        AuthorizationProof proof;  // --break-auth leaves this empty
        if (!break_auth)
            proof = authorize_key(1, auth_on[1].secret,
                                  dest.secret + auth_off[1].secret, dest.pub,
                                  peg.auth_online, peg.auth_offline);
        Transaction burn = pegout_request(bob, 3, dest.pub, proof, ctx);
        try {
            make_side_block({burn}, 300);
        } catch (const DemoStage& ex) {
            std::cerr << "stage '" << stage
                      << "' refused the peg-out: " << ex.what() << "\n";
            return kExitExpectation;
        }

        stage = "withdrawal";
        say("step 6/6  withdraw: watchmen co-sign the canonical parent-chain "
            "withdrawal paying the authorized destination, change refrozen");
        auto settled = find_settled_pegouts(side_blocks, side, peg.pegout_depth);
        if (settled.size() != 1) throw DemoStage("expected one settled peg-out");
        auto main_chain = main.best_chain();
        auto unsigned_tx =
            build_withdrawal(settled[0], main_chain, main.best(), side, peg);
        if (!unsigned_tx) throw DemoStage("withdrawal could not be built");
        std::vector<std::pair<uint8_t, SchnorrSignature>> shares;
        for (uint32_t i = 0; i < 3 && shares.size() < peg.watchman_threshold; ++i) {
            WatchmanState w;
            w.id = i;
            w.key = watchman_keys[i];
            auto share = watchman_sign_withdrawal(w, *unsigned_tx, settled[0],
                                                  side_blocks, side, main_chain,
                                                  main.best(), peg, 2000);
            if (share) shares.emplace_back(uint8_t(i), *share);
        }
        if (shares.size() < peg.watchman_threshold)
            throw DemoStage("not enough watchman signatures");
        main.submit(assemble_withdrawal(*unsigned_tx, shares));
        mine_main(1800);

        stage = "audit";
        PegAuditReport audit = peg_audit(main.best_chain(), side_blocks, peg);
        say("audit     locked=" + std::to_string(audit.locked) +
            " circulating=" + std::to_string(audit.circulating) +
            " in_flight_in=" + std::to_string(audit.in_flight_in) +
            " in_flight_out=" + std::to_string(audit.in_flight_out) +
            " delta=" + std::to_string(audit.delta));
        if (audit.locked != 2 || audit.circulating != 2 || audit.delta != 0)
            throw DemoStage("final audit mismatch");
        say("done      full peg cycle complete; value conserved");
        return kExitOk;
    } catch (const std::exception& ex) {
        std::cerr << "stage '" << stage << "' failed: " << ex.what() << "\n";
        return kExitExpectation;
    }
}

// ---- verify ----------------------------------------------------------------

int cmd_verify(const std::string& trace_path, bool quiet) {
    ParsedTrace parsed;
    Scenario sc;
    ChainRules side_rules, main_rules;
    try {
        std::ifstream in(trace_path);
        if (!in) throw std::runtime_error("cannot open " + trace_path);
        parsed = read_trace(in);
        sc = Scenario::from_json(parsed.header.at("scenario"));
        auto keys_of = [&](const char* field) {
            std::vector<GroupElement> out;
            for (const auto& hex : parsed.header.at(field)) {
                Bytes b = from_hex(hex.get<std::string>());
                ByteReader r(b);
                out.push_back(GroupElement::deserialize(r));
            }
            return out;
        };
        main_rules.sidechain = false;
        side_rules.sidechain = true;
        side_rules.stamp_threshold = parsed.header.at("stamp_threshold").get<uint32_t>();
        side_rules.blocksigner_keys = keys_of("blocksigner_keys");
        side_rules.auth_online = keys_of("auth_online");
        side_rules.auth_offline = keys_of("auth_offline");
        side_rules.pegin_depth = sc.mainchain.confirm_depth;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInput;
    }

    std::map<std::string, ChainState> main_states;
    ChainState genesis;
    std::string genesis_key = to_hex(genesis.tip_digest);
    main_states.emplace(genesis_key, genesis);
    ChainState main_best = genesis;

    ChainState side;
    std::map<uint64_t, BlockHeader> side_headers;
    uint64_t side_blocks_seen = 0;
    int status = kExitOk;
    auto violation = [&](const std::string& msg) {
        std::cerr << "verification failure: " << msg << "\n";
        if (status == kExitOk) status = kExitExpectation;
    };

    for (const auto& e : parsed.events) {
        if (e.kind != "block") continue;
        Block b;
        try {
            Bytes raw = from_hex(e.payload.at("hex").get<std::string>());
            ByteReader r(raw);
            b = Block::deserialize(r);
        } catch (const std::exception& ex) {
            std::cerr << "error: undecodable block event: " << ex.what() << "\n";
            return kExitInput;
        }
        std::string chain = e.payload.value("chain", "side");
        if (chain == "main") {
            auto parent = main_states.find(to_hex(b.header.prev));
            if (parent == main_states.end()) {
                violation("main block at height " + std::to_string(b.header.height) +
                          " links to an unknown parent");
                continue;
            }
            ApplyResult r = block_apply(parent->second, b, main_rules);
            if (!r.state) {
                violation("main block at height " + std::to_string(b.header.height) +
                          " invalid: " + r.result.detail);
                continue;
            }
            std::string key = to_hex(b.header.digest());
            auto [it, _] = main_states.emplace(key, std::move(*r.state));
            if (it->second.height > main_best.height) main_best = it->second;
        } else {
            ValidationResult sr = stamp_validate(b.header, side_rules);
            if (!sr.ok()) {
                violation("sidechain block at height " +
                          std::to_string(b.header.height) +
                          " has an invalid stamp: " + sr.detail);
                continue;
            }
            auto [it, inserted] = side_headers.emplace(b.header.height, b.header);
            if (!inserted && !(it->second == b.header)) {
                std::array<BlockHeader, 2> pair{it->second, b.header};
                auto fp = detect_equivocation(pair, side_rules);
                violation("two stamped headers at height " +
                          std::to_string(b.header.height) +
                          (fp ? "; ForkProof constructed with " +
                                    std::to_string(fp->overlap.size()) +
                                    " equivocating signer(s)"
                              : ""));
                continue;
            }
            if (b.header.height == side.height + 1 && b.header.prev == side.tip_digest) {
                ChainRules rules = side_rules;
                rules.parent_view = &main_best;
                ApplyResult r = block_apply(side, b, rules);
                if (!r.state) {
                    violation("sidechain block at height " +
                              std::to_string(b.header.height) +
                              " invalid: " + r.result.detail);
                    continue;
                }
                side = std::move(*r.state);
                ++side_blocks_seen;
            }
        }
    }
    if (!quiet)
        std::cout << "verified " << side_blocks_seen << " sidechain blocks and "
                  << main_best.height << " main-chain blocks; "
                  << (status == kExitOk ? "no violations" : "violations found")
                  << "\n";
    return status;
}

// ---- sweep -----------------------------------------------------------------

int cmd_sweep(const std::vector<uint32_t>& ks, uint32_t n,
              const std::vector<uint32_t>& equivocators,
              const std::vector<uint64_t>& seeds, uint64_t rounds,
              const std::string& out_path, bool quiet) {
    if (seeds.empty()) {
        std::cerr << "error: at least one seed is required\n";
        return kExitInput;
    }
    if (ks.empty() || equivocators.empty() || rounds == 0) {
        std::cerr << "error: empty parameter grid\n";
        return kExitInput;
    }
    json rows = json::array();
    std::map<std::pair<uint32_t, uint32_t>, uint64_t> forks_per_cell;
    for (uint32_t k : ks) {
        for (uint32_t e : equivocators) {
            for (uint64_t seed : seeds) {
                Scenario sc;
                sc.name = "sweep";
                sc.description = "robustness sweep cell";
                sc.n = n;
                sc.k = k;
                sc.precommit_threshold = k;
                sc.supermajority = k;
                sc.block_interval = 0;  // as fast as consensus allows
                sc.proposal_timeout = 5;
                sc.max_height = rounds;
                sc.duration = 10.0 * double(rounds) + 100.0;
                sc.seed = seed;
                sc.watchmen.count = 3;
                sc.watchmen.threshold = 2;
                sc.watchmen.backup_size = 1;
                sc.watchmen.backup_quorum = 1;
                sc.mainchain.mean_interval = 600;
                if (e > 0) {
                    FaultEvent f;
                    f.kind = FaultEvent::Kind::equivocate;
                    f.time = 0;
                    for (uint32_t i = 0; i < e && i < n; ++i) f.ids.push_back(i);
                    sc.faults.push_back(f);
                }
                try {
                    sc.validate();
                } catch (const std::exception& ex) {
                    std::cerr << "error: " << ex.what() << "\n";
                    return kExitInput;
                }
                SimResult r = sim_run(sc);
                forks_per_cell[{k, e}] += r.metrics.fork_proofs;
                rows.push_back({{"k", k},
                                {"n", n},
                                {"equivocators", e},
                                {"seed", seed},
                                {"blocks", r.metrics.blocks},
                                {"fork_proofs", r.metrics.fork_proofs}});
                if (!quiet)
                    std::cout << "k=" << k << " n=" << n << " e=" << e
                              << " seed=" << seed
                              << "  blocks=" << r.metrics.blocks
                              << " forks=" << r.metrics.fork_proofs << "\n";
            }
        }
    }
    json doc;
    doc["schema"] = "fedsim-sweep";
    doc["version"] = 1;
    doc["rounds"] = rounds;
    doc["rows"] = rows;
    json boundary = json::array();
    for (uint32_t k : ks) {
        int first_fork = -1;
        for (uint32_t e : equivocators)
            if (forks_per_cell[{k, e}] > 0) {
                first_fork = int(e);
                break;
            }
        boundary.push_back(
            {{"k", k}, {"n", n}, {"first_fork_at_equivocators", first_fork}});
        if (!quiet)
            std::cout << "k=" << k << " n=" << n << ": forks first appear at e="
                      << first_fork << " (tolerance bound " << fork_robustness(k, n)
                      << ")\n";
    }
    doc["boundary"] = boundary;
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return kExitInput;
        }
        out << doc.dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"federated sidechain simulator"};
    app.require_subcommand(1);

    // simulate
    std::string scenario_arg, out_path, trace_path;
    std::optional<uint64_t> seed;
    bool quiet = false;
    auto* sim = app.add_subcommand(
        "simulate", "run a scenario (bundled name or file path) and report metrics");
    sim->add_option("scenario", scenario_arg,
                    "bundled scenario name or scenario file path")
        ->required();
    sim->add_option("--seed", seed, "override the scenario seed");
    sim->add_option("--out", out_path, "write the metrics report to this file");
    sim->add_option("--trace", trace_path, "write the event trace (JSONL) here");
    sim->add_flag("--quiet", quiet, "suppress stdout report");

    // demo-pegcycle
    bool break_auth = false, demo_quiet = false;
    auto* demo = app.add_subcommand("demo-pegcycle",
                                    "scripted end-to-end two-way peg walkthrough");
    demo->add_flag("--break-auth", break_auth,
                   "omit the authorization proof (peg-out must be refused)");
    demo->add_flag("--quiet", demo_quiet, "suppress the narrative log");

    // verify
    std::string verify_path;
    bool verify_quiet = false;
    auto* ver = app.add_subcommand("verify",
                                   "independently re-validate a simulation trace");
    ver->add_option("trace", verify_path, "trace file produced by simulate --trace")
        ->required();
    ver->add_flag("--quiet", verify_quiet, "suppress the summary line");

    // sweep
    std::vector<uint32_t> ks{5, 6};
    uint32_t sweep_n = 8;
    std::vector<uint32_t> eqs{0, 1, 2, 3, 4};
    std::vector<uint64_t> seeds{1};
    uint64_t rounds = 200;
    std::string sweep_out;
    bool sweep_quiet = false;
    auto* sw = app.add_subcommand("sweep",
                                  "fork-robustness boundary sweep over (k, e, seed)");
    sw->add_option("--k", ks, "signing thresholds to sweep");
    sw->add_option("--n", sweep_n, "federation size");
    sw->add_option("--equivocators", eqs, "equivocator counts to sweep");
    sw->add_option("--seeds", seeds, "seeds per cell (at least one required)")
        ->expected(0, -1);
    sw->add_option("--rounds", rounds, "block heights per cell run");
    sw->add_option("--out", sweep_out, "write the aggregated report to this file");
    sw->add_flag("--quiet", sweep_quiet, "suppress the table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(scenario_arg, seed, out_path, trace_path, quiet);
        if (demo->parsed()) return cmd_demo_pegcycle(break_auth, demo_quiet);
        if (ver->parsed()) return cmd_verify(verify_path, verify_quiet);
        if (sw->parsed())
            return cmd_sweep(ks, sweep_n, eqs, seeds, rounds, sweep_out, sweep_quiet);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
