#include "fedsim/scenario.hpp"

#include <fstream>
#include <set>

namespace fedsim {

using nlohmann::json;

const char* fault_kind_name(FaultEvent::Kind k) {
    switch (k) {
        case FaultEvent::Kind::crash: return "crash";
        case FaultEvent::Kind::recover: return "recover";
        case FaultEvent::Kind::equivocate: return "equivocate";
        case FaultEvent::Kind::censor: return "censor";
        case FaultEvent::Kind::withhold: return "withhold";
        case FaultEvent::Kind::partition: return "partition";
        case FaultEvent::Kind::compromise_keys: return "compromise_keys";
        case FaultEvent::Kind::tamper_alarm: return "tamper_alarm";
    }
    return "?";
}

namespace {

FaultEvent::Kind fault_kind_from(const std::string& s) {
    for (int i = 0; i <= int(FaultEvent::Kind::tamper_alarm); ++i)
        if (s == fault_kind_name(FaultEvent::Kind(i))) return FaultEvent::Kind(i);
    throw ScenarioError("unknown fault kind: " + s);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* ctx) {
    if (!j.is_object()) throw ScenarioError(std::string(ctx) + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ScenarioError(std::string(ctx) + ": unknown key '" + key + "'");
    }
}

template <typename T>
void get_opt(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

template <typename T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <typename T>
void get_optional(const json& j, const char* key, std::optional<T>& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

json faults_to_json(const std::vector<FaultEvent>& faults) {
    json arr = json::array();
    for (const auto& f : faults) {
        json o{{"kind", fault_kind_name(f.kind)}, {"time", f.time}};
        if (!f.ids.empty()) o["ids"] = f.ids;
        if (!f.groups.empty()) o["groups"] = f.groups;
        if (f.duration != 0) o["duration"] = f.duration;
        arr.push_back(std::move(o));
    }
    return arr;
}

std::vector<FaultEvent> faults_from_json(const json& arr) {
    std::vector<FaultEvent> out;
    for (const auto& o : arr) {
        check_keys(o, {"kind", "time", "ids", "groups", "duration"}, "fault");
        FaultEvent f;
        f.kind = fault_kind_from(o.at("kind").get<std::string>());
        f.time = o.at("time").get<double>();
        get_opt(o, "ids", f.ids);
        get_opt(o, "groups", f.groups);
        get_opt(o, "duration", f.duration);
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

void Scenario::validate() const {
    auto fail = [](const std::string& m) { throw ScenarioError(m); };
    if (n < 1) fail("federation size n must be >= 1");
    if (k < 1 || k > n) fail("signing threshold violates 1 <= k <= n");
    if (precommit_threshold < k || precommit_threshold > n)
        fail("precommit threshold violates k <= X <= n");
    if (supermajority > n) fail("supermajority exceeds n");
    if (block_interval < 0 || proposal_timeout <= 0)
        fail("intervals must be non-negative and timeout positive");
    if (duration < 0) fail("duration must be non-negative");
    if (delay_min < 0 || delay_max < delay_min)
        fail("need 0 <= delay_min <= delay_max");
    if (mainchain.miners < 1) fail("need at least one miner");
    if (mainchain.mean_interval <= 0) fail("main-chain mean interval must be positive");
    if (watchmen.count < 1) fail("need at least one watchman");
    if (watchmen.threshold < 1 || watchmen.threshold > watchmen.count)
        fail("watchman threshold violates 1 <= k_w <= n_w");
    if (watchmen.backup_quorum > watchmen.backup_size)
        fail("backup quorum exceeds backup set size");
    if (workload.tx_interval < 0 || workload.pegin_interval < 0 ||
        workload.pegout_interval < 0 || workload.marked_tx_interval < 0)
        fail("workload intervals must be non-negative");
    if (workload.censor_victim >= int32_t(n)) fail("censor victim id out of range");

    for (const auto& f : faults) {
        if (f.time < 0 || f.time > duration) fail("fault time outside [0, duration]");
        uint32_t population =
            f.kind == FaultEvent::Kind::compromise_keys ? watchmen.count : n;
        for (uint32_t id : f.ids)
            if (id >= population)
                fail(std::string(fault_kind_name(f.kind)) + ": id out of range");
        if (f.kind == FaultEvent::Kind::partition) {
            if (f.duration < 0) fail("partition duration must be non-negative");
            std::set<uint32_t> seen;
            for (const auto& g : f.groups)
                for (uint32_t id : g) {
                    if (id >= n) fail("partition: id out of range");
                    if (!seen.insert(id).second) fail("partition: overlapping groups");
                }
        }
    }
}

json Scenario::to_json() const {
    json j;
    j["schema"] = "fedsim-scenario";
    j["schema_version"] = schema_version;
    j["name"] = name;
    j["description"] = description;
    j["federation"] = {{"n", n},
                       {"k", k},
                       {"precommit_threshold", precommit_threshold},
                       {"block_interval", block_interval},
                       {"proposal_timeout", proposal_timeout},
                       {"supermajority", supermajority}};
    j["mainchain"] = {{"mean_interval", mainchain.mean_interval},
                      {"miners", mainchain.miners},
                      {"confirm_depth", mainchain.confirm_depth},
                      {"miner_delay", mainchain.miner_delay}};
    j["watchmen"] = {{"count", watchmen.count},
                     {"threshold", watchmen.threshold},
                     {"backup_size", watchmen.backup_size},
                     {"backup_quorum", watchmen.backup_quorum},
                     {"backup_timelock", watchmen.backup_timelock},
                     {"wake_interval", watchmen.wake_interval},
                     {"wake_duration", watchmen.wake_duration},
                     {"pegout_depth", watchmen.pegout_depth}};
    j["workload"] = {{"tx_interval", workload.tx_interval},
                     {"pegin_interval", workload.pegin_interval},
                     {"pegout_interval", workload.pegout_interval},
                     {"issuance_events", workload.issuance_events},
                     {"swap_events", workload.swap_events},
                     {"confidential", workload.confidential},
                     {"censor_victim", workload.censor_victim},
                     {"marked_tx_interval", workload.marked_tx_interval}};
    j["faults"] = faults_to_json(faults);
    j["duration"] = duration;
    j["max_height"] = max_height;
    j["seed"] = seed;
    j["delay_min"] = delay_min;
    j["delay_max"] = delay_max;
    json e = json::object();
    put_opt(e, "min_blocks", expect.min_blocks);
    put_opt(e, "max_blocks", expect.max_blocks);
    put_opt(e, "fork_proofs", expect.fork_proofs);
    put_opt(e, "audit_delta_zero", expect.audit_delta_zero);
    put_opt(e, "censorship_flagged", expect.censorship_flagged);
    put_opt(e, "no_censorship_flags", expect.no_censorship_flags);
    j["expect"] = std::move(e);
    return j;
}

Scenario Scenario::from_json(const json& j) {
    check_keys(j,
               {"schema", "schema_version", "name", "description", "federation",
                "mainchain", "watchmen", "workload", "faults", "duration",
                "max_height", "seed", "delay_min", "delay_max", "expect"},
               "scenario");
    Scenario s;
    if (auto it = j.find("schema"); it != j.end() && *it != "fedsim-scenario")
        throw ScenarioError("not a scenario document");
    get_opt(j, "schema_version", s.schema_version);
    if (s.schema_version != 1) throw ScenarioError("unsupported schema version");
    get_opt(j, "name", s.name);
    get_opt(j, "description", s.description);
    if (auto it = j.find("federation"); it != j.end()) {
        check_keys(*it,
                   {"n", "k", "precommit_threshold", "block_interval",
                    "proposal_timeout", "supermajority"},
                   "federation");
        get_opt(*it, "n", s.n);
        get_opt(*it, "k", s.k);
        get_opt(*it, "precommit_threshold", s.precommit_threshold);
        get_opt(*it, "block_interval", s.block_interval);
        get_opt(*it, "proposal_timeout", s.proposal_timeout);
        get_opt(*it, "supermajority", s.supermajority);
    }
    if (auto it = j.find("mainchain"); it != j.end()) {
        check_keys(*it, {"mean_interval", "miners", "confirm_depth", "miner_delay"},
                   "mainchain");
        get_opt(*it, "mean_interval", s.mainchain.mean_interval);
        get_opt(*it, "miners", s.mainchain.miners);
        get_opt(*it, "confirm_depth", s.mainchain.confirm_depth);
        get_opt(*it, "miner_delay", s.mainchain.miner_delay);
    }
    if (auto it = j.find("watchmen"); it != j.end()) {
        check_keys(*it,
                   {"count", "threshold", "backup_size", "backup_quorum",
                    "backup_timelock", "wake_interval", "wake_duration",
                    "pegout_depth"},
                   "watchmen");
        get_opt(*it, "count", s.watchmen.count);
        get_opt(*it, "threshold", s.watchmen.threshold);
        get_opt(*it, "backup_size", s.watchmen.backup_size);
        get_opt(*it, "backup_quorum", s.watchmen.backup_quorum);
        get_opt(*it, "backup_timelock", s.watchmen.backup_timelock);
        get_opt(*it, "wake_interval", s.watchmen.wake_interval);
        get_opt(*it, "wake_duration", s.watchmen.wake_duration);
        get_opt(*it, "pegout_depth", s.watchmen.pegout_depth);
    }
    if (auto it = j.find("workload"); it != j.end()) {
        check_keys(*it,
                   {"tx_interval", "pegin_interval", "pegout_interval",
                    "issuance_events", "swap_events", "confidential",
                    "censor_victim", "marked_tx_interval"},
                   "workload");
        get_opt(*it, "tx_interval", s.workload.tx_interval);
        get_opt(*it, "pegin_interval", s.workload.pegin_interval);
        get_opt(*it, "pegout_interval", s.workload.pegout_interval);
        get_opt(*it, "issuance_events", s.workload.issuance_events);
        get_opt(*it, "swap_events", s.workload.swap_events);
        get_opt(*it, "confidential", s.workload.confidential);
        get_opt(*it, "censor_victim", s.workload.censor_victim);
        get_opt(*it, "marked_tx_interval", s.workload.marked_tx_interval);
    }
    if (auto it = j.find("faults"); it != j.end())
        s.faults = faults_from_json(*it);
    get_opt(j, "duration", s.duration);
    get_opt(j, "max_height", s.max_height);
    get_opt(j, "seed", s.seed);
    get_opt(j, "delay_min", s.delay_min);
    get_opt(j, "delay_max", s.delay_max);
    if (auto it = j.find("expect"); it != j.end()) {
        check_keys(*it,
                   {"min_blocks", "max_blocks", "fork_proofs", "audit_delta_zero",
                    "censorship_flagged", "no_censorship_flags"},
                   "expect");
        get_optional(*it, "min_blocks", s.expect.min_blocks);
        get_optional(*it, "max_blocks", s.expect.max_blocks);
        get_optional(*it, "fork_proofs", s.expect.fork_proofs);
        get_optional(*it, "audit_delta_zero", s.expect.audit_delta_zero);
        get_optional(*it, "censorship_flagged", s.expect.censorship_flagged);
        get_optional(*it, "no_censorship_flags", s.expect.no_censorship_flags);
    }
    s.validate();
    return s;
}

Scenario Scenario::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario parse error: ") + e.what());
    }
    return from_json(j);
}

// ---- bundled scenarios ----------------------------------------------------

namespace {

Scenario liquid_default() {
    Scenario s;
    s.name = "liquid-default";
    s.description =
        "11 signers, 8-of-8 precommit/sign thresholds, one-minute blocks, "
        "honest run with a mixed transfer/peg workload over one hour";
    s.workload.tx_interval = 45;
    s.workload.pegin_interval = 240;
    s.workload.pegout_interval = 480;
    s.workload.issuance_events = 1;
    s.workload.swap_events = 1;
    s.workload.confidential = true;
    s.expect.min_blocks = 59;
    s.expect.max_blocks = 60;
    s.expect.fork_proofs = 0;
    s.expect.audit_delta_zero = true;
    return s;
}

Scenario robustness(uint32_t k, uint32_t n, uint32_t equivocators,
                    const std::string& name) {
    Scenario s;
    s.name = name;
    s.description = "equivocator count at the Byzantine-robustness bound: "
                    "blocks keep flowing and no fork proof ever appears";
    s.n = n;
    s.k = k;
    s.precommit_threshold = k;
    s.block_interval = 0;  // as fast as consensus allows
    s.duration = 4000;
    s.max_height = 1000;
    FaultEvent f;
    f.kind = FaultEvent::Kind::equivocate;
    f.time = 0;
    for (uint32_t i = 0; i < equivocators; ++i) f.ids.push_back(i);
    if (equivocators > 0) s.faults.push_back(std::move(f));
    s.expect.fork_proofs = 0;
    s.expect.min_blocks = 1000;
    return s;
}

Scenario stall_boundary() {
    Scenario s;
    s.name = "stall-boundary";
    s.description =
        "liquid parameters with n-k+1 signers crashed from the start: "
        "availability is lost for the whole run while safety holds";
    FaultEvent f;
    f.kind = FaultEvent::Kind::crash;
    f.time = 0;
    f.ids = {0, 1, 2, 3};
    s.faults.push_back(std::move(f));
    s.expect.max_blocks = 0;
    s.expect.fork_proofs = 0;
    return s;
}

Scenario censorship() {
    Scenario s;
    s.name = "censorship";
    s.description =
        "two colluding signers veto every block carrying transactions known "
        "only to signer 0; the round monitor flags the victim";
    s.n = 5;
    s.k = 4;
    s.precommit_threshold = 4;
    s.supermajority = 4;
    s.block_interval = 0;
    s.proposal_timeout = 5;
    s.duration = 1200;
    s.max_height = 160;
    s.workload.censor_victim = 0;
    s.workload.marked_tx_interval = 200;
    FaultEvent f;
    f.kind = FaultEvent::Kind::censor;
    f.time = 0;
    f.ids = {1, 2};
    s.faults.push_back(std::move(f));
    s.expect.censorship_flagged = 0;
    s.expect.fork_proofs = 0;
    return s;
}

Scenario confiscation() {
    Scenario s;
    s.name = "confiscation";
    s.description =
        "locked value accumulates, then a colluding watchman quorum drains "
        "the peg: the main chain accepts the theft because authorization "
        "proofs are watchman policy, not a consensus rule";
    s.duration = 3600;
    s.workload.pegin_interval = 200;
    FaultEvent f;
    f.kind = FaultEvent::Kind::compromise_keys;
    f.time = 1800;
    f.ids = {0, 1, 2, 3, 4, 5, 6, 7};
    s.faults.push_back(std::move(f));
    s.expect.fork_proofs = 0;
    return s;
}

Scenario backup_withdrawal_scenario() {
    Scenario s;
    s.name = "backup-withdrawal";
    s.description =
        "value is locked, the whole federation crashes, and the timelocked "
        "backup quorum recovers every locked coin at time T, never earlier";
    s.duration = 3600;
    s.watchmen.backup_timelock = 2400;
    s.workload.pegin_interval = 150;
    FaultEvent f;
    f.kind = FaultEvent::Kind::crash;
    f.time = 1000;
    for (uint32_t i = 0; i < 11; ++i) f.ids.push_back(i);
    s.faults.push_back(std::move(f));
    s.expect.fork_proofs = 0;
    return s;
}

Scenario pegcycle() {
    Scenario s;
    s.name = "pegcycle";
    s.description =
        "steady randomized peg-in/peg-out/transfer/swap workload under "
        "benign faults (a signer crash with recovery, a brief partition); "
        "the peg audit stays balanced at every block";
    s.duration = 7200;
    s.workload.tx_interval = 8;
    s.workload.pegin_interval = 45;
    s.workload.pegout_interval = 150;
    s.workload.issuance_events = 4;
    s.workload.swap_events = 4;
    s.workload.confidential = true;
    FaultEvent crash;
    crash.kind = FaultEvent::Kind::crash;
    crash.time = 1800;
    crash.ids = {3};
    s.faults.push_back(std::move(crash));
    FaultEvent recover;
    recover.kind = FaultEvent::Kind::recover;
    recover.time = 2400;
    recover.ids = {3};
    s.faults.push_back(std::move(recover));
    FaultEvent split;
    split.kind = FaultEvent::Kind::partition;
    split.time = 3600;
    split.duration = 120;
    split.groups = {{0, 1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}};
    s.faults.push_back(std::move(split));
    s.expect.min_blocks = 105;
    s.expect.fork_proofs = 0;
    s.expect.audit_delta_zero = true;
    return s;
}

}  // namespace

std::vector<std::string> bundled_scenario_names() {
    return {"liquid-default",  "robustness-5of8", "robustness-6of8",
            "stall-boundary",  "censorship",      "confiscation",
            "backup-withdrawal", "pegcycle"};
}

Scenario bundled_scenario(const std::string& name) {
    Scenario s;
    if (name == "liquid-default") s = liquid_default();
    else if (name == "robustness-5of8") s = robustness(5, 8, 1, name);
    else if (name == "robustness-6of8") s = robustness(6, 8, 3, name);
    else if (name == "stall-boundary") s = stall_boundary();
    else if (name == "censorship") s = censorship();
    else if (name == "confiscation") s = confiscation();
    else if (name == "backup-withdrawal") s = backup_withdrawal_scenario();
    else if (name == "pegcycle") s = pegcycle();
    else throw ScenarioError("unknown bundled scenario: " + name);
    s.validate();
    return s;
}

}  // namespace fedsim
