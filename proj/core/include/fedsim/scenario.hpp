#pragma once

#include "fedsim/consensus.hpp"

#include <json.hpp>

namespace fedsim {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FaultEvent {
    enum class Kind : uint8_t {
        crash,
        recover,
        equivocate,
        censor,
        withhold,
        partition,
        compromise_keys,
        tamper_alarm,
    };
    Kind kind = Kind::crash;
    double time = 0;                            // simulated seconds
    std::vector<uint32_t> ids;                  // targeted signers/watchmen
    std::vector<std::vector<uint32_t>> groups;  // partition only
    double duration = 0;                        // partition only
};

const char* fault_kind_name(FaultEvent::Kind k);

struct MainchainParams {
    double mean_interval = 600.0;  // exponential block arrivals
    uint32_t miners = 1;
    uint32_t confirm_depth = 2;  // D, confirmations before a lock matures
    double miner_delay = 10.0;   // block propagation between miners
};

struct WatchmanParams {
    uint32_t count = 11;
    uint32_t threshold = 8;
    uint32_t backup_size = 5;
    uint32_t backup_quorum = 3;
    double backup_timelock = 0;  // T; 0 disables the backup clause window
    double wake_interval = 0;    // 0 = always online
    double wake_duration = 0;
    uint32_t pegout_depth = 1;
};

struct WorkloadParams {
    double tx_interval = 0;      // plain sidechain transfers; 0 = none
    double pegin_interval = 0;
    double pegout_interval = 0;
    uint32_t issuance_events = 0;
    uint32_t swap_events = 0;
    bool confidential = false;
    /// Censorship experiment: marked transactions are submitted only to this
    /// signer, and censor-behavior nodes veto exactly those transactions.
    int32_t censor_victim = -1;
    double marked_tx_interval = 0;
};

/// Scenario expectations; violated expectations make the CLI exit 3.
struct Expectations {
    std::optional<uint64_t> min_blocks;
    std::optional<uint64_t> max_blocks;
    std::optional<uint64_t> fork_proofs;  // exact count
    std::optional<bool> audit_delta_zero;
    std::optional<uint32_t> censorship_flagged;  // this signer must be flagged
    std::optional<bool> no_censorship_flags;
};

struct Scenario {
    std::string name;
    std::string description;
    uint32_t schema_version = 1;

    // federation (keys are derived from the seed at run time)
    uint32_t n = 11;
    uint32_t k = 8;
    uint32_t precommit_threshold = 8;
    double block_interval = 60.0;
    double proposal_timeout = 5.0;
    uint32_t supermajority = 8;

    MainchainParams mainchain;
    WatchmanParams watchmen;
    WorkloadParams workload;
    std::vector<FaultEvent> faults;

    double duration = 3600.0;
    /// Stop once the canonical sidechain reaches this height (0 = run to
    /// duration); used with block_interval = 0 for as-fast-as-consensus runs.
    uint64_t max_height = 0;
    uint64_t seed = 1;
    double delay_min = 0.05;
    double delay_max = 0.15;

    Expectations expect;

    /// Throws ScenarioError naming the violated invariant.
    void validate() const;

    nlohmann::json to_json() const;
    /// Strict parse: unknown keys are rejected, then validate() runs.
    static Scenario from_json(const nlohmann::json& j);
    static Scenario load_file(const std::string& path);
};

std::vector<std::string> bundled_scenario_names();
/// Throws ScenarioError for unknown names.
Scenario bundled_scenario(const std::string& name);

}  // namespace fedsim
