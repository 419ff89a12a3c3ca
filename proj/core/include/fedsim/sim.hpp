#pragma once

#include "fedsim/censorship.hpp"
#include "fedsim/mainchain.hpp"
#include "fedsim/scenario.hpp"
#include "fedsim/trace.hpp"

namespace fedsim {

struct SimResult {
    Metrics metrics;
    std::vector<TraceEvent> trace;
    std::vector<Block> side_blocks;  // canonical accepted sidechain
    std::vector<Block> main_blocks;  // longest main chain
    std::vector<ForkProof> fork_proofs;
    std::vector<RoundRecord> round_history;
    PegAuditReport final_audit;
    nlohmann::json scenario_json;  // fully resolved scenario
    std::vector<GroupElement> blocksigner_keys;
    uint32_t stamp_threshold = 0;
    std::vector<GroupElement> auth_online;   // peg-out authorization key sets,
    std::vector<GroupElement> auth_offline;  // needed to re-verify the trace
};

/// Runs the scenario on a single-threaded discrete-event loop. Bit-identical
/// output for identical scenarios (the virtual clock is the only time
/// source). Throws ScenarioError before any event executes when the
/// scenario is malformed.
SimResult sim_run(const Scenario& scenario);

struct LatencyComparison {
    double side_mean = 0;  // deterministic-interval chain, 1-conf
    double main_mean = 0;  // exponential-interval chain, `confirmations`-conf
    double ratio = 0;      // main_mean / side_mean
    uint32_t confirmations = 1;
    uint64_t samples = 0;
};

/// Confirmation-latency comparison over a shared workload seed: every
/// transaction is submitted just after a sidechain block boundary (the
/// worst case for the deterministic chain; the memoryless main chain does
/// not care). `main_deterministic` swaps the exponential arrivals for fixed
/// intervals, for calibration.
LatencyComparison latency_compare(uint64_t seed, uint64_t tx_count,
                                  double side_interval, double main_mean,
                                  uint32_t confirmations,
                                  bool main_deterministic = false);

}  // namespace fedsim
