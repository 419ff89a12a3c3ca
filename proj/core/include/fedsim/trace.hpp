#pragma once

#include "fedsim/pegaudit.hpp"

#include <json.hpp>

#include <iosfwd>

namespace fedsim {

/// One line of the run trace. Serialized as JSONL with a digest over the
/// payload so external tools can spot tampering cheaply.
struct TraceEvent {
    double time = 0;
    std::string actor;
    std::string kind;
    nlohmann::json payload;
};

/// First line of every trace file: format marker plus the fully resolved
/// scenario and the public key material needed for independent
/// re-verification.
nlohmann::json trace_header(const nlohmann::json& scenario,
                            const std::vector<GroupElement>& blocksigner_keys,
                            uint32_t stamp_threshold,
                            const std::vector<GroupElement>& auth_online = {},
                            const std::vector<GroupElement>& auth_offline = {});

void write_trace(std::ostream& out, const nlohmann::json& header,
                 std::span<const TraceEvent> events);

struct ParsedTrace {
    nlohmann::json header;
    std::vector<TraceEvent> events;
};
/// Throws std::runtime_error on malformed lines or payload digest mismatch.
ParsedTrace read_trace(std::istream& in);

struct AuditSample {
    double time = 0;
    PegAuditReport report;
};

struct Metrics {
    uint64_t blocks = 0;        // canonical sidechain height reached
    uint64_t main_blocks = 0;   // best main-chain height
    uint64_t main_orphans = 0;
    uint64_t tx_submitted = 0;
    uint64_t tx_confirmed = 0;
    double latency_mean = 0;
    double latency_p50 = 0;
    double latency_p90 = 0;
    std::vector<std::pair<double, double>> stall_intervals;
    uint64_t fork_proofs = 0;
    /// Sidechain heights where more than one stamped header was accepted.
    uint64_t duplicate_heights = 0;
    std::vector<uint32_t> censorship_flags;
    std::vector<AuditSample> peg_audit_series;
    bool audit_all_zero = true;  // delta == 0 at every sampled point
    int64_t final_delta = 0;
    uint64_t peg_ops = 0;  // peg-ins + peg-outs confirmed
    std::map<std::string, uint64_t> message_counts;
    bool confiscation_succeeded = false;
    uint64_t backup_recovered = 0;  // value moved to backup control
    double backup_time = -1;        // when that happened (-1 = never)
    std::vector<uint64_t> node_versions;  // post-run software version per signer

    nlohmann::json to_json() const;
};

/// Percentile over an unsorted sample set (nearest-rank); 0 when empty.
double percentile(std::vector<double> values, double p);

}  // namespace fedsim
