#include "fedsim/trace.hpp"

#include "fedsim/hash.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace fedsim {

using nlohmann::json;

namespace {

std::string payload_digest(const json& payload) {
    std::string dump = payload.dump();
    return to_hex(hash32("fedsim/trace-payload",
                         {reinterpret_cast<const uint8_t*>(dump.data()), dump.size()}));
}

}  // namespace

json trace_header(const json& scenario, const std::vector<GroupElement>& keys,
                  uint32_t stamp_threshold, const std::vector<GroupElement>& auth_online,
                  const std::vector<GroupElement>& auth_offline) {
    json header;
    header["schema"] = "fedsim-trace";
    header["version"] = 1;
    header["scenario"] = scenario;
    header["stamp_threshold"] = stamp_threshold;
    auto hex_list = [](const std::vector<GroupElement>& list) {
        json out = json::array();
        for (const auto& k : list) {
            ByteWriter w;
            k.serialize(w);
            out.push_back(to_hex(w.bytes()));
        }
        return out;
    };
    header["blocksigner_keys"] = hex_list(keys);
    header["auth_online"] = hex_list(auth_online);
    header["auth_offline"] = hex_list(auth_offline);
    return header;
}

void write_trace(std::ostream& out, const json& header,
                 std::span<const TraceEvent> events) {
    out << header.dump() << "\n";
    for (const auto& e : events) {
        json line{{"t", e.time},
                  {"actor", e.actor},
                  {"kind", e.kind},
                  {"payload", e.payload},
                  {"digest", payload_digest(e.payload)}};
        out << line.dump() << "\n";
    }
}

ParsedTrace read_trace(std::istream& in) {
    ParsedTrace parsed;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace");
    parsed.header = json::parse(line);
    if (parsed.header.value("schema", "") != "fedsim-trace")
        throw std::runtime_error("not a trace file");
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line);
        TraceEvent e;
        e.time = j.at("t").get<double>();
        e.actor = j.at("actor").get<std::string>();
        e.kind = j.at("kind").get<std::string>();
        e.payload = j.at("payload");
        if (j.at("digest").get<std::string>() != payload_digest(e.payload))
            throw std::runtime_error("payload digest mismatch at line " +
                                     std::to_string(lineno));
        parsed.events.push_back(std::move(e));
    }
    return parsed;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    double rank = p / 100.0 * double(values.size());
    size_t idx = rank <= 1 ? 0 : size_t(std::ceil(rank)) - 1;
    return values[std::min(idx, values.size() - 1)];
}

json Metrics::to_json() const {
    json j;
    j["schema"] = "fedsim-metrics";
    j["version"] = 1;
    j["blocks"] = blocks;
    j["main_blocks"] = main_blocks;
    j["main_orphans"] = main_orphans;
    j["tx_submitted"] = tx_submitted;
    j["tx_confirmed"] = tx_confirmed;
    j["latency"] = {{"mean", latency_mean}, {"p50", latency_p50}, {"p90", latency_p90}};
    json stalls = json::array();
    for (const auto& [a, b] : stall_intervals) stalls.push_back({{"from", a}, {"to", b}});
    j["stall_intervals"] = std::move(stalls);
    j["fork_proofs"] = fork_proofs;
    j["duplicate_heights"] = duplicate_heights;
    j["censorship_flags"] = censorship_flags;
    json audits = json::array();
    for (const auto& s : peg_audit_series)
        audits.push_back({{"t", s.time},
                          {"locked", s.report.locked},
                          {"circulating", s.report.circulating},
                          {"in_flight_in", s.report.in_flight_in},
                          {"in_flight_out", s.report.in_flight_out},
                          {"delta", s.report.delta}});
    j["peg_audit_series"] = std::move(audits);
    j["audit_all_zero"] = audit_all_zero;
    j["final_delta"] = final_delta;
    j["peg_ops"] = peg_ops;
    j["message_counts"] = message_counts;
    j["confiscation_succeeded"] = confiscation_succeeded;
    j["backup_recovered"] = backup_recovered;
    j["backup_time"] = backup_time;
    j["node_versions"] = node_versions;
    return j;
}

}  // namespace fedsim
