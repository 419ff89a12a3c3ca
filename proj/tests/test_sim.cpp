#include "fedsim/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace fedsim;

namespace {

/// A federation-only scenario that runs as fast as consensus allows.
Scenario quick_scenario(uint64_t seed) {
    Scenario s;
    s.name = "unit-quick";
    s.n = 4;
    s.k = 3;
    s.precommit_threshold = 3;
    s.supermajority = 3;
    s.block_interval = 0;
    s.duration = 1e9;
    s.max_height = 12;
    s.seed = seed;
    s.watchmen.count = 3;
    s.watchmen.threshold = 2;
    s.watchmen.backup_size = 2;
    s.watchmen.backup_quorum = 2;
    s.validate();
    return s;
}

}  // namespace

TEST_CASE("scenarios round-trip through json and reject junk") {
    Scenario s = bundled_scenario("liquid-default");
    nlohmann::json j = s.to_json();
    Scenario back = Scenario::from_json(j);
    CHECK(back.to_json() == j);

    nlohmann::json junk = j;
    junk["definitely_not_a_key"] = 1;
    CHECK_THROWS_AS((void)Scenario::from_json(junk), ScenarioError);

    nlohmann::json nested = j;
    nested["federation"]["mystery"] = true;
    CHECK_THROWS_AS((void)Scenario::from_json(nested), ScenarioError);

    nlohmann::json bad = j;
    bad["federation"]["k"] = 20;  // threshold above membership (n = 11)
    CHECK_THROWS_AS((void)Scenario::from_json(bad), ScenarioError);
}

TEST_CASE("every bundled scenario is well-formed and self-describing") {
    std::vector<std::string> names = bundled_scenario_names();
    CHECK(names.size() == 8);
    for (const std::string& name : names) {
        Scenario s = bundled_scenario(name);
        CHECK(s.name == name);
        CHECK_FALSE(s.description.empty());
        nlohmann::json j = s.to_json();
        CHECK(Scenario::from_json(j).to_json() == j);
    }
    CHECK_THROWS_AS((void)bundled_scenario("no-such-scenario"), ScenarioError);
}

TEST_CASE("simulation output is bit-identical across runs of one scenario") {
    Scenario s = quick_scenario(99);
    SimResult a = sim_run(s);
    SimResult b = sim_run(s);
    CHECK(a.metrics.blocks == 12);
    CHECK(a.metrics.to_json().dump() == b.metrics.to_json().dump());
    REQUIRE(a.side_blocks.size() == b.side_blocks.size());
    for (size_t i = 0; i < a.side_blocks.size(); ++i)
        CHECK(a.side_blocks[i].header.digest() == b.side_blocks[i].header.digest());
    REQUIRE(a.trace.size() == b.trace.size());
    for (size_t i = 0; i < a.trace.size(); ++i)
        CHECK(a.trace[i].payload.dump() == b.trace[i].payload.dump());

    // a different seed derives different key material (empty-block headers
    // coincide by design, so the stamps are where the seed must show up)
    SimResult c = sim_run(quick_scenario(100));
    CHECK_FALSE(c.blocksigner_keys[0] == a.blocksigner_keys[0]);
    CHECK_FALSE(std::get<MultisigStamp>(c.side_blocks[1].header.stamp) ==
                std::get<MultisigStamp>(a.side_blocks[1].header.stamp));
}

TEST_CASE("traces round-trip and detect payload tampering") {
    SimResult r = sim_run(quick_scenario(7));
    nlohmann::json header = trace_header(r.scenario_json, r.blocksigner_keys,
                                         r.stamp_threshold, r.auth_online,
                                         r.auth_offline);
    std::ostringstream out;
    write_trace(out, header, r.trace);

    std::istringstream in(out.str());
    ParsedTrace parsed = read_trace(in);
    CHECK(parsed.header["stamp_threshold"] == r.stamp_threshold);
    REQUIRE(parsed.events.size() == r.trace.size());
    for (size_t i = 0; i < r.trace.size(); ++i) {
        CHECK(parsed.events[i].kind == r.trace[i].kind);
        CHECK(parsed.events[i].payload == r.trace[i].payload);
    }

    // edit one payload field without breaking the JSON: digest must complain
    std::string text = out.str();
    size_t pos = text.find("\"chain\":\"side\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 14, "\"chain\":\"syde\"");
    std::istringstream bad(text);
    CHECK_THROWS_AS((void)read_trace(bad), std::runtime_error);
}

TEST_CASE("percentile uses nearest-rank over unsorted input") {
    CHECK(percentile({}, 50) == 0);
    CHECK(percentile({5.0}, 50) == 5.0);
    std::vector<double> v{9, 2, 7, 1, 10, 3, 8, 5, 4, 6};  // 1..10 shuffled
    double p50 = percentile(v, 50), p90 = percentile(v, 90);
    CHECK(p50 >= 5.0);
    CHECK(p50 <= 6.0);
    CHECK(p90 >= 9.0);
    CHECK(p50 <= p90);
    CHECK(percentile(v, 100) == 10.0);
}

TEST_CASE("main-chain intervals are exponential with the requested mean") {
    DetRng rng(71);
    const double mean = 600.0;
    const int samples = 20000;
    double sum = 0;
    for (int i = 0; i < samples; ++i) {
        double v = MainchainModel::draw_interval(rng, mean);
        CHECK(v >= 0);
        sum += v;
    }
    CHECK(std::abs(sum / samples - mean) < 5 * mean / std::sqrt(double(samples)));
    CHECK_THROWS(MainchainModel::draw_interval(rng, 0));
}

TEST_CASE("latency comparison calibrates to 1x and scales with the mean") {
    // both chains deterministic at the same interval: the ratio must be ~1
    LatencyComparison flat = latency_compare(5, 500, 60.0, 60.0, 1, true);
    CHECK(flat.samples == 500);
    CHECK(flat.ratio > 0.9);
    CHECK(flat.ratio < 1.1);

    // 60 s federation vs 600 s mean exponential chain, single confirmation
    LatencyComparison real = latency_compare(5, 2000, 60.0, 600.0, 1);
    CHECK(real.samples == 2000);
    CHECK(real.side_mean > 55.0);
    CHECK(real.side_mean < 65.0);
    CHECK(real.ratio > 8.0);
    CHECK(real.ratio < 12.0);

    // requiring more confirmations can only slow the main chain down
    LatencyComparison deep = latency_compare(5, 1000, 60.0, 600.0, 3);
    CHECK(deep.main_mean > real.main_mean);
}
