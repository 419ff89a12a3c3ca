#include "fedsim/rangeproof.hpp"
#include "fedsim/schnorr.hpp"
#include "fedsim/sim.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace fedsim;

void BM_SchnorrSign(benchmark::State& state) {
    DetRng rng(1);
    Keypair kp = Keypair::generate(rng);
    Bytes msg{1, 2, 3, 4};
    for (auto _ : state) benchmark::DoNotOptimize(schnorr_sign(kp.secret, msg));
}
BENCHMARK(BM_SchnorrSign);

void BM_SchnorrVerify(benchmark::State& state) {
    DetRng rng(1);
    Keypair kp = Keypair::generate(rng);
    Bytes msg{1, 2, 3, 4};
    SchnorrSignature sig = schnorr_sign(kp.secret, msg);
    for (auto _ : state) benchmark::DoNotOptimize(schnorr_verify(kp.pub, msg, sig));
}
BENCHMARK(BM_SchnorrVerify);

void BM_RangeProve(benchmark::State& state) {
    DetRng rng(1);
    Scalar blinder = Scalar::random(rng);
    AssetId asset{};
    for (auto _ : state)
        benchmark::DoNotOptimize(range_prove(12345, blinder, asset, 16));
}
BENCHMARK(BM_RangeProve);

void BM_RangeVerify(benchmark::State& state) {
    DetRng rng(1);
    Scalar blinder = Scalar::random(rng);
    AssetId asset{};
    Commitment c = commit(12345, blinder, asset);
    RangeProof p = range_prove(12345, blinder, asset, 16);
    for (auto _ : state) benchmark::DoNotOptimize(range_verify(c, asset, p));
}
BENCHMARK(BM_RangeVerify);

void BM_SimRounds(benchmark::State& state) {
    for (auto _ : state) {
        Scenario sc;
        sc.name = "bench";
        sc.description = "empty-block round throughput";
        sc.n = 8;
        sc.k = 5;
        sc.precommit_threshold = 5;
        sc.supermajority = 5;
        sc.block_interval = 0;
        sc.max_height = uint64_t(state.range(0));
        sc.duration = 1e7;
        sc.watchmen.count = 3;
        sc.watchmen.threshold = 2;
        sc.watchmen.backup_size = 1;
        sc.watchmen.backup_quorum = 1;
        benchmark::DoNotOptimize(sim_run(sc));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimRounds)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
