// Throughput comparison between the serial reference kernels and the
// OpenMP-parallel ones, on a mid-size code at circuit level.

#include <benchmark/benchmark.h>

#include "lacross/bposd.hpp"
#include "lacross/circuit.hpp"
#include "lacross/codes.hpp"
#include "lacross/frame_sim.hpp"

using namespace lacross;

namespace {

struct Fixture {
    NoisyCircuit circuit;
    Dem dem;
    ShotBatch batch;

    Fixture() {
        SeedCode seed = build_seed(7, 3, Boundary::OBC);
        CssCode code = hypergraph_product(seed, seed);
        QubitLayout layout = assign_layout(code, LayoutMode::OBC);
        NoisyCircuit skeleton = build_syndrome_circuit(code, layout, 4);
        circuit = instrument(skeleton, NoiseModel::hardware_specific(0.002));
        dem = extract_dem(circuit);
        batch = sample(circuit, 2000, 7);
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

void bm_sample_serial(benchmark::State& state) {
    auto& f = fixture();
    for (auto _ : state) {
        ShotBatch b = sample_reference(f.circuit, 2000, 7);
        benchmark::DoNotOptimize(b.data.data());
    }
    state.SetItemsProcessed(state.iterations() * 2000);
}

void bm_sample_omp(benchmark::State& state) {
    auto& f = fixture();
    for (auto _ : state) {
        ShotBatch b = sample(f.circuit, 2000, 7);
        benchmark::DoNotOptimize(b.data.data());
    }
    state.SetItemsProcessed(state.iterations() * 2000);
}

void bm_decode_serial(benchmark::State& state) {
    auto& f = fixture();
    DecoderConfig cfg;
    for (auto _ : state) {
        BatchStats s = decode_batch(f.dem, f.batch, cfg, false);
        benchmark::DoNotOptimize(s.failures);
    }
    state.SetItemsProcessed(state.iterations() * f.batch.shots);
}

void bm_decode_omp(benchmark::State& state) {
    auto& f = fixture();
    DecoderConfig cfg;
    for (auto _ : state) {
        BatchStats s = decode_batch(f.dem, f.batch, cfg, true);
        benchmark::DoNotOptimize(s.failures);
    }
    state.SetItemsProcessed(state.iterations() * f.batch.shots);
}

BENCHMARK(bm_sample_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_sample_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_decode_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_decode_omp)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
