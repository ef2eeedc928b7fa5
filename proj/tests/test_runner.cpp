#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lacross/runner.hpp"

using namespace lacross;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kTinyConfig = R"({
  "family": {"k": 1, "sizes": [3], "boundary": "obc", "layout": "obc"},
  "noise": {"kind": "agnostic", "p_grid": [0.004, 0.008]},
  "shots": {"max_shots": 3000, "max_errors": 150, "batch": 500},
  "decoder": {"bp_iters": 4, "scale": 1.0, "osd": "cs", "order": 1},
  "seed": 99,
  "out": "runner_test_out"
})";

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("config parses and hashes stably") {
    ExperimentConfig cfg = config_from_json(kTinyConfig);
    CHECK(cfg.family.k == 1);
    CHECK(cfg.family.sizes == std::vector<uint32_t>{3});
    CHECK(cfg.noise.kind == NoiseKind::HardwareAgnostic);
    CHECK(cfg.shots.max_errors == 150);
    CHECK(cfg.decoder.osd_mode == OsdMode::CombinationSweep);
    CHECK(cfg.hash() == config_from_json(kTinyConfig).hash());
    ExperimentConfig other = cfg;
    other.seed = 100;
    CHECK(other.hash() != cfg.hash());
}

TEST_CASE("sweep runs, resumes and reproduces byte-identical CSV") {
    std::filesystem::remove_all("runner_test_out");
    ExperimentConfig cfg = config_from_json(kTinyConfig);
    MemoryRun first = run_memory_experiment(cfg);
    REQUIRE(first.curves.size() == 1);
    CHECK(first.curves[0].points.size() == 2);
    CHECK(first.curves[0].N == 13);
    std::string bytes1 = slurp(first.csv_path);

    // resume: nothing left to do, output identical
    MemoryRun second = run_memory_experiment(cfg);
    CHECK(slurp(second.csv_path) == bytes1);

    // fresh re-run with the same seed: identical payload
    std::filesystem::remove_all("runner_test_out");
    MemoryRun third = run_memory_experiment(cfg);
    CHECK(slurp(third.csv_path) == bytes1);

    // different seed changes the sampled payload
    std::filesystem::remove_all("runner_test_out");
    ExperimentConfig reseeded = cfg;
    reseeded.seed = 7;
    MemoryRun fourth = run_memory_experiment(reseeded);
    CHECK(slurp(fourth.csv_path) != bytes1);
    std::filesystem::remove_all("runner_test_out");
}

TEST_CASE("bigger codes win below threshold (k=1 family)") {
    std::filesystem::remove_all("runner_test_out2");
    ExperimentConfig cfg = config_from_json(kTinyConfig);
    cfg.family.sizes = {3, 5};
    cfg.noise.p_grid = {0.003};
    cfg.shots.max_shots = 6000;
    cfg.shots.max_errors = 400;
    cfg.out_dir = "runner_test_out2";
    MemoryRun run = run_memory_experiment(cfg);
    REQUIRE(run.curves.size() == 2);
    double p3 = run.curves[0].points[0].per_round;
    double p5 = run.curves[1].points[0].per_round;
    CHECK(run.curves[0].n == 3);
    CHECK(p5 < p3);
    std::filesystem::remove_all("runner_test_out2");
}

TEST_CASE("max_errors cutoff is honored within one batch") {
    std::filesystem::remove_all("runner_test_out3");
    ExperimentConfig cfg = config_from_json(kTinyConfig);
    cfg.noise.p_grid = {0.02};  // far above threshold: failures are plentiful
    cfg.shots.max_shots = 100000;
    cfg.shots.max_errors = 100;
    cfg.shots.batch = 250;
    cfg.out_dir = "runner_test_out3";
    MemoryRun run = run_memory_experiment(cfg);
    const CurvePoint& pt = run.curves[0].points[0];
    CHECK(pt.failures >= 100);
    CHECK(pt.shots < 100000);
    std::filesystem::remove_all("runner_test_out3");
}

TEST_CASE("surface partition at matched qubit count") {
    SurfacePartition p65 = surface_partition(65, 9);
    CHECK(p65.copies == 9);
    CHECK(p65.distance == 2);  // no odd distance fits; nearest-N fallback
    CHECK(p65.qubits_used == 45);
    CHECK(p65.leftover == 20);
    CHECK_FALSE(p65.exact);

    SurfacePartition p52 = surface_partition(52, 4);
    CHECK(p52.distance == 3);
    CHECK(p52.exact);

    SurfacePartition p117 = surface_partition(117, 9);
    CHECK(p117.distance == 3);
    CHECK(p117.exact);
}

}  // TEST_SUITE
