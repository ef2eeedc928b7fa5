#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lacross/analysis.hpp"
#include "lacross/bposd.hpp"
#include "lacross/circuit.hpp"
#include "lacross/codes.hpp"

namespace lacross {

struct FamilySpec {
    uint32_t k = 2;
    std::vector<uint32_t> sizes;  // seed lengths n
    Boundary boundary = Boundary::OBC;
    LayoutMode layout = LayoutMode::OBC;
    PolyKind poly = PolyKind::ThreeTerm;
};

struct NoiseSpec {
    NoiseKind kind = NoiseKind::HardwareAgnostic;
    std::vector<double> p_grid;
    enum class CSource { Paper, Model } c_source = CSource::Paper;
};

struct ShotsPolicy {
    uint64_t max_shots = 100000;
    uint64_t max_errors = 1000;
    uint64_t batch = 1000;
};

struct ExperimentConfig {
    FamilySpec family;
    NoiseSpec noise;
    uint32_t rounds = 0;  // 0: use the code distance
    ShotsPolicy shots;
    DecoderConfig decoder;
    uint64_t seed = 1;
    std::string out_dir = "results";
    char memory_basis = 'Z';

    std::string canonical() const;  // stable serialization, hashed for resume
    uint64_t hash() const;
};

ExperimentConfig config_from_json_file(const std::string& path);
ExperimentConfig config_from_json(const std::string& text);

const char* noise_name(NoiseKind kind);

/// One decoding-curve point: builds, instruments, extracts the DEM, samples
/// in batches until the failure or shot cutoff, and decodes.
CurvePoint run_point(const NoisyCircuit& instrumented, const Dem& dem, double p, uint32_t rounds,
                     const ShotsPolicy& shots, const DecoderConfig& decoder, uint64_t point_seed);

struct MemoryRun {
    std::vector<DecodingCurve> curves;
    std::string csv_path;
};

/// Full sweep over (size, p). Completed points found in an existing CSV with
/// a matching config hash are skipped; results append in grid order, so a
/// finished sweep is byte-reproducible from (config, seed).
MemoryRun run_memory_experiment(const ExperimentConfig& cfg,
                                const std::function<void(const std::string&)>& log = nullptr);

struct SurfacePartition {
    uint32_t copies = 0;
    uint32_t distance = 0;
    uint32_t qubits_used = 0;
    uint32_t leftover = 0;
    bool exact = false;  // copies * (d^2 + (d-1)^2) == N
};

/// Largest odd-distance unrotated surface code such that K copies fit in N
/// qubits; falls back to the nearest-N distance when no odd one fits.
SurfacePartition surface_partition(uint32_t n_qubits, uint32_t k_logical);

struct ComparisonReport {
    DecodingCurve ldpc;
    DecodingCurve sc_single;
    DecodingCurve sc_combined;
    SurfacePartition partition;
    std::optional<double> empirical_crossing;
    std::optional<CrossingReport> closed_form;
    std::optional<SubthresholdFit> fit_ldpc;
    std::optional<SubthresholdFit> fit_sc;
};

/// LDPC code against K copies of the surface code at matched qubit budget,
/// both run for D_ldpc rounds; the surface arm decodes with scale 0.625.
ComparisonReport run_comparison(const ExperimentConfig& cfg, uint32_t ldpc_n,
                                double sc_p_th_hint = 0.0,
                                const std::function<void(const std::string&)>& log = nullptr);

}  // namespace lacross
