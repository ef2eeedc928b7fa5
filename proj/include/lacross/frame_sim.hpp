#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lacross/bitvec.hpp"
#include "lacross/circuit.hpp"

namespace lacross {

/// Bipartite check structure mapping independent error mechanisms to the
/// detectors and observables they flip, with per-mechanism priors.
struct Dem {
    struct Mechanism {
        double prior = 0.0;
        std::vector<uint32_t> detectors;    // sorted
        std::vector<uint32_t> observables;  // sorted
    };
    uint32_t num_detectors = 0;
    uint32_t num_observables = 0;
    std::vector<Mechanism> mechanisms;
    // Mechanisms that flip an observable but no detector; they bound the
    // achievable logical fidelity and are retained in `mechanisms`.
    uint32_t num_undetectable_observable = 0;
};

/// One Pauli component of one noise channel, before merging.
struct ErrorComponent {
    uint32_t layer = 0;      // index into circuit.layers
    uint32_t item = 0;       // qubit slot (Dep1/flips) or pair slot (Dep2)
    uint32_t component = 0;  // Dep1: 0=X 1=Z 2=Y; Dep2: 0..14; flips: 0
    double prior = 0.0;
    std::vector<uint32_t> detectors;
    std::vector<uint32_t> observables;
};

/// Exact per-component propagation through the downstream Clifford circuit,
/// in circuit order. Components with empty signature are included.
std::vector<ErrorComponent> enumerate_components(const NoisyCircuit& circuit);

/// Propagated and merged detector error model. Identical signatures merge
/// with prior q1(1-q2) + q2(1-q1); empty signatures are dropped.
Dem extract_dem(const NoisyCircuit& circuit);

struct ShotBatch {
    uint64_t shots = 0;
    uint32_t num_detectors = 0;
    uint32_t num_observables = 0;
    uint64_t seed = 0;
    std::vector<uint8_t> data;  // per shot: packed detector bits then observable bits

    std::size_t det_bytes() const { return (num_detectors + 7) / 8; }
    std::size_t obs_bytes() const { return (num_observables + 7) / 8; }
    std::size_t stride() const { return det_bytes() + obs_bytes(); }

    bool detector(uint64_t shot, uint32_t d) const {
        return (data[shot * stride() + d / 8] >> (d % 8)) & 1;
    }
    bool observable(uint64_t shot, uint32_t o) const {
        return (data[shot * stride() + det_bytes() + o / 8] >> (o % 8)) & 1;
    }
    BitVec detector_row(uint64_t shot) const;
    BitVec observable_row(uint64_t shot) const;
};

/// Pauli-frame Monte Carlo sampling. Shot streams derive from (seed, shot
/// index); the parallel and serial paths produce identical batches. The
/// batch covers stream indices [shot_base, shot_base + shots), so a point
/// sampled in several batches sees one continuous stream.
ShotBatch sample(const NoisyCircuit& circuit, uint64_t shots, uint64_t seed, uint64_t shot_base = 0);
ShotBatch sample_reference(const NoisyCircuit& circuit, uint64_t shots, uint64_t seed,
                           uint64_t shot_base = 0);

/// Single-shot run with all channels silent except one forced component;
/// exercises the sampler path for DEM consistency checks.
struct ForcedError {
    uint32_t layer = 0;
    uint32_t item = 0;
    uint32_t component = 0;
};
ShotBatch sample_forced(const NoisyCircuit& circuit, const ForcedError& forced);

std::string dem_to_text(const Dem& dem);
Dem dem_from_text(std::istream& in);
Dem dem_from_text(const std::string& text);
Dem load_dem_file(const std::string& path);
void save_dem_file(const std::string& path, const Dem& dem);

void save_batch_file(const std::string& path, const ShotBatch& batch);
ShotBatch load_batch_file(const std::string& path);

}  // namespace lacross
