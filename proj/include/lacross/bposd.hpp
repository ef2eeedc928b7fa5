#pragma once

#include <cstdint>
#include <vector>

#include "lacross/bitvec.hpp"
#include "lacross/frame_sim.hpp"

namespace lacross {

enum class OsdMode { Off, Osd0, CombinationSweep };

struct DecoderConfig {
    int bp_iterations = 4;
    double scaling_factor = 1.0;  // min-sum normalization; 0.625 for the surface code
    OsdMode osd_mode = OsdMode::CombinationSweep;
    int osd_order = 1;   // combination-sweep order
    int cs_window = 0;   // residual-coordinate window; 0 means 2 * osd_order
};

struct DecodeResult {
    BitVec predicted_observables;
    BitVec correction;     // chosen mechanism set
    bool converged = false;  // BP hard decision satisfied the syndrome
    bool valid = true;       // false iff syndrome outside the column space
};

struct BpResult {
    std::vector<double> posterior_llr;
    BitVec hard_decision;
    bool converged = false;
};

/// Min-sum belief propagation with normalization plus ordered-statistics
/// post-processing on the detector error model. One instance holds the
/// Tanner graph and reusable workspaces; it is single-threaded, so batch
/// decoding spawns one instance per thread over a shared read-only DEM.
class Decoder {
  public:
    Decoder(const Dem& dem, DecoderConfig cfg);

    BpResult bp_minsum(const BitVec& syndrome);
    DecodeResult decode(const BitVec& syndrome);

    uint32_t dem_rank() const { return rank_; }
    const std::vector<double>& channel_llr() const { return llr_; }

  private:
    struct Plu;
    DecodeResult osd_postprocess(const BitVec& syndrome, const BpResult& bp);
    BitVec observables_of(const BitVec& correction) const;

    DecoderConfig cfg_;
    uint32_t num_checks_ = 0;
    uint32_t num_vars_ = 0;
    uint32_t num_obs_ = 0;
    std::vector<std::vector<uint32_t>> var_dets_;  // column support, sorted
    std::vector<std::vector<uint32_t>> var_obs_;
    std::vector<double> llr_;  // channel log((1-q)/q)

    // Tanner graph in edge-list form.
    std::vector<uint32_t> var_edge_begin_, var_edge_check_;
    std::vector<uint32_t> check_edge_begin_, check_edge_var_, check_edge_id_;
    std::vector<double> msg_to_check_, msg_to_var_;

    uint32_t rank_ = 0;
};

struct BatchStats {
    uint64_t shots = 0;
    uint64_t failures = 0;
    uint64_t invalid = 0;  // syndromes outside the DEM column space
    std::vector<uint8_t> predictions;  // packed per-shot observable predictions
};

/// A shot fails when the prediction differs from the recorded observables on
/// any of the K observables.
BatchStats decode_batch(const Dem& dem, const ShotBatch& batch, const DecoderConfig& cfg,
                        bool parallel = true);

}  // namespace lacross
