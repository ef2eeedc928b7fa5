#include "lacross/bposd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lacross {

namespace {
// Saturation magnitude standing in for "min over an empty set" at degree-1
// checks; large against any LLR sum yet safe for further arithmetic.
constexpr double kSat = 1e12;
}  // namespace

Decoder::Decoder(const Dem& dem, DecoderConfig cfg) : cfg_(cfg) {
    if (cfg_.scaling_factor <= 0.0 || cfg_.scaling_factor > 1.0) {
        throw std::invalid_argument("scaling_factor must be in (0, 1]");
    }
    if (cfg_.osd_order < 0 || cfg_.bp_iterations < 0) {
        throw std::invalid_argument("negative decoder parameter");
    }
    num_checks_ = dem.num_detectors;
    num_obs_ = dem.num_observables;
    num_vars_ = static_cast<uint32_t>(dem.mechanisms.size());
    var_dets_.resize(num_vars_);
    var_obs_.resize(num_vars_);
    llr_.resize(num_vars_);
    for (uint32_t v = 0; v < num_vars_; v++) {
        const auto& m = dem.mechanisms[v];
        if (m.prior <= 0.0 || m.prior > 0.5) {
            throw std::invalid_argument("mechanism prior outside (0, 0.5]");
        }
        var_dets_[v] = m.detectors;
        var_obs_[v] = m.observables;
        llr_[v] = std::log((1.0 - m.prior) / m.prior);
    }

    // Edge arrays, variable-major ids; per-check views reference edge ids.
    var_edge_begin_.assign(num_vars_ + 1, 0);
    for (uint32_t v = 0; v < num_vars_; v++) {
        var_edge_begin_[v + 1] = var_edge_begin_[v] + static_cast<uint32_t>(var_dets_[v].size());
    }
    const uint32_t num_edges = var_edge_begin_[num_vars_];
    var_edge_check_.resize(num_edges);
    std::vector<uint32_t> check_degree(num_checks_, 0);
    for (uint32_t v = 0; v < num_vars_; v++) {
        for (std::size_t i = 0; i < var_dets_[v].size(); i++) {
            uint32_t e = var_edge_begin_[v] + static_cast<uint32_t>(i);
            var_edge_check_[e] = var_dets_[v][i];
            check_degree[var_dets_[v][i]]++;
        }
    }
    check_edge_begin_.assign(num_checks_ + 1, 0);
    for (uint32_t c = 0; c < num_checks_; c++) {
        check_edge_begin_[c + 1] = check_edge_begin_[c] + check_degree[c];
    }
    check_edge_var_.resize(num_edges);
    check_edge_id_.resize(num_edges);
    std::vector<uint32_t> fill(num_checks_, 0);
    for (uint32_t v = 0; v < num_vars_; v++) {
        for (uint32_t e = var_edge_begin_[v]; e < var_edge_begin_[v + 1]; e++) {
            uint32_t c = var_edge_check_[e];
            uint32_t at = check_edge_begin_[c] + fill[c]++;
            check_edge_var_[at] = v;
            check_edge_id_[at] = e;
        }
    }
    msg_to_check_.resize(num_edges);
    msg_to_var_.resize(num_edges);

    // Rank of the DEM check matrix, via one elimination over natural order.
    {
        std::vector<uint8_t> col(num_checks_);
        std::vector<uint32_t> swap_with;
        std::vector<std::vector<uint32_t>> elim;
        uint32_t rank = 0;
        for (uint32_t v = 0; v < num_vars_ && rank < num_checks_; v++) {
            std::fill(col.begin(), col.end(), 0);
            for (uint32_t d : var_dets_[v]) {
                col[d] = 1;
            }
            for (uint32_t i = 0; i < rank; i++) {
                std::swap(col[i], col[swap_with[i]]);
                if (col[i]) {
                    for (uint32_t r : elim[i]) {
                        col[r] ^= 1;
                    }
                }
            }
            uint32_t pivot = rank;
            while (pivot < num_checks_ && !col[pivot]) {
                pivot++;
            }
            if (pivot == num_checks_) {
                continue;
            }
            std::swap(col[rank], col[pivot]);
            swap_with.push_back(pivot);
            elim.emplace_back();
            for (uint32_t r = rank + 1; r < num_checks_; r++) {
                if (col[r]) {
                    elim.back().push_back(r);
                }
            }
            rank++;
        }
        rank_ = rank;
    }
}

BpResult Decoder::bp_minsum(const BitVec& syndrome) {
    if (syndrome.size() != num_checks_) {
        throw std::invalid_argument("syndrome length must equal detector count");
    }
    BpResult out;
    out.posterior_llr.assign(num_vars_, 0.0);
    out.hard_decision = BitVec(num_vars_);
    std::fill(msg_to_var_.begin(), msg_to_var_.end(), 0.0);

    auto hard_satisfies = [&]() {
        for (uint32_t c = 0; c < num_checks_; c++) {
            uint8_t parity = 0;
            for (uint32_t i = check_edge_begin_[c]; i < check_edge_begin_[c + 1]; i++) {
                parity ^= out.hard_decision.get(check_edge_var_[i]);
            }
            if (parity != (syndrome.get(c) ? 1 : 0)) {
                return false;
            }
        }
        return true;
    };

    for (int it = 0; it < cfg_.bp_iterations; it++) {
        // variable to check
        for (uint32_t v = 0; v < num_vars_; v++) {
            double total = llr_[v];
            for (uint32_t e = var_edge_begin_[v]; e < var_edge_begin_[v + 1]; e++) {
                total += msg_to_var_[e];
            }
            for (uint32_t e = var_edge_begin_[v]; e < var_edge_begin_[v + 1]; e++) {
                msg_to_check_[e] = total - msg_to_var_[e];
            }
            out.posterior_llr[v] = total;
        }
        // check to variable (normalized min-sum with syndrome sign)
        for (uint32_t c = 0; c < num_checks_; c++) {
            double min1 = kSat, min2 = kSat;
            uint32_t argmin = UINT32_MAX;
            int sign = syndrome.get(c) ? -1 : 1;
            for (uint32_t i = check_edge_begin_[c]; i < check_edge_begin_[c + 1]; i++) {
                double m = msg_to_check_[check_edge_id_[i]];
                if (m < 0.0) {
                    sign = -sign;
                }
                double mag = std::abs(m);
                if (mag < min1) {
                    min2 = min1;
                    min1 = mag;
                    argmin = i;
                } else if (mag < min2) {
                    min2 = mag;
                }
            }
            for (uint32_t i = check_edge_begin_[c]; i < check_edge_begin_[c + 1]; i++) {
                uint32_t e = check_edge_id_[i];
                double m = msg_to_check_[e];
                double others_mag = (i == argmin) ? min2 : min1;
                int others_sign = sign * (m < 0.0 ? -1 : 1);
                msg_to_var_[e] = cfg_.scaling_factor * others_sign * others_mag;
            }
        }
        // posterior and hard decision
        for (uint32_t v = 0; v < num_vars_; v++) {
            double total = llr_[v];
            for (uint32_t e = var_edge_begin_[v]; e < var_edge_begin_[v + 1]; e++) {
                total += msg_to_var_[e];
            }
            out.posterior_llr[v] = total;
            out.hard_decision.assign(v, total < 0.0);
        }
        if (hard_satisfies()) {
            out.converged = true;
            break;
        }
    }
    if (cfg_.bp_iterations == 0) {
        for (uint32_t v = 0; v < num_vars_; v++) {
            out.posterior_llr[v] = llr_[v];
        }
        out.converged = !syndrome.any();
    }
    return out;
}

BitVec Decoder::observables_of(const BitVec& correction) const {
    BitVec obs(num_obs_);
    for (uint32_t v = 0; v < num_vars_; v++) {
        if (correction.get(v)) {
            for (uint32_t o : var_obs_[v]) {
                obs.flip(o);
            }
        }
    }
    return obs;
}

/// Incremental GF(2) elimination over likelihood-ordered columns, recording
/// the row operations so that multiple right-hand sides can be re-solved.
struct Decoder::Plu {
    uint32_t num_rows;
    uint32_t rank = 0;
    std::vector<uint32_t> swap_with;             // per pivot
    std::vector<std::vector<uint32_t>> elim;     // rows below the pivot that were cleared
    std::vector<std::vector<uint32_t>> upper;    // rows above the pivot still set (for back-substitution)
    std::vector<uint32_t> pivot_vars;            // original column ids, pivot order
    std::vector<uint8_t> col;                    // workspace

    explicit Plu(uint32_t rows) : num_rows(rows), col(rows) {}

    void apply_record(std::vector<uint8_t>& v) const {
        for (uint32_t i = 0; i < rank; i++) {
            std::swap(v[i], v[swap_with[i]]);
            if (v[i]) {
                for (uint32_t r : elim[i]) {
                    v[r] ^= 1;
                }
            }
        }
    }

    /// Tries to add a column (sparse row support); true if rank grew.
    bool add_column(const std::vector<uint32_t>& support, uint32_t var_id) {
        std::fill(col.begin(), col.end(), 0);
        for (uint32_t d : support) {
            col[d] = 1;
        }
        apply_record(col);
        uint32_t pivot = rank;
        while (pivot < num_rows && !col[pivot]) {
            pivot++;
        }
        if (pivot == num_rows) {
            return false;
        }
        std::swap(col[rank], col[pivot]);
        swap_with.push_back(pivot);
        elim.emplace_back();
        for (uint32_t r = rank + 1; r < num_rows; r++) {
            if (col[r]) {
                elim.back().push_back(r);
            }
        }
        upper.emplace_back();
        for (uint32_t r = 0; r < rank; r++) {
            if (col[r]) {
                upper.back().push_back(r);
            }
        }
        pivot_vars.push_back(var_id);
        rank++;
        return true;
    }

    /// Solves on the pivot set: returns pivot coefficients, or false when the
    /// transformed rhs has support beyond the rank (inconsistent).
    bool solve(std::vector<uint8_t> rhs, std::vector<uint8_t>& coeff) const {
        apply_record(rhs);
        for (uint32_t r = rank; r < num_rows; r++) {
            if (rhs[r]) {
                return false;
            }
        }
        for (uint32_t j = rank; j-- > 0;) {
            if (rhs[j]) {
                for (uint32_t i : upper[j]) {
                    rhs[i] ^= 1;
                }
            }
        }
        coeff.assign(rhs.begin(), rhs.begin() + rank);
        return true;
    }
};

DecodeResult Decoder::osd_postprocess(const BitVec& syndrome, const BpResult& bp) {
    DecodeResult out;
    out.converged = bp.converged;

    // Rank mechanisms by decreasing error likelihood; stable on column index.
    std::vector<uint32_t> order(num_vars_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        return bp.posterior_llr[a] < bp.posterior_llr[b];
    });

    Plu plu(num_checks_);
    std::vector<uint32_t> residual;  // non-pivot columns, most likely first
    for (uint32_t v : order) {
        if (plu.rank == rank_) {
            residual.push_back(v);
            continue;
        }
        if (!plu.add_column(var_dets_[v], v)) {
            residual.push_back(v);
        }
    }

    std::vector<uint8_t> s(num_checks_, 0);
    for (uint32_t c = 0; c < num_checks_; c++) {
        s[c] = syndrome.get(c) ? 1 : 0;
    }

    // Candidate flip sets over the most-likely residual coordinates: all
    // subsets of size <= osd_order within the window, plus every pair in the
    // window. Window defaults to 2 * osd_order. OSD-0 is the empty set.
    std::vector<std::vector<uint32_t>> candidates{{}};
    if (cfg_.osd_mode == OsdMode::CombinationSweep && cfg_.osd_order > 0) {
        uint32_t window = cfg_.cs_window > 0 ? cfg_.cs_window : 2 * cfg_.osd_order;
        window = std::min<uint32_t>(window, static_cast<uint32_t>(residual.size()));
        std::vector<uint32_t> subset;
        // subsets of size <= order, lexicographic within increasing size
        for (uint32_t size = 1; size <= static_cast<uint32_t>(cfg_.osd_order) && size <= window; size++) {
            subset.assign(size, 0);
            std::iota(subset.begin(), subset.end(), 0);
            while (true) {
                candidates.push_back(subset);
                int32_t i = static_cast<int32_t>(size) - 1;
                while (i >= 0 && subset[i] == window - size + i) {
                    i--;
                }
                if (i < 0) {
                    break;
                }
                subset[i]++;
                for (uint32_t j = i + 1; j < size; j++) {
                    subset[j] = subset[j - 1] + 1;
                }
            }
        }
        if (cfg_.osd_order == 1) {
            for (uint32_t i = 0; i < window; i++) {
                for (uint32_t j = i + 1; j < window; j++) {
                    candidates.push_back({i, j});
                }
            }
        }
    }

    double best_score = 0.0;
    bool have_best = false;
    BitVec best(num_vars_);
    std::vector<uint8_t> rhs(num_checks_), coeff;
    for (const auto& flips : candidates) {
        rhs = s;
        for (uint32_t f : flips) {
            for (uint32_t d : var_dets_[residual[f]]) {
                rhs[d] ^= 1;
            }
        }
        if (!plu.solve(std::move(rhs), coeff)) {
            if (!have_best && flips.empty()) {
                // Syndrome outside the column space; cannot happen for
                // DEM-generated syndromes.
                out.valid = false;
                out.correction = BitVec(num_vars_);
                out.predicted_observables = BitVec(num_obs_);
                return out;
            }
            continue;
        }
        BitVec x(num_vars_);
        double score = 0.0;
        for (uint32_t i = 0; i < plu.rank; i++) {
            if (coeff[i]) {
                x.set(plu.pivot_vars[i]);
                score += llr_[plu.pivot_vars[i]];
            }
        }
        for (uint32_t f : flips) {
            x.set(residual[f]);
            score += llr_[residual[f]];
        }
        if (!have_best || score < best_score) {
            have_best = true;
            best_score = score;
            best = x;
        }
    }
    if (!have_best) {
        out.valid = false;
        out.correction = BitVec(num_vars_);
        out.predicted_observables = BitVec(num_obs_);
        return out;
    }
    out.correction = best;
    out.predicted_observables = observables_of(best);
    return out;
}

DecodeResult Decoder::decode(const BitVec& syndrome) {
    if (!syndrome.any()) {
        DecodeResult out;
        out.converged = true;
        out.correction = BitVec(num_vars_);
        out.predicted_observables = BitVec(num_obs_);
        return out;
    }
    BpResult bp = bp_minsum(syndrome);
    if (bp.converged) {
        DecodeResult out;
        out.converged = true;
        out.correction = bp.hard_decision;
        out.predicted_observables = observables_of(bp.hard_decision);
        return out;
    }
    if (cfg_.osd_mode == OsdMode::Off) {
        DecodeResult out;
        out.converged = false;
        out.correction = bp.hard_decision;
        out.predicted_observables = observables_of(bp.hard_decision);
        return out;
    }
    return osd_postprocess(syndrome, bp);
}

BatchStats decode_batch(const Dem& dem, const ShotBatch& batch, const DecoderConfig& cfg, bool parallel) {
    if (batch.num_detectors != dem.num_detectors) {
        throw std::invalid_argument("batch detectors do not match DEM");
    }
    BatchStats stats;
    stats.shots = batch.shots;
    const std::size_t obs_bytes = (dem.num_observables + 7) / 8;
    stats.predictions.assign(batch.shots * obs_bytes, 0);
    uint64_t failures = 0, invalid = 0;

#pragma omp parallel if (parallel) reduction(+ : failures, invalid)
    {
        Decoder dec(dem, cfg);
#pragma omp for schedule(dynamic, 16)
        for (int64_t shot = 0; shot < static_cast<int64_t>(batch.shots); shot++) {
            BitVec syndrome = batch.detector_row(shot);
            DecodeResult r = dec.decode(syndrome);
            if (!r.valid) {
                invalid++;
            }
            bool fail = false;
            for (uint32_t o = 0; o < dem.num_observables; o++) {
                bool predicted = r.predicted_observables.get(o);
                if (predicted) {
                    stats.predictions[shot * obs_bytes + o / 8] |= uint8_t(1) << (o % 8);
                }
                if (predicted != batch.observable(shot, o)) {
                    fail = true;
                }
            }
            if (fail || !r.valid) {
                failures++;
            }
        }
    }
    stats.failures = failures;
    stats.invalid = invalid;
    return stats;
}

}  // namespace lacross
