#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lacross {

struct CurvePoint {
    double p = 0.0;
    uint64_t shots = 0;
    uint64_t failures = 0;
    double p_l = 0.0;     // cumulative logical error probability, failures/shots
    double per_round = 0.0;  // P_L = 1 - (1 - p_l)^(1/D)
    double stderr_ = 0.0;    // sqrt(P_L (1 - P_L) / shots), at the per-round level
};

struct DecodingCurve {
    std::string family;  // "lacross" or "surface"
    uint32_t k = 0;
    uint32_t n = 0;
    uint32_t N = 0;
    uint32_t K = 0;
    uint32_t D = 0;
    std::string noise;  // "hw" or "agnostic"
    uint32_t rounds = 0;
    std::vector<CurvePoint> points;
};

/// Per-round normalization P_L = 1 - (1 - p_L)^(1/D).
double per_round_logical(double p_l, uint32_t rounds);

CurvePoint make_point(double p, uint64_t shots, uint64_t failures, uint32_t rounds);

/// K independent copies: P = 1 - (1 - P1)^K pointwise, with propagated
/// binomial error.
DecodingCurve sc_family_curve(const DecodingCurve& single, uint32_t copies);

struct ThresholdEstimate {
    double p_mid = 0.0;  // crossing of the two largest sizes
    double p_low = 0.0;  // bracket over all size pairs
    double p_high = 0.0;
};

/// Mutual crossing of per-round curves located by log-log interpolation.
/// Returns nullopt when no pair of curves crosses in the sampled range.
std::optional<ThresholdEstimate> estimate_threshold(const std::vector<DecodingCurve>& curves);

/// Crossing of two specific curves (log-log interpolated), if any.
std::optional<double> curve_crossing(const DecodingCurve& a, const DecodingCurve& b);

struct SubthresholdFit {
    double a = 0.0;        // prefactor, extrapolated at p = p_th
    double p_th = 0.0;
    uint32_t d_e = 0;      // effective distance floor((D+1)/2)
    double slope_free = 0.0;
    double a_constrained = 0.0;  // prefactor with the slope pinned to d_e
    double beta = 0.0;     // slope_free / sqrt(N)
    double lambda_k = 0.0;  // from N = (lambda D - k)^2 + (lambda D)^2
    double residual = 0.0;  // weighted rms of log-residuals, free fit
    uint32_t points_used = 0;
};

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateExponents : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Weighted least squares of log P_L against log(p / p_th) over sub-threshold
/// points with nonzero failures. Zero-failure points are excluded.
SubthresholdFit fit_subthreshold(const DecodingCurve& curve, double p_th);

struct CrossingReport {
    double p_star = 0.0;        // closed form at the given N
    double p_star_limit = 0.0;  // N -> infinity limit (first factor alone)
};

/// Closed-form crossing point between two sub-threshold scaling laws
/// A (p/p_th)^(beta sqrt(N)).
CrossingReport crossing_point(double a_ldpc, double p_th_ldpc, double beta_ldpc, double a_sc,
                              double p_th_sc, double beta_sc, double n_qubits);

/// CSV columns: family,k,n,N,K,D,noise,p,shots,failures,p_L,P_L,stderr
std::string csv_header();
std::string csv_row(const DecodingCurve& curve, const CurvePoint& pt);
void write_csv(std::ostream& out, const std::vector<DecodingCurve>& curves);
std::vector<DecodingCurve> read_csv(std::istream& in);
std::vector<DecodingCurve> read_csv_file(const std::string& path);

}  // namespace lacross
