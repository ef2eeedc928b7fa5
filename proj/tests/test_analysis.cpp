#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lacross/analysis.hpp"

using namespace lacross;

namespace {

/// Synthetic curve P_L = a (p/p0)^d sampled on a log grid.
DecodingCurve power_law(double a, double p0, double d, uint32_t N, uint32_t D,
                        const std::vector<double>& grid) {
    DecodingCurve c;
    c.family = "lacross";
    c.k = 2;
    c.n = 6;
    c.N = N;
    c.K = 4;
    c.D = D;
    c.noise = "agnostic";
    c.rounds = D;
    for (double p : grid) {
        CurvePoint pt;
        pt.p = p;
        pt.shots = 1000000;
        pt.failures = 1000;  // nonzero so fits keep the point
        pt.per_round = a * std::pow(p / p0, d);
        pt.p_l = pt.per_round;
        pt.stderr_ = pt.per_round * 0.01;
        c.points.push_back(pt);
    }
    return c;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("per-round normalization") {
    CHECK(per_round_logical(0.0, 5) == 0.0);
    CHECK(per_round_logical(0.37, 1) == doctest::Approx(0.37));
    // inverse of the D-fold accumulation map on a grid
    for (double q : {1e-4, 1e-3, 0.05, 0.3}) {
        for (uint32_t d : {1u, 2u, 4u, 9u}) {
            double p_l = 1.0 - std::pow(1.0 - q, static_cast<double>(d));
            CHECK(per_round_logical(p_l, d) == doctest::Approx(q).epsilon(1e-10));
        }
    }
    // monotone in p_l
    CHECK(per_round_logical(0.2, 3) < per_round_logical(0.3, 3));
}

TEST_CASE("surface-code family combination") {
    DecodingCurve single = power_law(1e-3, 1.0, 0.0, 13, 3, {0.001});
    DecodingCurve same = sc_family_curve(single, 1);
    CHECK(same.points[0].per_round == doctest::Approx(1e-3));

    DecodingCurve nine = sc_family_curve(single, 9);
    CHECK(nine.points[0].per_round == doctest::Approx(1.0 - std::pow(0.999, 9.0)));
    CHECK(nine.K == 9);
    CHECK(nine.N == 9 * 13);

    DecodingCurve zero = power_law(0.0, 1.0, 0.0, 13, 3, {0.001});
    CHECK(sc_family_curve(zero, 7).points[0].per_round == 0.0);
}

TEST_CASE("threshold recovery on synthetic crossing curves") {
    const double p0 = 0.004;
    std::vector<double> grid;
    for (double p = 0.002; p < 0.009; p *= 1.25) {
        grid.push_back(p);
    }
    std::vector<DecodingCurve> curves;
    uint32_t n = 30;
    for (double d : {2.0, 3.0, 4.0}) {
        curves.push_back(power_law(0.05, p0, d, n, 3, grid));
        n *= 2;
    }
    auto est = estimate_threshold(curves);
    REQUIRE(est.has_value());
    CHECK(est->p_mid == doctest::Approx(p0).epsilon(0.02));
    CHECK(est->p_low <= est->p_mid);
    CHECK(est->p_high >= est->p_mid);

    SUBCASE("order invariance") {
        std::vector<DecodingCurve> shuffled{curves[2], curves[0], curves[1]};
        auto est2 = estimate_threshold(shuffled);
        REQUIRE(est2.has_value());
        CHECK(est2->p_mid == doctest::Approx(est->p_mid));
    }
}

TEST_CASE("no crossing reported for parallel curves") {
    std::vector<double> grid{0.001, 0.002, 0.004};
    DecodingCurve a = power_law(0.01, 0.004, 2, 30, 3, grid);
    DecodingCurve b = power_law(0.05, 0.004, 2, 60, 4, grid);  // strictly above
    b.N = 60;
    CHECK_FALSE(estimate_threshold({a, b}).has_value());
}

TEST_CASE("sub-threshold fit recovers an exact power law") {
    std::vector<double> grid{0.0005, 0.0008, 0.0011, 0.0015};
    DecodingCurve c = power_law(0.1, 0.002, 3.0, 52, 4, grid);
    SubthresholdFit fit = fit_subthreshold(c, 0.002);
    CHECK(fit.slope_free == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(fit.a == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(fit.d_e == 2);  // floor((4+1)/2)
    CHECK(fit.beta == doctest::Approx(3.0 / std::sqrt(52.0)));
    // lambda from N = (lambda D - k)^2 + (lambda D)^2: n = lambda D
    CHECK(fit.lambda_k == doctest::Approx(6.0 / 4.0));
    CHECK(fit.residual < 1e-9);
}

TEST_CASE("fit rejects starved inputs") {
    DecodingCurve c = power_law(0.1, 0.002, 3.0, 52, 4, {0.001});
    CHECK_THROWS_AS(fit_subthreshold(c, 0.002), InsufficientData);
    DecodingCurve zeroes = power_law(0.1, 0.002, 3.0, 52, 4, {0.0005, 0.001});
    for (auto& pt : zeroes.points) {
        pt.failures = 0;
    }
    CHECK_THROWS_AS(fit_subthreshold(zeroes, 0.002), InsufficientData);
}

TEST_CASE("beta_sc arithmetic for K copies") {
    // (2 sqrt(2K))^-1 at K = 9
    CHECK(1.0 / (2.0 * std::sqrt(18.0)) == doctest::Approx(0.1179).epsilon(1e-3));
}

TEST_CASE("closed-form crossing agrees with a numerical root") {
    std::mt19937 gen(2718);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; trial++) {
        double a_sc = 0.05 + 0.5 * u(gen);
        double a_ldpc = a_sc * (0.05 + 0.9 * u(gen));  // 0 < A_ldpc/A_sc < 1
        double pth_sc = 0.004 + 0.004 * u(gen);
        double pth_ldpc = 0.001 + 0.003 * u(gen);
        double beta_sc = 0.05 + 0.10 * u(gen);
        double beta_ldpc = beta_sc + 0.02 + 0.3 * u(gen);  // beta_sc < beta_ldpc
        double n = 30 + 500 * u(gen);
        CrossingReport rep = crossing_point(a_ldpc, pth_ldpc, beta_ldpc, a_sc, pth_sc, beta_sc, n);

        // independent 1-D root finder on the defining equation
        auto f = [&](double logp) {
            double lhs = std::log(a_sc) + beta_sc * std::sqrt(n) * (logp - std::log(pth_sc));
            double rhs = std::log(a_ldpc) + beta_ldpc * std::sqrt(n) * (logp - std::log(pth_ldpc));
            return lhs - rhs;
        };
        double lo = std::log(1e-12), hi = std::log(1e6);
        REQUIRE(f(lo) * f(hi) < 0);
        for (int it = 0; it < 200; it++) {
            double mid = 0.5 * (lo + hi);
            if (f(lo) * f(mid) <= 0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        double root = std::exp(0.5 * (lo + hi));
        CHECK(std::abs(rep.p_star - root) <= 1e-10 * root);
    }
}

TEST_CASE("crossing point decreases with N toward a positive limit") {
    double a_sc = 0.3, a_ldpc = 0.1, pth_sc = 0.006, pth_ldpc = 0.002;
    double beta_sc = 0.1179, beta_ldpc = 0.35;
    double prev = 1e300;
    CrossingReport limit = crossing_point(a_ldpc, pth_ldpc, beta_ldpc, a_sc, pth_sc, beta_sc, 1e12);
    for (double n : {50.0, 100.0, 400.0, 1600.0, 6400.0}) {
        CrossingReport rep = crossing_point(a_ldpc, pth_ldpc, beta_ldpc, a_sc, pth_sc, beta_sc, n);
        CHECK(rep.p_star < prev);
        CHECK(rep.p_star > 0.0);
        CHECK(rep.p_star > rep.p_star_limit);
        prev = rep.p_star;
    }
    CHECK(limit.p_star == doctest::Approx(limit.p_star_limit).epsilon(1e-5));
    CHECK(limit.p_star_limit > 0.0);
}

TEST_CASE("degenerate exponents are rejected") {
    CHECK_THROWS_AS(crossing_point(0.1, 0.002, 0.2, 0.3, 0.006, 0.2, 100), DegenerateExponents);
}

TEST_CASE("csv round-trips curves") {
    DecodingCurve c = power_law(0.07, 0.003, 2.0, 52, 4, {0.001, 0.002});
    std::ostringstream out;
    write_csv(out, {c});
    std::istringstream in(out.str());
    auto back = read_csv(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0].family == "lacross");
    CHECK(back[0].N == 52);
    REQUIRE(back[0].points.size() == 2);
    CHECK(back[0].points[1].per_round == doctest::Approx(c.points[1].per_round));
    std::ostringstream out2;
    write_csv(out2, back);
    CHECK(out2.str() == out.str());
}

}  // TEST_SUITE
