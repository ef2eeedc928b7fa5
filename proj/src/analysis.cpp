#include "lacross/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lacross {

double per_round_logical(double p_l, uint32_t rounds) {
    if (p_l < 0.0 || p_l > 1.0 || rounds < 1) {
        throw std::invalid_argument("per_round_logical: bad arguments");
    }
    return 1.0 - std::pow(1.0 - p_l, 1.0 / static_cast<double>(rounds));
}

CurvePoint make_point(double p, uint64_t shots, uint64_t failures, uint32_t rounds) {
    CurvePoint pt;
    pt.p = p;
    pt.shots = shots;
    pt.failures = failures;
    pt.p_l = shots > 0 ? static_cast<double>(failures) / static_cast<double>(shots) : 0.0;
    pt.per_round = per_round_logical(pt.p_l, rounds);
    pt.stderr_ = shots > 0 ? std::sqrt(pt.per_round * (1.0 - pt.per_round) / static_cast<double>(shots)) : 0.0;
    return pt;
}

DecodingCurve sc_family_curve(const DecodingCurve& single, uint32_t copies) {
    if (copies < 1) {
        throw std::invalid_argument("sc_family_curve: copies must be >= 1");
    }
    DecodingCurve out = single;
    out.K = single.K * copies;
    out.N = single.N * copies;
    for (CurvePoint& pt : out.points) {
        double p1 = pt.per_round;
        double combined = 1.0 - std::pow(1.0 - p1, static_cast<double>(copies));
        double deriv = copies * std::pow(1.0 - p1, static_cast<double>(copies) - 1.0);
        pt.per_round = combined;
        pt.stderr_ = deriv * pt.stderr_;
        pt.p_l = 1.0 - std::pow(1.0 - pt.p_l, static_cast<double>(copies));
    }
    return out;
}

namespace {

/// log P_L interpolated (log-log) at log-p `lx`; curve points must be sorted.
/// Returns nullopt outside the sampled range or where failures are zero.
std::optional<double> log_interp(const std::vector<std::pair<double, double>>& pts, double lx) {
    if (pts.size() < 2 || lx < pts.front().first || lx > pts.back().first) {
        return std::nullopt;
    }
    for (std::size_t i = 0; i + 1 < pts.size(); i++) {
        if (lx >= pts[i].first && lx <= pts[i + 1].first) {
            double t = (lx - pts[i].first) / (pts[i + 1].first - pts[i].first);
            return pts[i].second + t * (pts[i + 1].second - pts[i].second);
        }
    }
    return std::nullopt;
}

std::vector<std::pair<double, double>> usable_loglog(const DecodingCurve& c) {
    std::vector<std::pair<double, double>> pts;
    for (const CurvePoint& pt : c.points) {
        if (pt.failures > 0 && pt.per_round > 0.0 && pt.p > 0.0) {
            pts.emplace_back(std::log(pt.p), std::log(pt.per_round));
        }
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

}  // namespace

std::optional<double> curve_crossing(const DecodingCurve& a, const DecodingCurve& b) {
    auto pa = usable_loglog(a);
    auto pb = usable_loglog(b);
    if (pa.size() < 2 || pb.size() < 2) {
        return std::nullopt;
    }
    // Difference on the union grid of the overlapping range.
    std::vector<double> grid;
    for (const auto& [x, y] : pa) {
        grid.push_back(x);
    }
    for (const auto& [x, y] : pb) {
        grid.push_back(x);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<std::pair<double, double>> diff;
    for (double x : grid) {
        auto ya = log_interp(pa, x);
        auto yb = log_interp(pb, x);
        if (ya && yb) {
            diff.emplace_back(x, *ya - *yb);
        }
    }
    for (std::size_t i = 0; i + 1 < diff.size(); i++) {
        double d0 = diff[i].second, d1 = diff[i + 1].second;
        if (d0 == 0.0) {
            return std::exp(diff[i].first);
        }
        if ((d0 < 0.0) != (d1 < 0.0)) {
            double t = d0 / (d0 - d1);
            return std::exp(diff[i].first + t * (diff[i + 1].first - diff[i].first));
        }
    }
    if (!diff.empty() && diff.back().second == 0.0) {
        return std::exp(diff.back().first);
    }
    return std::nullopt;
}

std::optional<ThresholdEstimate> estimate_threshold(const std::vector<DecodingCurve>& curves) {
    if (curves.size() < 2) {
        throw std::invalid_argument("estimate_threshold needs at least two curves");
    }
    std::vector<const DecodingCurve*> sorted;
    for (const auto& c : curves) {
        sorted.push_back(&c);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const DecodingCurve* a, const DecodingCurve* b) { return a->N < b->N; });

    std::vector<double> crossings;
    std::optional<double> largest_pair;
    for (std::size_t i = 0; i < sorted.size(); i++) {
        for (std::size_t j = i + 1; j < sorted.size(); j++) {
            auto c = curve_crossing(*sorted[i], *sorted[j]);
            if (c) {
                crossings.push_back(*c);
                if (i == sorted.size() - 2 && j == sorted.size() - 1) {
                    largest_pair = *c;
                }
            }
        }
    }
    if (crossings.empty()) {
        return std::nullopt;
    }
    ThresholdEstimate est;
    est.p_low = *std::min_element(crossings.begin(), crossings.end());
    est.p_high = *std::max_element(crossings.begin(), crossings.end());
    // Finite-size drift: when pairs disagree, the two largest sizes win.
    est.p_mid = largest_pair ? *largest_pair : crossings.back();
    return est;
}

SubthresholdFit fit_subthreshold(const DecodingCurve& curve, double p_th) {
    if (p_th <= 0.0) {
        throw std::invalid_argument("fit_subthreshold: p_th must be positive");
    }
    struct Obs {
        double x, y, w;
    };
    std::vector<Obs> obs;
    for (const CurvePoint& pt : curve.points) {
        if (pt.p >= p_th || pt.failures == 0 || pt.per_round <= 0.0) {
            continue;
        }
        double sigma_log = pt.stderr_ / pt.per_round;
        double w = sigma_log > 0.0 ? 1.0 / (sigma_log * sigma_log) : 1.0;
        obs.push_back({std::log(pt.p / p_th), std::log(pt.per_round), w});
    }
    if (obs.size() < 2) {
        throw InsufficientData("fit_subthreshold: fewer than 2 usable points");
    }
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const Obs& o : obs) {
        sw += o.w;
        sx += o.w * o.x;
        sy += o.w * o.y;
        sxx += o.w * o.x * o.x;
        sxy += o.w * o.x * o.y;
    }
    double denom = sw * sxx - sx * sx;
    if (denom == 0.0) {
        throw InsufficientData("fit_subthreshold: degenerate abscissae");
    }
    SubthresholdFit fit;
    fit.p_th = p_th;
    fit.slope_free = (sw * sxy - sx * sy) / denom;
    double intercept = (sy - fit.slope_free * sx) / sw;
    fit.a = std::exp(intercept);
    fit.d_e = (curve.D + 1) / 2;
    // Constrained fit: slope pinned to the effective distance.
    double c_intercept = (sy - static_cast<double>(fit.d_e) * sx) / sw;
    fit.a_constrained = std::exp(c_intercept);
    fit.beta = fit.slope_free / std::sqrt(static_cast<double>(curve.N));
    // N = (lambda D - k)^2 + (lambda D)^2  =>  lambda D = (k + sqrt(2N - k^2)) / 2.
    double disc = 2.0 * curve.N - static_cast<double>(curve.k) * curve.k;
    fit.lambda_k = disc >= 0.0 && curve.D > 0
                       ? (curve.k + std::sqrt(disc)) / (2.0 * curve.D)
                       : 0.0;
    double ss = 0.0;
    for (const Obs& o : obs) {
        double r = o.y - (intercept + fit.slope_free * o.x);
        ss += o.w * r * r;
    }
    fit.residual = std::sqrt(ss / sw);
    fit.points_used = static_cast<uint32_t>(obs.size());
    return fit;
}

CrossingReport crossing_point(double a_ldpc, double p_th_ldpc, double beta_ldpc, double a_sc,
                              double p_th_sc, double beta_sc, double n_qubits) {
    if (beta_sc == beta_ldpc) {
        throw DegenerateExponents("crossing_point: equal exponents");
    }
    double inv = 1.0 / (beta_sc - beta_ldpc);
    double first = std::pow(std::pow(p_th_sc, beta_sc) / std::pow(p_th_ldpc, beta_ldpc), inv);
    double bracket = std::pow(a_ldpc / a_sc, inv);
    CrossingReport out;
    out.p_star_limit = first;
    out.p_star = first * std::pow(bracket, 1.0 / std::sqrt(n_qubits));
    return out;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string csv_header() { return "family,k,n,N,K,D,noise,p,shots,failures,p_L,P_L,stderr"; }

std::string csv_row(const DecodingCurve& curve, const CurvePoint& pt) {
    std::ostringstream out;
    out << curve.family << "," << curve.k << "," << curve.n << "," << curve.N << "," << curve.K << ","
        << curve.D << "," << curve.noise << "," << fmt_double(pt.p) << "," << pt.shots << ","
        << pt.failures << "," << fmt_double(pt.p_l) << "," << fmt_double(pt.per_round) << ","
        << fmt_double(pt.stderr_);
    return out.str();
}

void write_csv(std::ostream& out, const std::vector<DecodingCurve>& curves) {
    out << csv_header() << "\n";
    for (const auto& c : curves) {
        for (const auto& pt : c.points) {
            out << csv_row(c, pt) << "\n";
        }
    }
}

std::vector<DecodingCurve> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != csv_header()) {
        throw std::runtime_error("csv: bad header");
    }
    std::map<std::string, DecodingCurve> by_key;
    std::vector<std::string> key_order;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            f.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (f.size() != 13) {
            throw std::runtime_error("csv: wrong column count");
        }
        std::string key = f[0] + "," + f[1] + "," + f[2] + "," + f[6];
        auto [it, fresh] = by_key.try_emplace(key);
        DecodingCurve& c = it->second;
        if (fresh) {
            c.family = f[0];
            c.k = static_cast<uint32_t>(std::stoul(f[1]));
            c.n = static_cast<uint32_t>(std::stoul(f[2]));
            c.N = static_cast<uint32_t>(std::stoul(f[3]));
            c.K = static_cast<uint32_t>(std::stoul(f[4]));
            c.D = static_cast<uint32_t>(std::stoul(f[5]));
            c.noise = f[6];
            c.rounds = c.D;
            key_order.push_back(key);
        }
        CurvePoint pt;
        pt.p = std::stod(f[7]);
        pt.shots = std::stoull(f[8]);
        pt.failures = std::stoull(f[9]);
        pt.p_l = std::stod(f[10]);
        pt.per_round = std::stod(f[11]);
        pt.stderr_ = std::stod(f[12]);
        c.points.push_back(pt);
    }
    std::vector<DecodingCurve> out;
    for (const auto& key : key_order) {
        out.push_back(by_key[key]);
    }
    return out;
}

std::vector<DecodingCurve> read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open csv: " + path);
    }
    return read_csv(in);
}

}  // namespace lacross
