#include "lacross/rydberg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "lacross/circuit.hpp"

namespace lacross {

namespace {
constexpr double kBoltzmann = 1.380649e-23;  // J/K
}

void RydbergConfig::validate() const {
    for (double v : {lattice_spacing_m, temperature_k, atomic_mass_kg, k_eff_per_m, omega_ref,
                     gamma_ref, b_ref, tau_ref_s}) {
        if (!(v > 0.0)) {
            throw std::invalid_argument("rydberg config values must be positive");
        }
    }
    if (blockade_factor < 1.0) {
        throw std::invalid_argument("blockade factor must be >= 1");
    }
    if (n_ref < 1) {
        throw std::invalid_argument("n_ref must be positive");
    }
}

double doppler_dephasing(const RydbergConfig& cfg) {
    return cfg.k_eff_per_m * std::sqrt(kBoltzmann * cfg.temperature_k / cfg.atomic_mass_kg);
}

double cz_infidelity(double gamma, double omega, double delta) {
    if (!(omega > 0.0) || gamma < 0.0 || delta < 0.0) {
        throw std::invalid_argument("cz_infidelity: bad arguments");
    }
    return 2.96 * gamma / omega + 7.12 * delta * delta / (omega * omega);
}

double omega_at(double n, const RydbergConfig& cfg) {
    return cfg.omega_ref * std::pow(cfg.n_ref / n, 1.5);
}

double gamma_at(double n, const RydbergConfig& cfg) {
    return cfg.gamma_ref * std::pow(cfg.n_ref / n, 3.0);
}

double blockade_at(double n, double distance_m, const RydbergConfig& cfg) {
    return cfg.b_ref * std::pow(n / cfg.n_ref, 11.0) *
           std::pow(cfg.lattice_spacing_m / distance_m, 6.0);
}

OptimalN optimal_n(uint32_t j, const RydbergConfig& cfg, bool continuous) {
    cfg.validate();
    if (j < 1) {
        throw std::invalid_argument("optimal_n: j must be >= 1");
    }
    const double d = j * cfg.lattice_spacing_m;
    const double delta = doppler_dephasing(cfg);

    // Blockade bound: B(n, d) >= f Omega(n)  <=>  (n/n_ref)^(25/2) >= f Omega_ref j^6 / B_ref.
    const double ratio = cfg.blockade_factor * cfg.omega_ref * std::pow(static_cast<double>(j), 6.0) /
                         cfg.b_ref;
    const double n_lo = cfg.n_ref * std::pow(ratio, 2.0 / 25.0);

    double n_hi = static_cast<double>(cfg.n_search_cap);
    auto cap = cfg.n_max_of_j.find(j);
    if (cap != cfg.n_max_of_j.end()) {
        n_hi = std::min(n_hi, static_cast<double>(cap->second));
    }

    auto infid = [&](double n) { return cz_infidelity(gamma_at(n, cfg), omega_at(n, cfg), delta); };

    // Unconstrained minimum of A n^-3/2 + B n^3.
    const double term_a = 2.96 * (cfg.gamma_ref / cfg.omega_ref) * std::pow(cfg.n_ref, 1.5);
    const double term_b =
        7.12 * std::pow(delta / cfg.omega_ref, 2.0) / std::pow(static_cast<double>(cfg.n_ref), 3.0);
    const double n_star = std::pow(term_a / (2.0 * term_b), 2.0 / 9.0);

    OptimalN out;
    if (continuous) {
        if (n_lo > n_hi) {
            throw InfeasibleError("optimal_n: empty window at j=" + std::to_string(j));
        }
        double n = std::clamp(n_star, n_lo, n_hi);
        out.n = n;
        out.infidelity = infid(n);
        out.at_lower_bound = n == n_lo;
        return out;
    }

    uint32_t lo = static_cast<uint32_t>(std::ceil(n_lo));
    // pow can land a hair above/below the exact integer boundary
    while (lo > 1 && blockade_at(lo - 1, d, cfg) >= cfg.blockade_factor * omega_at(lo - 1, cfg)) {
        lo--;
    }
    while (blockade_at(lo, d, cfg) < cfg.blockade_factor * omega_at(lo, cfg)) {
        lo++;
    }
    uint32_t hi = static_cast<uint32_t>(std::floor(n_hi));
    if (lo > hi) {
        throw InfeasibleError("optimal_n: empty window at j=" + std::to_string(j));
    }
    // The infidelity is unimodal in n; scan the window up to a little past
    // the unconstrained optimum.
    uint32_t scan_hi = std::min<uint32_t>(hi, std::max<uint32_t>(lo + 2, static_cast<uint32_t>(n_star) + 2));
    uint32_t best = lo;
    double best_f = infid(lo);
    for (uint32_t n = lo + 1; n <= scan_hi; n++) {
        double f = infid(n);
        if (f < best_f) {
            best_f = f;
            best = n;
        }
    }
    out.n = best;
    out.infidelity = best_f;
    out.at_lower_bound = best == lo;
    return out;
}

std::map<uint32_t, double> RangeErrorTable::c_map() const {
    std::map<uint32_t, double> m;
    for (std::size_t i = 0; i < j.size(); i++) {
        m[j[i]] = c[i];
    }
    return m;
}

RangeErrorTable range_table(const RydbergConfig& cfg, uint32_t j_max, RangeTableMode mode) {
    if (j_max < 1) {
        throw std::invalid_argument("range_table: j_max must be >= 1");
    }
    RangeErrorTable t;
    if (mode == RangeTableMode::Paper) {
        const std::map<uint32_t, double> ref = default_c_table();
        if (j_max > ref.rbegin()->first) {
            throw std::invalid_argument("paper c table covers ranges 1..7 only");
        }
        for (uint32_t j = 1; j <= j_max; j++) {
            t.j.push_back(j);
            t.c.push_back(ref.at(j));
            t.n.push_back(0.0);
            t.infidelity.push_back(0.0);
            t.tau_s.push_back(cfg.tau_ref_s * std::pow(static_cast<double>(j), 18.0 / 25.0));
        }
        return t;
    }
    double f1 = 0.0;
    for (uint32_t j = 1; j <= j_max; j++) {
        OptimalN opt = optimal_n(j, cfg);
        if (j == 1) {
            f1 = opt.infidelity;
        }
        t.j.push_back(j);
        t.c.push_back(opt.infidelity / f1);
        t.n.push_back(opt.n);
        t.infidelity.push_back(opt.infidelity);
        t.tau_s.push_back(cfg.tau_ref_s * std::pow(static_cast<double>(j), 18.0 / 25.0));
    }
    return t;
}

namespace {

struct StabInfo {
    uint32_t id;
    int32_t ax, ay;        // ancilla position
    int32_t rx, ry;        // subregion indices
    uint32_t offset;       // local offset key (v * S + u)
    bool is_x;
};

std::vector<StabInfo> collect_stabs(const CssCode& code, const QubitLayout& layout, uint32_t side) {
    std::vector<StabInfo> out;
    const uint32_t nx = code.num_x_stabs();
    const uint32_t nz = code.num_z_stabs();
    for (uint32_t s = 0; s < nx + nz; s++) {
        uint32_t anc = code.N + s;
        auto [x, y] = layout.coords[anc];
        StabInfo si;
        si.id = s;
        si.ax = x;
        si.ay = y;
        si.rx = x / static_cast<int32_t>(side);
        si.ry = y / static_cast<int32_t>(side);
        si.offset = static_cast<uint32_t>(y % side) * side + static_cast<uint32_t>(x % side);
        si.is_x = s < nx;
        out.push_back(si);
    }
    return out;
}

}  // namespace

ParallelSchedule parallel_schedule(const CssCode& code, const QubitLayout& layout) {
    if (layout.coords.size() != code.num_qubits_total()) {
        throw std::invalid_argument("layout inconsistent with code");
    }
    const uint32_t k = std::max(code.seed_a.k, code.seed_b.k);
    ParallelSchedule sched;
    sched.subregion_side = 2 * (k + 1);

    std::vector<StabInfo> stabs = collect_stabs(code, layout, sched.subregion_side);
    std::set<uint32_t> offsets;
    for (const auto& s : stabs) {
        offsets.insert(s.offset);
    }
    std::map<uint32_t, uint32_t> group_of_offset;
    uint32_t g = 0;
    for (uint32_t off : offsets) {
        group_of_offset[off] = g++;
    }
    sched.num_groups = g;
    sched.groups.resize(g);
    for (const auto& s : stabs) {
        sched.groups[group_of_offset[s.offset]].push_back(s.id);
    }
    return sched;
}

namespace {

uint32_t chebyshev(const QubitLayout& layout, int32_t x1, int32_t y1, int32_t x2, int32_t y2) {
    int32_t dx = std::abs(x1 - x2);
    int32_t dy = std::abs(y1 - y2);
    if (layout.mode == LayoutMode::PBC) {
        dx = std::min(dx, layout.period_x - dx);
        dy = std::min(dy, layout.period_y - dy);
    }
    return static_cast<uint32_t>(std::max(dx, dy));
}

}  // namespace

ScheduleCheck validate_schedule(const CssCode& code, const QubitLayout& layout,
                                const ParallelSchedule& sched) {
    ScheduleCheck chk;
    const uint32_t k = std::max(code.seed_a.k, code.seed_b.k);
    const uint32_t nx = code.num_x_stabs();
    const uint32_t total = nx + code.num_z_stabs();

    std::vector<uint32_t> seen(total, 0);
    for (const auto& grp : sched.groups) {
        for (uint32_t id : grp) {
            seen[id]++;
        }
    }
    chk.covered_once = std::all_of(seen.begin(), seen.end(), [](uint32_t c) { return c == 1; });
    chk.groups_expected = sched.num_groups == 2 * (k + 1) * (k + 1);

    // Per-stabilizer gate list: near gates in circuit layer order, then arms.
    struct Gate {
        int32_t ax, ay, dx, dy;  // ancilla position and data offset
    };
    // sub-phase key: near phases 0..3, then (type, orientation, region parity)
    struct Active {
        uint32_t phase;
        Gate gate;
        int32_t rx, ry;
        uint32_t id;
    };
    std::vector<Active> active;

    auto support_offsets = [&](uint32_t id) {
        const bool is_x = id < nx;
        const BinaryMatrix& h = is_x ? code.h_x : code.h_z;
        uint32_t row = is_x ? id : id - nx;
        uint32_t anc = code.N + id;
        auto [ax, ay] = layout.coords[anc];
        std::vector<std::pair<int32_t, int32_t>> offs;
        for (uint32_t q = 0; q < code.N; q++) {
            if (!h.get(row, q)) {
                continue;
            }
            auto [qx, qy] = layout.coords[q];
            int32_t dx = qx - ax;
            int32_t dy = qy - ay;
            if (layout.mode == LayoutMode::PBC) {
                if (dx > layout.period_x / 2) dx -= layout.period_x;
                if (dx < -layout.period_x / 2) dx += layout.period_x;
                if (dy > layout.period_y / 2) dy -= layout.period_y;
                if (dy < -layout.period_y / 2) dy += layout.period_y;
            }
            offs.emplace_back(dx, dy);
        }
        return offs;
    };

    chk.max_gate_range = 0;
    const uint32_t side = sched.subregion_side;
    for (uint32_t g = 0; g < sched.num_groups; g++) {
        for (uint32_t id : sched.groups[g]) {
            uint32_t anc = code.N + id;
            auto [ax, ay] = layout.coords[anc];
            int32_t rx = ax / static_cast<int32_t>(side);
            int32_t ry = ay / static_cast<int32_t>(side);
            bool is_x = id < nx;
            for (auto [dx, dy] : support_offsets(id)) {
                uint32_t range = static_cast<uint32_t>(std::max(std::abs(dx), std::abs(dy)));
                chk.max_gate_range = std::max(chk.max_gate_range, range);
                uint32_t phase;
                if (std::abs(dx) + std::abs(dy) == 1) {
                    // near phases follow the circuit pairing: X sweeps
                    // N,E,W,S while Z sweeps N,W,E,S
                    int dir = dy == 1 ? 0 : (dx == 1 ? 1 : (dx == -1 ? 2 : 3));
                    static constexpr int kInvX[4] = {0, 1, 2, 3};
                    static constexpr int kInvZ[4] = {0, 2, 1, 3};
                    phase = is_x ? kInvX[dir] : kInvZ[dir];
                } else {
                    bool vertical = dx == 0;
                    uint32_t parity = static_cast<uint32_t>((rx + ry) & 1);
                    phase = 4 + (is_x ? 0 : 4) + (vertical ? 0 : 2) + parity;
                }
                active.push_back({g * 16 + phase, Gate{ax, ay, dx, dy}, rx, ry, id});
            }
        }
    }

    // Same-group ancillas are simultaneously in use for the whole group slot.
    chk.min_ancilla_separation = UINT32_MAX;
    for (const auto& grp : sched.groups) {
        for (std::size_t i = 0; i < grp.size(); i++) {
            auto [x1, y1] = layout.coords[code.N + grp[i]];
            for (std::size_t j2 = i + 1; j2 < grp.size(); j2++) {
                auto [x2, y2] = layout.coords[code.N + grp[j2]];
                chk.min_ancilla_separation =
                    std::min(chk.min_ancilla_separation, chebyshev(layout, x1, y1, x2, y2));
            }
        }
    }

    std::sort(active.begin(), active.end(),
              [](const Active& a, const Active& b) { return a.phase < b.phase; });
    chk.min_simultaneous_atom_distance = UINT32_MAX;
    for (std::size_t i = 0; i < active.size(); i++) {
        for (std::size_t j2 = i + 1; j2 < active.size() && active[j2].phase == active[i].phase; j2++) {
            const Active& a = active[i];
            const Active& b = active[j2];
            if (a.id == b.id) {
                continue;
            }
            for (auto [x1, y1] : {std::pair{a.gate.ax, a.gate.ay},
                                  std::pair{a.gate.ax + a.gate.dx, a.gate.ay + a.gate.dy}}) {
                for (auto [x2, y2] : {std::pair{b.gate.ax, b.gate.ay},
                                      std::pair{b.gate.ax + b.gate.dx, b.gate.ay + b.gate.dy}}) {
                    chk.min_simultaneous_atom_distance =
                        std::min(chk.min_simultaneous_atom_distance, chebyshev(layout, x1, y1, x2, y2));
                }
            }
        }
    }
    chk.blockade_disjoint = chk.min_ancilla_separation > chk.max_gate_range &&
                            chk.min_simultaneous_atom_distance > chk.max_gate_range;
    return chk;
}

}  // namespace lacross
