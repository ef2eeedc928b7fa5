#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lacross/codes.hpp"

namespace lacross {

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Physical parameters for range-dependent CZ gates between Rydberg-coupled
/// atoms on a square lattice. Reference values are quoted at n_ref; power
/// laws Omega ~ n^-3/2, gamma ~ n^-3, B ~ n^11 / d^6 scale them elsewhere.
struct RydbergConfig {
    double lattice_spacing_m = 3e-6;
    double temperature_k = 10e-6;
    // Cesium-133.
    double atomic_mass_kg = 2.2069468e-25;
    // Two-photon transition via 7p_1/2, 459.4 nm + 1038 nm, co-propagating.
    double k_eff_per_m = 2.0 * 3.14159265358979323846 * (1.0 / 459.4e-9 + 1.0 / 1038e-9);
    uint32_t n_ref = 75;
    double omega_ref = 2.0 * 3.14159265358979323846 * 1.9e6;  // rad/s at n_ref
    double gamma_ref = 1.0 / 430e-6;                          // 1/s at n_ref
    // Van der Waals strength at (n_ref, lattice spacing); configuration input
    // of order the Cs 75s coefficient, not a measured constant.
    double b_ref = 2.0 * 3.14159265358979323846 * 2.0e9;
    double blockade_factor = 3.0;
    double tau_ref_s = 250e-9;  // nearest-neighbor gate duration
    // Per-range cap on n standing in for the breakdown of the perturbative
    // pair-state picture at high n; empty means uncapped.
    std::map<uint32_t, uint32_t> n_max_of_j;
    uint32_t n_search_cap = 400;

    void validate() const;
};

double doppler_dephasing(const RydbergConfig& cfg);

/// 1 - F = 2.96 gamma/Omega + 7.12 Delta^2/Omega^2.
double cz_infidelity(double gamma, double omega, double delta);

double omega_at(double n, const RydbergConfig& cfg);
double gamma_at(double n, const RydbergConfig& cfg);
double blockade_at(double n, double distance_m, const RydbergConfig& cfg);

struct OptimalN {
    double n = 0.0;  // integer-valued unless continuous
    double infidelity = 0.0;
    bool at_lower_bound = false;  // minimum sits at the blockade boundary
};

/// Minimizes the CZ infidelity over n subject to B(n, j R) >= blockade_factor
/// * Omega(n) and n <= n_max(j). Throws InfeasibleError on an empty window.
OptimalN optimal_n(uint32_t j, const RydbergConfig& cfg, bool continuous = false);

enum class RangeTableMode { Paper, Model };

struct RangeErrorTable {
    std::vector<uint32_t> j;
    std::vector<double> c;           // (1-F_j) / (1-F_1)
    std::vector<double> n;           // chosen principal quantum number (model mode)
    std::vector<double> infidelity;  // 1-F_j (model mode)
    std::vector<double> tau_s;       // tau_ref * j^(18/25)

    std::map<uint32_t, double> c_map() const;
};

/// Model mode derives c_j from the physics above; paper mode emits the fixed
/// reference table (1, 1.6, 2.5, 3.6, 4.8, 6.1, 7.5) for ranges 1..7.
RangeErrorTable range_table(const RydbergConfig& cfg, uint32_t j_max,
                            RangeTableMode mode = RangeTableMode::Model);

/// Blockade-safe stabilizer scheduling: the lattice is tiled by square
/// subregions of side 2(k+1); each group measures one stabilizer per
/// subregion, all subregions in parallel, giving 2(k+1)^2 groups.
struct ParallelSchedule {
    uint32_t subregion_side = 0;
    uint32_t num_groups = 0;
    // groups[g] lists stabilizer ids; X stabilizers come first (0..nx-1),
    // then Z stabilizers (nx..nx+nz-1).
    std::vector<std::vector<uint32_t>> groups;
};

ParallelSchedule parallel_schedule(const CssCode& code, const QubitLayout& layout);

struct ScheduleCheck {
    bool covered_once = false;
    bool groups_expected = false;       // group count == 2(k+1)^2
    uint32_t max_gate_range = 0;
    uint32_t min_ancilla_separation = 0;  // same-group pairwise Chebyshev distance
    // Minimum atom-atom distance between simultaneously driven gate pairs,
    // with arm gates staggered over a region checkerboard.
    uint32_t min_simultaneous_atom_distance = 0;
    bool blockade_disjoint = false;  // both distances exceed max_gate_range
};

ScheduleCheck validate_schedule(const CssCode& code, const QubitLayout& layout,
                                const ParallelSchedule& sched);

}  // namespace lacross
