#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lacross/gf2.hpp"

namespace lacross {

enum class Boundary { PBC, OBC };
enum class PolyKind { ThreeTerm, TwoTerm };  // 1 + x + x^k  /  1 + x^k

/// Classical cyclic seed code defined by a polynomial with unit coefficients.
struct SeedCode {
    uint32_t n = 0;          // bit count
    uint32_t k = 0;          // polynomial degree
    std::vector<uint32_t> poly;  // exponents with coefficient 1, always includes 0
    Boundary boundary = Boundary::OBC;
    BinaryMatrix h;          // PBC: n x n circulant; OBC: (n-k) x n staircase
    uint32_t r = 0;          // check count = rows of h
    uint32_t k_logical = 0;  // n - rank(h)
    uint32_t distance = kNoDistance;    // min codeword weight, kNoDistance when trivial code
    uint32_t distance_t = kNoDistance;  // distance of the transposed code

    static constexpr uint32_t kNoDistance = UINT32_MAX;
};

SeedCode build_seed(uint32_t n, uint32_t k, Boundary boundary, PolyKind poly = PolyKind::ThreeTerm);

enum class Role : uint8_t { Data, AncillaX, AncillaZ };
enum class LayoutMode { PBC, OBC, SqueezedOBC };

/// Integer lattice positions for all data and ancilla qubits.
///
/// Qubit ids: primal data (i,j) -> i*n2+j, dual data (a,b) -> n1*n2 + a*r2+b,
/// then X ancillas (one per row of H_X) and Z ancillas (one per row of H_Z).
struct QubitLayout {
    LayoutMode mode = LayoutMode::OBC;
    std::vector<std::array<int32_t, 2>> coords;  // [qubit] -> (x, y)
    std::vector<Role> roles;
    int32_t period_x = 0;  // PBC wrap periods, 0 when open
    int32_t period_y = 0;
};

/// CSS code produced by the hypergraph product of two seeds.
struct CssCode {
    SeedCode seed_a;  // rules the vertical direction
    SeedCode seed_b;  // rules the horizontal direction
    uint32_t N = 0;
    uint32_t K = 0;
    BinaryMatrix h_x;  // [H1 (x) I_n2 | I_r1 (x) H2^T]
    BinaryMatrix h_z;  // [I_n1 (x) H2  | H1^T (x) I_r2]
    BinaryMatrix logicals_x;  // K x N
    BinaryMatrix logicals_z;  // K x N
    std::optional<uint32_t> d_bound;
    std::optional<uint32_t> d_exact;

    uint32_t n1() const { return seed_a.n; }
    uint32_t n2() const { return seed_b.n; }
    uint32_t r1() const { return seed_a.r; }
    uint32_t r2() const { return seed_b.r; }
    uint32_t primal_count() const { return n1() * n2(); }
    uint32_t num_x_stabs() const { return static_cast<uint32_t>(h_x.rows()); }
    uint32_t num_z_stabs() const { return static_cast<uint32_t>(h_z.rows()); }
    uint32_t num_qubits_total() const { return N + num_x_stabs() + num_z_stabs(); }

    uint32_t primal_qubit(uint32_t i, uint32_t j) const { return i * n2() + j; }
    uint32_t dual_qubit(uint32_t a, uint32_t b) const { return primal_count() + a * r2() + b; }
    uint32_t x_ancilla(uint32_t a, uint32_t j) const { return N + a * n2() + j; }
    uint32_t z_ancilla(uint32_t i, uint32_t b) const { return N + num_x_stabs() + i * r2() + b; }
};

CssCode hypergraph_product(const SeedCode& a, const SeedCode& b);

/// K independent X logicals spanning ker(H_Z) mod rowspace(H_X), and the Z
/// mirror, paired so the overlap-parity matrix between the bases is identity.
std::pair<BinaryMatrix, BinaryMatrix> logical_basis(const CssCode& code);

QubitLayout assign_layout(const CssCode& code, LayoutMode mode);

uint32_t gate_range(const QubitLayout& layout, uint32_t qubit_a, uint32_t qubit_b);

/// Minimum weight of a logical operator among weights <= w_max, or nullopt.
std::optional<uint32_t> distance_bruteforce(const CssCode& code, uint32_t w_max);

std::string code_to_text(const CssCode& code, const QubitLayout* layout = nullptr);
struct LoadedCode {
    CssCode code;
    std::optional<QubitLayout> layout;
};
LoadedCode code_from_text(std::istream& in);
LoadedCode code_from_text(const std::string& text);
LoadedCode load_code_file(const std::string& path);
void save_code_file(const std::string& path, const CssCode& code, const QubitLayout* layout = nullptr);

}  // namespace lacross
