#include "lacross/codes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lacross {

namespace {

/// Minimum weight over the span of a kernel basis (exact, 2^dim - 1 combos).
uint32_t min_span_weight(const std::vector<BitVec>& basis) {
    if (basis.empty()) {
        return SeedCode::kNoDistance;
    }
    if (basis.size() > 24) {
        throw std::runtime_error("seed kernel too large for exhaustive distance");
    }
    uint32_t best = SeedCode::kNoDistance;
    const uint64_t combos = uint64_t{1} << basis.size();
    for (uint64_t mask = 1; mask < combos; mask++) {
        BitVec v(basis[0].size());
        for (std::size_t i = 0; i < basis.size(); i++) {
            if ((mask >> i) & 1) {
                v.xor_in(basis[i]);
            }
        }
        best = std::min<uint32_t>(best, static_cast<uint32_t>(v.popcount()));
    }
    return best;
}

}  // namespace

SeedCode build_seed(uint32_t n, uint32_t k, Boundary boundary, PolyKind poly) {
    if (k < 1 || k >= n) {
        throw std::invalid_argument("build_seed requires 1 <= k < n");
    }
    SeedCode s;
    s.n = n;
    s.k = k;
    s.boundary = boundary;
    if (poly == PolyKind::ThreeTerm) {
        s.poly = {0, 1, k};
    } else {
        s.poly = {0, k};
    }
    std::sort(s.poly.begin(), s.poly.end());
    s.poly.erase(std::unique(s.poly.begin(), s.poly.end()), s.poly.end());

    if (boundary == Boundary::PBC) {
        s.h = BinaryMatrix(n, n);
        for (uint32_t i = 0; i < n; i++) {
            for (uint32_t e : s.poly) {
                s.h.set(i, (i + e) % n);
            }
        }
    } else {
        s.h = BinaryMatrix(n - k, n);
        for (uint32_t i = 0; i < n - k; i++) {
            for (uint32_t e : s.poly) {
                s.h.set(i, i + e);
            }
        }
    }
    s.r = static_cast<uint32_t>(s.h.rows());
    s.k_logical = n - static_cast<uint32_t>(rank(s.h));
    s.distance = min_span_weight(kernel_basis(s.h));
    s.distance_t = min_span_weight(kernel_basis(s.h.transposed()));
    return s;
}

namespace {

/// Greedy weight/bounding-box reduction of logical rows by stabilizer
/// additions. Best-effort: correctness only needs a valid symplectic basis.
void align_logicals(BinaryMatrix& logicals, const BinaryMatrix& stabs, const CssCode& code) {
    auto coord = [&](uint32_t q) -> std::array<int32_t, 2> {
        if (q < code.primal_count()) {
            uint32_t i = q / code.n2();
            uint32_t j = q % code.n2();
            return {static_cast<int32_t>(2 * j), static_cast<int32_t>(2 * i)};
        }
        uint32_t d = q - code.primal_count();
        uint32_t a = d / code.r2();
        uint32_t b = d % code.r2();
        return {static_cast<int32_t>(2 * b + 1), static_cast<int32_t>(2 * a + 1)};
    };
    auto cost = [&](const BitVec& v) -> std::pair<uint64_t, uint64_t> {
        int32_t xmin = INT32_MAX, xmax = INT32_MIN, ymin = INT32_MAX, ymax = INT32_MIN;
        uint64_t w = 0;
        for (std::size_t q = 0; q < v.size(); q++) {
            if (!v.get(q)) {
                continue;
            }
            w++;
            auto [x, y] = coord(static_cast<uint32_t>(q));
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
        if (w == 0) {
            return {0, 0};
        }
        uint64_t area = static_cast<uint64_t>(xmax - xmin + 1) * static_cast<uint64_t>(ymax - ymin + 1);
        return {w, area};
    };

    for (std::size_t li = 0; li < logicals.rows(); li++) {
        BitVec cur = logicals.row(li);
        auto cur_cost = cost(cur);
        bool improved = true;
        int guard = 0;
        while (improved && guard++ < 200) {
            improved = false;
            for (std::size_t si = 0; si < stabs.rows(); si++) {
                BitVec cand = cur;
                cand.xor_in(stabs.row(si));
                auto cand_cost = cost(cand);
                if (cand_cost < cur_cost) {
                    cur = cand;
                    cur_cost = cand_cost;
                    improved = true;
                }
            }
        }
        logicals.set_row(li, cur);
    }
}

/// Inverse of a K x K invertible matrix over GF(2) via [M | I] reduction.
BinaryMatrix invert(const BinaryMatrix& m) {
    const std::size_t n = m.rows();
    BinaryMatrix aug = BinaryMatrix::hconcat(m, BinaryMatrix::identity(n));
    Rref rr = row_reduce(aug);
    for (std::size_t i = 0; i < n; i++) {
        if (i >= rr.pivot_cols.size() || rr.pivot_cols[i] != i) {
            throw std::runtime_error("overlap-parity matrix is singular");
        }
    }
    BinaryMatrix inv(n, n);
    for (std::size_t r = 0; r < n; r++) {
        for (std::size_t c = 0; c < n; c++) {
            if (rr.r.get(r, n + c)) {
                inv.set(r, c);
            }
        }
    }
    return inv;
}

BinaryMatrix quotient_basis(const BinaryMatrix& kernel_of, const BinaryMatrix& modulo, uint32_t expected) {
    RowSpace span(modulo);
    std::vector<BitVec> reps;
    for (const BitVec& v : kernel_basis(kernel_of)) {
        BitVec w = span.reduce(v);
        if (span.extend(w)) {
            reps.push_back(std::move(w));
        }
    }
    if (reps.size() != expected) {
        throw std::runtime_error("logical operator count does not match K");
    }
    BinaryMatrix out(expected, kernel_of.cols());
    for (std::size_t i = 0; i < reps.size(); i++) {
        out.set_row(i, reps[i]);
    }
    return out;
}

}  // namespace

std::pair<BinaryMatrix, BinaryMatrix> logical_basis(const CssCode& code) {
    BinaryMatrix lx = quotient_basis(code.h_z, code.h_x, code.K);
    BinaryMatrix lz = quotient_basis(code.h_x, code.h_z, code.K);

    // Pair the bases: with M[i][j] = <lx_i, lz_j>, replacing lx by M^-1 lx
    // makes the overlap-parity matrix the identity.
    BinaryMatrix overlap(code.K, code.K);
    for (uint32_t i = 0; i < code.K; i++) {
        BitVec xi = lx.row(i);
        for (uint32_t j = 0; j < code.K; j++) {
            if (xi.dot(lz.row(j))) {
                overlap.set(i, j);
            }
        }
    }
    lx = invert(overlap).mul(lx);

    align_logicals(lx, code.h_x, code);
    align_logicals(lz, code.h_z, code);
    return {lx, lz};
}

CssCode hypergraph_product(const SeedCode& a, const SeedCode& b) {
    if (a.boundary != b.boundary) {
        throw std::invalid_argument("hypergraph_product requires matching boundary types");
    }
    CssCode c;
    c.seed_a = a;
    c.seed_b = b;
    const BinaryMatrix in1 = BinaryMatrix::identity(a.n);
    const BinaryMatrix in2 = BinaryMatrix::identity(b.n);
    const BinaryMatrix ir1 = BinaryMatrix::identity(a.r);
    const BinaryMatrix ir2 = BinaryMatrix::identity(b.r);
    c.h_x = BinaryMatrix::hconcat(a.h.kron(in2), ir1.kron(b.h.transposed()));
    c.h_z = BinaryMatrix::hconcat(in1.kron(b.h), a.h.transposed().kron(ir2));
    c.N = a.n * b.n + a.r * b.r;

    const uint32_t k1t = a.r - static_cast<uint32_t>(rank(a.h));
    const uint32_t k2t = b.r - static_cast<uint32_t>(rank(b.h));
    c.K = a.k_logical * b.k_logical + k1t * k2t;

    if (!c.h_x.mul(c.h_z.transposed()).is_zero()) {
        throw std::runtime_error("CSS commutation violated");
    }

    uint32_t bound = SeedCode::kNoDistance;
    for (uint32_t d : {a.distance, b.distance, a.distance_t, b.distance_t}) {
        bound = std::min(bound, d);
    }
    if (bound != SeedCode::kNoDistance) {
        c.d_bound = bound;
    }

    if (c.K > 0) {
        std::tie(c.logicals_x, c.logicals_z) = logical_basis(c);
    } else {
        c.logicals_x = BinaryMatrix(0, c.N);
        c.logicals_z = BinaryMatrix(0, c.N);
    }
    return c;
}

QubitLayout assign_layout(const CssCode& code, LayoutMode mode) {
    const Boundary bc = code.seed_a.boundary;
    if ((mode == LayoutMode::PBC) != (bc == Boundary::PBC)) {
        throw std::invalid_argument("layout mode incompatible with code boundary");
    }
    QubitLayout out;
    out.mode = mode;
    const uint32_t total = code.num_qubits_total();
    out.coords.resize(total);
    out.roles.resize(total);

    for (uint32_t i = 0; i < code.n1(); i++) {
        for (uint32_t j = 0; j < code.n2(); j++) {
            out.coords[code.primal_qubit(i, j)] = {static_cast<int32_t>(2 * j), static_cast<int32_t>(2 * i)};
            out.roles[code.primal_qubit(i, j)] = Role::Data;
        }
    }
    for (uint32_t a = 0; a < code.r1(); a++) {
        for (uint32_t b = 0; b < code.r2(); b++) {
            out.coords[code.dual_qubit(a, b)] = {static_cast<int32_t>(2 * b + 1), static_cast<int32_t>(2 * a + 1)};
            out.roles[code.dual_qubit(a, b)] = Role::Data;
        }
    }
    for (uint32_t a = 0; a < code.r1(); a++) {
        for (uint32_t j = 0; j < code.n2(); j++) {
            out.coords[code.x_ancilla(a, j)] = {static_cast<int32_t>(2 * j), static_cast<int32_t>(2 * a + 1)};
            out.roles[code.x_ancilla(a, j)] = Role::AncillaX;
        }
    }
    for (uint32_t i = 0; i < code.n1(); i++) {
        for (uint32_t b = 0; b < code.r2(); b++) {
            out.coords[code.z_ancilla(i, b)] = {static_cast<int32_t>(2 * b + 1), static_cast<int32_t>(2 * i)};
            out.roles[code.z_ancilla(i, b)] = Role::AncillaZ;
        }
    }

    if (mode == LayoutMode::PBC) {
        out.period_x = static_cast<int32_t>(2 * code.n2());
        out.period_y = static_cast<int32_t>(2 * code.n1());
    } else if (mode == LayoutMode::SqueezedOBC) {
        // Delete empty rows/columns of the staggered embedding and renumber
        // the occupied ones contiguously; boundary arms get shorter.
        std::map<int32_t, int32_t> xs, ys;
        for (const auto& xy : out.coords) {
            xs[xy[0]] = 0;
            ys[xy[1]] = 0;
        }
        int32_t next = 0;
        for (auto& [x, v] : xs) {
            v = next++;
        }
        next = 0;
        for (auto& [y, v] : ys) {
            v = next++;
        }
        for (auto& xy : out.coords) {
            xy = {xs[xy[0]], ys[xy[1]]};
        }
    }
    return out;
}

uint32_t gate_range(const QubitLayout& layout, uint32_t qubit_a, uint32_t qubit_b) {
    if (qubit_a >= layout.coords.size() || qubit_b >= layout.coords.size()) {
        throw std::invalid_argument("gate_range: qubit not in layout");
    }
    auto [xa, ya] = layout.coords[qubit_a];
    auto [xb, yb] = layout.coords[qubit_b];
    int32_t dx = std::abs(xa - xb);
    int32_t dy = std::abs(ya - yb);
    if (layout.mode == LayoutMode::PBC) {
        dx = std::min(dx, layout.period_x - dx);
        dy = std::min(dy, layout.period_y - dy);
    }
    return static_cast<uint32_t>(std::max(dx, dy));
}

namespace {

/// Enumerates weight-w supports with first element `first`, streaming the
/// incremental syndrome; calls sink(v) for in-kernel vectors.
template <typename Sink>
void enumerate_fixed_first(const std::vector<BitVec>& cols, uint32_t nq, uint32_t first, uint32_t w,
                           Sink&& sink) {
    std::vector<uint32_t> support(w);
    support[0] = first;
    BitVec syndrome = cols[first];
    BitVec v(nq);
    v.set(first);

    // Depth-first walk over increasing indices.
    std::vector<uint32_t> stack;
    uint32_t depth = 1;
    uint32_t idx = first + 1;
    while (true) {
        if (depth == w) {
            if (!syndrome.any()) {
                sink(v);
            }
            // backtrack
            if (depth == 1) {
                break;
            }
            depth--;
            uint32_t last = support[depth];
            syndrome.xor_in(cols[last]);
            v.clear(last);
            idx = last + 1;
            continue;
        }
        if (idx + (w - depth) > nq) {
            if (depth == 1) {
                break;
            }
            depth--;
            uint32_t last = support[depth];
            syndrome.xor_in(cols[last]);
            v.clear(last);
            idx = last + 1;
            continue;
        }
        support[depth] = idx;
        syndrome.xor_in(cols[idx]);
        v.set(idx);
        depth++;
        idx++;
    }
}

std::optional<uint32_t> min_logical_weight(const BinaryMatrix& kernel_of, const BinaryMatrix& modulo,
                                           uint32_t w_max) {
    const uint32_t nq = static_cast<uint32_t>(kernel_of.cols());
    std::vector<BitVec> cols(nq, BitVec(kernel_of.rows()));
    for (std::size_t r = 0; r < kernel_of.rows(); r++) {
        for (uint32_t c = 0; c < nq; c++) {
            if (kernel_of.get(r, c)) {
                cols[c].set(r);
            }
        }
    }
    const RowSpace span(modulo);
    for (uint32_t w = 1; w <= w_max; w++) {
        bool found = false;
#pragma omp parallel for schedule(dynamic)
        for (int64_t first = 0; first <= static_cast<int64_t>(nq) - w; first++) {
            bool local = false;
            enumerate_fixed_first(cols, nq, static_cast<uint32_t>(first), w, [&](const BitVec& v) {
                if (!local && !span.contains(v)) {
                    local = true;
                }
            });
            if (local) {
#pragma omp critical
                found = true;
            }
        }
        if (found) {
            return w;
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<uint32_t> distance_bruteforce(const CssCode& code, uint32_t w_max) {
    if (w_max < 1) {
        throw std::invalid_argument("distance_bruteforce requires w_max >= 1");
    }
    auto z_side = min_logical_weight(code.h_z, code.h_x, w_max);  // Z-detected (X-type) logicals
    auto x_side = min_logical_weight(code.h_x, code.h_z, w_max);
    if (z_side && x_side) {
        return std::min(*z_side, *x_side);
    }
    return z_side ? z_side : x_side;
}

namespace {

const char* boundary_name(Boundary b) { return b == Boundary::PBC ? "pbc" : "obc"; }
const char* mode_name(LayoutMode m) {
    switch (m) {
        case LayoutMode::PBC:
            return "pbc";
        case LayoutMode::OBC:
            return "obc";
        default:
            return "squeezed";
    }
}

void write_seed(std::ostream& out, const SeedCode& s) {
    out << "seed " << s.n << " " << s.k << " " << boundary_name(s.boundary) << " poly";
    for (uint32_t e : s.poly) {
        out << " " << e;
    }
    out << "\n";
}

SeedCode read_seed(std::istream& in) {
    uint32_t n = 0, k = 0;
    std::string bname, tag;
    if (!(in >> n >> k >> bname >> tag) || tag != "poly") {
        throw std::runtime_error("code text: bad seed line");
    }
    Boundary b = bname == "pbc" ? Boundary::PBC : Boundary::OBC;
    // The exponent list is re-derived from (n, k, poly kind).
    std::vector<uint32_t> exps;
    uint32_t e = 0;
    while (in >> e) {
        exps.push_back(e);
        if (in.peek() == '\n') {
            break;
        }
    }
    in.clear();
    PolyKind kind = exps.size() == 2 ? PolyKind::TwoTerm : PolyKind::ThreeTerm;
    return build_seed(n, k, b, kind);
}

}  // namespace

std::string code_to_text(const CssCode& code, const QubitLayout* layout) {
    std::ostringstream out;
    out << "lacross-code v1\n";
    write_seed(out, code.seed_a);
    write_seed(out, code.seed_b);
    out << "params " << code.N << " " << code.K << " "
        << (code.d_bound ? static_cast<int64_t>(*code.d_bound) : -1) << " "
        << (code.d_exact ? static_cast<int64_t>(*code.d_exact) : -1) << "\n";
    out << "HX\n" << to_text(code.h_x);
    out << "HZ\n" << to_text(code.h_z);
    out << "LOGX\n" << to_text(code.logicals_x);
    out << "LOGZ\n" << to_text(code.logicals_z);
    if (layout != nullptr) {
        out << "LAYOUT " << mode_name(layout->mode) << "\n";
        for (std::size_t q = 0; q < layout->coords.size(); q++) {
            char role = layout->roles[q] == Role::Data ? 'd' : (layout->roles[q] == Role::AncillaX ? 'x' : 'z');
            out << q << " " << layout->coords[q][0] << " " << layout->coords[q][1] << " " << role << "\n";
        }
    }
    out << "END\n";
    return out.str();
}

LoadedCode code_from_text(std::istream& in) {
    std::string tag, version;
    in >> tag >> version;
    if (tag != "lacross-code" || version != "v1") {
        throw std::runtime_error("not a lacross-code file");
    }
    std::string word;
    if (!(in >> word) || word != "seed") {
        throw std::runtime_error("code text: expected seed");
    }
    SeedCode a = read_seed(in);
    if (!(in >> word) || word != "seed") {
        throw std::runtime_error("code text: expected second seed");
    }
    SeedCode b = read_seed(in);

    int64_t n = 0, k = 0, dbound = -1, dexact = -1;
    if (!(in >> word >> n >> k >> dbound >> dexact) || word != "params") {
        throw std::runtime_error("code text: expected params");
    }

    LoadedCode out;
    out.code = hypergraph_product(a, b);
    if (static_cast<int64_t>(out.code.N) != n || static_cast<int64_t>(out.code.K) != k) {
        throw std::runtime_error("code text: params disagree with rebuilt code");
    }
    if (dexact >= 0) {
        out.code.d_exact = static_cast<uint32_t>(dexact);
    }

    // Matrix blocks are rebuilt deterministically; the stored blocks are
    // verified rather than trusted.
    auto expect_block = [&](const char* name, const BinaryMatrix& want) {
        if (!(in >> word) || word != name) {
            throw std::runtime_error(std::string("code text: expected ") + name);
        }
        BinaryMatrix got = matrix_from_text(in);
        if (!(got == want)) {
            throw std::runtime_error(std::string("code text: block mismatch in ") + name);
        }
    };
    expect_block("HX", out.code.h_x);
    expect_block("HZ", out.code.h_z);
    expect_block("LOGX", out.code.logicals_x);
    expect_block("LOGZ", out.code.logicals_z);

    if (!(in >> word)) {
        throw std::runtime_error("code text: truncated");
    }
    if (word == "LAYOUT") {
        std::string mname;
        in >> mname;
        LayoutMode mode = mname == "pbc" ? LayoutMode::PBC
                                         : (mname == "squeezed" ? LayoutMode::SqueezedOBC : LayoutMode::OBC);
        out.layout = assign_layout(out.code, mode);
        for (std::size_t q = 0; q < out.layout->coords.size(); q++) {
            uint64_t id = 0;
            int32_t x = 0, y = 0;
            char role = 0;
            if (!(in >> id >> x >> y >> role)) {
                throw std::runtime_error("code text: bad layout row");
            }
            if (id != q || out.layout->coords[q][0] != x || out.layout->coords[q][1] != y) {
                throw std::runtime_error("code text: layout disagrees with rebuilt layout");
            }
        }
        in >> word;
    }
    if (word != "END") {
        throw std::runtime_error("code text: missing END");
    }
    return out;
}

LoadedCode code_from_text(const std::string& text) {
    std::istringstream in(text);
    return code_from_text(in);
}

LoadedCode load_code_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open code file: " + path);
    }
    return code_from_text(in);
}

void save_code_file(const std::string& path, const CssCode& code, const QubitLayout* layout) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write code file: " + path);
    }
    out << code_to_text(code, layout);
}

}  // namespace lacross
