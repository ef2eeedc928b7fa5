#include "lacross/gf2.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace lacross {

BinaryMatrix BinaryMatrix::identity(std::size_t n) {
    BinaryMatrix m(n, n);
    for (std::size_t i = 0; i < n; i++) {
        m.set(i, i);
    }
    return m;
}

BinaryMatrix BinaryMatrix::from_entries(std::size_t rows, std::size_t cols,
                                        const std::vector<std::pair<uint32_t, uint32_t>>& entries) {
    BinaryMatrix m(rows, cols);
    for (auto [r, c] : entries) {
        if (r >= rows || c >= cols) {
            throw std::invalid_argument("matrix entry out of bounds");
        }
        if (m.get(r, c)) {
            throw std::invalid_argument("duplicate matrix entry");
        }
        m.set(r, c);
    }
    return m;
}

std::vector<std::pair<uint32_t, uint32_t>> BinaryMatrix::entries() const {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (std::size_t r = 0; r < rows_; r++) {
        for (std::size_t c = 0; c < cols_; c++) {
            if (get(r, c)) {
                out.emplace_back(static_cast<uint32_t>(r), static_cast<uint32_t>(c));
            }
        }
    }
    return out;
}

void BinaryMatrix::xor_row_into(std::size_t src, std::size_t dst) {
    const uint64_t* s = &w_[src * wpr_];
    uint64_t* d = &w_[dst * wpr_];
    for (std::size_t k = 0; k < wpr_; k++) {
        d[k] ^= s[k];
    }
}

void BinaryMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) {
        return;
    }
    for (std::size_t k = 0; k < wpr_; k++) {
        std::swap(w_[a * wpr_ + k], w_[b * wpr_ + k]);
    }
}

BitVec BinaryMatrix::row(std::size_t r) const {
    BitVec v(cols_);
    for (std::size_t c = 0; c < cols_; c++) {
        if (get(r, c)) {
            v.set(c);
        }
    }
    return v;
}

void BinaryMatrix::set_row(std::size_t r, const BitVec& v) {
    if (v.size() != cols_) {
        throw std::invalid_argument("row length mismatch");
    }
    for (std::size_t c = 0; c < cols_; c++) {
        if (v.get(c)) {
            set(r, c);
        } else {
            w_[r * wpr_ + (c >> 6)] &= ~(uint64_t{1} << (c & 63));
        }
    }
}

BinaryMatrix BinaryMatrix::transposed() const {
    BinaryMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; r++) {
        for (std::size_t c = 0; c < cols_; c++) {
            if (get(r, c)) {
                t.set(c, r);
            }
        }
    }
    return t;
}

BinaryMatrix BinaryMatrix::mul(const BinaryMatrix& other) const {
    if (cols_ != other.rows_) {
        throw std::invalid_argument("matrix product dimension mismatch");
    }
    BinaryMatrix out(rows_, other.cols_);
    for (std::size_t r = 0; r < rows_; r++) {
        for (std::size_t k = 0; k < cols_; k++) {
            if (get(r, k)) {
                const uint64_t* s = &other.w_[k * other.wpr_];
                uint64_t* d = &out.w_[r * out.wpr_];
                for (std::size_t j = 0; j < other.wpr_; j++) {
                    d[j] ^= s[j];
                }
            }
        }
    }
    return out;
}

BitVec BinaryMatrix::mul_vec(const BitVec& v) const {
    if (v.size() != cols_) {
        throw std::invalid_argument("matrix-vector dimension mismatch");
    }
    BitVec out(rows_);
    for (std::size_t r = 0; r < rows_; r++) {
        uint64_t acc = 0;
        const uint64_t* m = &w_[r * wpr_];
        const uint64_t* x = v.words().data();
        for (std::size_t k = 0; k < wpr_; k++) {
            acc ^= m[k] & x[k];
        }
        if (std::popcount(acc) & 1) {
            out.set(r);
        }
    }
    return out;
}

BinaryMatrix BinaryMatrix::kron(const BinaryMatrix& other) const {
    BinaryMatrix out(rows_ * other.rows_, cols_ * other.cols_);
    for (std::size_t r = 0; r < rows_; r++) {
        for (std::size_t c = 0; c < cols_; c++) {
            if (!get(r, c)) {
                continue;
            }
            for (std::size_t r2 = 0; r2 < other.rows_; r2++) {
                for (std::size_t c2 = 0; c2 < other.cols_; c2++) {
                    if (other.get(r2, c2)) {
                        out.set(r * other.rows_ + r2, c * other.cols_ + c2);
                    }
                }
            }
        }
    }
    return out;
}

BinaryMatrix BinaryMatrix::hconcat(const BinaryMatrix& left, const BinaryMatrix& right) {
    if (left.rows() != right.rows()) {
        throw std::invalid_argument("hconcat row mismatch");
    }
    BinaryMatrix out(left.rows(), left.cols() + right.cols());
    for (std::size_t r = 0; r < left.rows(); r++) {
        for (std::size_t c = 0; c < left.cols(); c++) {
            if (left.get(r, c)) {
                out.set(r, c);
            }
        }
        for (std::size_t c = 0; c < right.cols(); c++) {
            if (right.get(r, c)) {
                out.set(r, left.cols() + c);
            }
        }
    }
    return out;
}

BinaryMatrix BinaryMatrix::vconcat(const BinaryMatrix& top, const BinaryMatrix& bottom) {
    if (top.cols() != bottom.cols()) {
        throw std::invalid_argument("vconcat column mismatch");
    }
    BinaryMatrix out(top.rows() + bottom.rows(), top.cols());
    for (std::size_t r = 0; r < top.rows(); r++) {
        for (std::size_t c = 0; c < top.cols(); c++) {
            if (top.get(r, c)) {
                out.set(r, c);
            }
        }
    }
    for (std::size_t r = 0; r < bottom.rows(); r++) {
        for (std::size_t c = 0; c < bottom.cols(); c++) {
            if (bottom.get(r, c)) {
                out.set(top.rows() + r, c);
            }
        }
    }
    return out;
}

bool BinaryMatrix::is_zero() const {
    for (uint64_t w : w_) {
        if (w) {
            return false;
        }
    }
    return true;
}

bool BinaryMatrix::operator==(const BinaryMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && w_ == other.w_;
}

Rref row_reduce(const BinaryMatrix& m) {
    Rref out;
    out.r = m;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < m.cols() && rank < m.rows(); c++) {
        std::size_t pivot = rank;
        while (pivot < m.rows() && !out.r.get(pivot, c)) {
            pivot++;
        }
        if (pivot == m.rows()) {
            continue;
        }
        out.r.swap_rows(rank, pivot);
        for (std::size_t r = 0; r < m.rows(); r++) {
            if (r != rank && out.r.get(r, c)) {
                out.r.xor_row_into(rank, r);
            }
        }
        out.pivot_cols.push_back(static_cast<uint32_t>(c));
        rank++;
    }
    out.rank = rank;
    return out;
}

std::size_t rank(const BinaryMatrix& m) { return row_reduce(m).rank; }

std::vector<BitVec> kernel_basis(const BinaryMatrix& m) {
    Rref rr = row_reduce(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (uint32_t c : rr.pivot_cols) {
        is_pivot[c] = true;
    }
    std::vector<BitVec> basis;
    for (std::size_t f = 0; f < m.cols(); f++) {
        if (is_pivot[f]) {
            continue;
        }
        BitVec v(m.cols());
        v.set(f);
        for (std::size_t i = 0; i < rr.rank; i++) {
            if (rr.r.get(i, f)) {
                v.flip(rr.pivot_cols[i]);
            }
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<BitVec> solve(const BinaryMatrix& m, const BitVec& b) {
    if (b.size() != m.rows()) {
        throw std::invalid_argument("solve: rhs length must equal row count");
    }
    // Row-reduce the augmented matrix [m | b].
    BinaryMatrix aug(m.rows(), m.cols() + 1);
    for (std::size_t r = 0; r < m.rows(); r++) {
        for (std::size_t c = 0; c < m.cols(); c++) {
            if (m.get(r, c)) {
                aug.set(r, c);
            }
        }
        if (b.get(r)) {
            aug.set(r, m.cols());
        }
    }
    Rref rr = row_reduce(aug);
    BitVec x(m.cols());
    for (std::size_t i = 0; i < rr.rank; i++) {
        if (rr.pivot_cols[i] == m.cols()) {
            return std::nullopt;  // inconsistent row 0 = 1
        }
        if (rr.r.get(i, m.cols())) {
            x.set(rr.pivot_cols[i]);
        }
    }
    return x;
}

RowSpace::RowSpace(const BinaryMatrix& m) : rref_(row_reduce(m)) {}

BitVec RowSpace::reduce(BitVec v) const {
    if (v.size() != rref_.r.cols()) {
        throw std::invalid_argument("coset_reduce: length mismatch");
    }
    for (std::size_t i = 0; i < rref_.rank; i++) {
        if (v.get(rref_.pivot_cols[i])) {
            v.xor_in(rref_.r.row(i));
        }
    }
    return v;
}

bool RowSpace::extend(const BitVec& v) {
    BitVec w = reduce(v);
    if (!w.any()) {
        return false;
    }
    // Insert the reduced vector keeping the basis in RREF with sorted pivots.
    uint32_t pc = 0;
    while (!w.get(pc)) {
        pc++;
    }
    BinaryMatrix nb(rref_.rank + 1, ambient());
    std::vector<uint32_t> pcols;
    std::size_t at = 0;
    bool placed = false;
    for (std::size_t i = 0; i <= rref_.rank; i++) {
        if (!placed && (i == rref_.rank || rref_.pivot_cols[i] > pc)) {
            nb.set_row(at, w);
            pcols.push_back(pc);
            at++;
            placed = true;
        }
        if (i < rref_.rank) {
            nb.set_row(at, rref_.r.row(i));
            pcols.push_back(rref_.pivot_cols[i]);
            at++;
        }
    }
    // Clear the new pivot column above and below.
    for (std::size_t r = 0; r < nb.rows(); r++) {
        if (pcols[r] != pc && nb.get(r, pc)) {
            for (std::size_t rr2 = 0; rr2 < nb.rows(); rr2++) {
                if (pcols[rr2] == pc) {
                    nb.xor_row_into(rr2, r);
                }
            }
        }
    }
    rref_.r = nb;
    rref_.pivot_cols = pcols;
    rref_.rank++;
    return true;
}

BitVec coset_reduce(const BitVec& v, const BinaryMatrix& rowspace_of) {
    return RowSpace(rowspace_of).reduce(v);
}

std::string to_text(const BinaryMatrix& m) {
    std::ostringstream out;
    out << m.rows() << " " << m.cols() << "\n";
    for (auto [r, c] : m.entries()) {
        out << r << " " << c << "\n";
    }
    return out.str();
}

BinaryMatrix matrix_from_text(std::istream& in) {
    std::size_t rows = 0;
    std::size_t cols = 0;
    if (!(in >> rows >> cols)) {
        throw std::runtime_error("matrix text: missing header");
    }
    BinaryMatrix m(rows, cols);
    std::size_t r = 0;
    std::size_t c = 0;
    // Entries run to end of stream (or until a non-numeric token when embedded).
    while (true) {
        std::streampos pos = in.tellg();
        if (!(in >> r >> c)) {
            in.clear();
            in.seekg(pos);
            break;
        }
        if (r >= rows || c >= cols) {
            throw std::runtime_error("matrix text: entry out of bounds");
        }
        m.set(r, c);
    }
    return m;
}

BinaryMatrix matrix_from_text(const std::string& text) {
    std::istringstream in(text);
    return matrix_from_text(in);
}

}  // namespace lacross
