#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lacross/bitvec.hpp"

namespace lacross {

/// Dense bit-packed matrix over GF(2). The public contract is positional
/// (rows, cols, set of nonzero entries); packed words are an internal detail.
class BinaryMatrix {
  public:
    BinaryMatrix() = default;
    BinaryMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), w_(rows * wpr_, 0) {}

    static BinaryMatrix identity(std::size_t n);
    static BinaryMatrix from_entries(std::size_t rows, std::size_t cols,
                                     const std::vector<std::pair<uint32_t, uint32_t>>& entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const {
        return (w_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1;
    }
    void set(std::size_t r, std::size_t c) { w_[r * wpr_ + (c >> 6)] |= uint64_t{1} << (c & 63); }
    void flip(std::size_t r, std::size_t c) { w_[r * wpr_ + (c >> 6)] ^= uint64_t{1} << (c & 63); }

    /// Sorted (row, col) positions of nonzero entries.
    std::vector<std::pair<uint32_t, uint32_t>> entries() const;

    void xor_row_into(std::size_t src, std::size_t dst);
    void swap_rows(std::size_t a, std::size_t b);

    BitVec row(std::size_t r) const;
    void set_row(std::size_t r, const BitVec& v);

    BinaryMatrix transposed() const;
    BinaryMatrix mul(const BinaryMatrix& other) const;
    BitVec mul_vec(const BitVec& v) const;

    /// Kronecker product (this ⊗ other) with row-major index convention:
    /// row (i, j) -> i * other.rows() + j, same for columns.
    BinaryMatrix kron(const BinaryMatrix& other) const;

    static BinaryMatrix hconcat(const BinaryMatrix& left, const BinaryMatrix& right);
    static BinaryMatrix vconcat(const BinaryMatrix& top, const BinaryMatrix& bottom);

    bool is_zero() const;
    bool operator==(const BinaryMatrix& other) const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t wpr_ = 0;
    std::vector<uint64_t> w_;
};

/// Reduced row-echelon form. Pivot selection is leftmost column first,
/// lowest-index row second, so the result is reproducible across runs.
struct Rref {
    BinaryMatrix r;
    std::vector<uint32_t> pivot_cols;  // pivot_cols[i] is the pivot column of row i
    std::size_t rank = 0;
};

Rref row_reduce(const BinaryMatrix& m);

std::size_t rank(const BinaryMatrix& m);

/// Basis of { v : m v = 0 }, one vector per non-pivot column, in column order.
std::vector<BitVec> kernel_basis(const BinaryMatrix& m);

/// Any x with m x = b, or nullopt when b is outside the column space.
std::optional<BitVec> solve(const BinaryMatrix& m, const BitVec& b);

/// Row space of a matrix, used for coset reduction and membership tests.
/// Reduction against the RREF basis yields a canonical coset representative.
class RowSpace {
  public:
    explicit RowSpace(const BinaryMatrix& m);

    std::size_t dim() const { return rref_.rank; }
    std::size_t ambient() const { return rref_.r.cols(); }

    BitVec reduce(BitVec v) const;
    bool contains(const BitVec& v) const { return !reduce(v).any(); }

    /// Adds a vector to the spanning set; returns false if it was already in the span.
    bool extend(const BitVec& v);

  private:
    Rref rref_;
};

BitVec coset_reduce(const BitVec& v, const BinaryMatrix& rowspace_of);

/// Text format: first line "rows cols", then one "r c" pair per nonzero, sorted.
std::string to_text(const BinaryMatrix& m);
BinaryMatrix matrix_from_text(std::istream& in);
BinaryMatrix matrix_from_text(const std::string& text);

}  // namespace lacross
