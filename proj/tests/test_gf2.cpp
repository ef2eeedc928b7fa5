#include <doctest.h>

#include <random>
#include <sstream>

#include "lacross/gf2.hpp"

using namespace lacross;

namespace {

BinaryMatrix random_matrix(std::mt19937& gen, std::size_t rows, std::size_t cols, double density = 0.4) {
    std::bernoulli_distribution bit(density);
    BinaryMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; r++) {
        for (std::size_t c = 0; c < cols; c++) {
            if (bit(gen)) {
                m.set(r, c);
            }
        }
    }
    return m;
}

BitVec random_vec(std::mt19937& gen, std::size_t n, double density = 0.5) {
    std::bernoulli_distribution bit(density);
    BitVec v(n);
    for (std::size_t i = 0; i < n; i++) {
        if (bit(gen)) {
            v.set(i);
        }
    }
    return v;
}

BinaryMatrix circulant6() {
    // first row (1,1,1,0,0,0), rows are successive cyclic shifts
    BinaryMatrix m(6, 6);
    for (uint32_t i = 0; i < 6; i++) {
        for (uint32_t e : {0u, 1u, 2u}) {
            m.set(i, (i + e) % 6);
        }
    }
    return m;
}

}  // namespace

TEST_SUITE("gf2") {

TEST_CASE("rank of identity, circulant and zero matrices") {
    CHECK(rank(BinaryMatrix::identity(5)) == 5);
    CHECK(rank(circulant6()) == 4);  // kernel dimension 2
    CHECK(rank(BinaryMatrix(4, 7)) == 0);
    CHECK(rank(BinaryMatrix(0, 0)) == 0);
    CHECK(rank(BinaryMatrix(0, 5)) == 0);
}

TEST_CASE("rank equals rank of the transpose") {
    std::mt19937 gen(7);
    for (int trial = 0; trial < 30; trial++) {
        BinaryMatrix m = random_matrix(gen, 1 + gen() % 12, 1 + gen() % 12);
        CHECK(rank(m) == rank(m.transposed()));
    }
}

TEST_CASE("kernel basis of identity is empty") {
    CHECK(kernel_basis(BinaryMatrix::identity(4)).empty());
}

TEST_CASE("kernel of the 3-bit repetition checks is the all-ones vector") {
    BinaryMatrix m = BinaryMatrix::from_entries(2, 3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}});
    auto basis = kernel_basis(m);
    REQUIRE(basis.size() == 1);
    CHECK(basis[0].popcount() == 3);
}

TEST_CASE("kernel of the 4x7 rectangular seed has dimension 3") {
    // rows are non-wrapping shifts of 1 + x + x^3
    BinaryMatrix m(4, 7);
    for (uint32_t i = 0; i < 4; i++) {
        for (uint32_t e : {0u, 1u, 3u}) {
            m.set(i, i + e);
        }
    }
    auto basis = kernel_basis(m);
    REQUIRE(basis.size() == 3);
    for (const BitVec& v : basis) {
        CHECK_FALSE(m.mul_vec(v).any());
    }
    // independence: stack the basis and check full rank
    BinaryMatrix stacked(3, 7);
    for (std::size_t i = 0; i < 3; i++) {
        stacked.set_row(i, basis[i]);
    }
    CHECK(rank(stacked) == 3);
}

TEST_CASE("kernel vectors always lie in the kernel and are independent") {
    std::mt19937 gen(21);
    for (int trial = 0; trial < 30; trial++) {
        BinaryMatrix m = random_matrix(gen, 2 + gen() % 10, 2 + gen() % 14);
        auto basis = kernel_basis(m);
        CHECK(basis.size() == m.cols() - rank(m));
        BinaryMatrix stacked(basis.size(), m.cols());
        for (std::size_t i = 0; i < basis.size(); i++) {
            CHECK_FALSE(m.mul_vec(basis[i]).any());
            stacked.set_row(i, basis[i]);
        }
        CHECK(rank(stacked) == basis.size());
    }
}

TEST_CASE("solve against the identity returns the rhs") {
    BinaryMatrix id = BinaryMatrix::identity(6);
    std::mt19937 gen(3);
    BitVec b = random_vec(gen, 6);
    auto x = solve(id, b);
    REQUIRE(x.has_value());
    CHECK(*x == b);
}

TEST_CASE("solve accepts the zero rhs") {
    std::mt19937 gen(5);
    BinaryMatrix m = random_matrix(gen, 4, 9);
    auto x = solve(m, BitVec(4));
    REQUIRE(x.has_value());
    CHECK_FALSE(m.mul_vec(*x).any());
}

TEST_CASE("solve re-multiplication reproduces consistent rhs") {
    std::mt19937 gen(13);
    for (int trial = 0; trial < 40; trial++) {
        BinaryMatrix m = random_matrix(gen, 10, 20);
        BitVec x0 = random_vec(gen, 20);
        BitVec b = m.mul_vec(x0);
        auto x = solve(m, b);
        REQUIRE(x.has_value());
        CHECK(m.mul_vec(*x) == b);
    }
}

TEST_CASE("solve reports no solution outside the column space") {
    BinaryMatrix m = BinaryMatrix::from_entries(2, 1, {{0, 0}, {1, 0}});
    BitVec b(2);
    b.set(0);
    CHECK_FALSE(solve(m, b).has_value());
}

TEST_CASE("coset reduction is canonical") {
    std::mt19937 gen(31);
    for (int trial = 0; trial < 30; trial++) {
        BinaryMatrix m = random_matrix(gen, 5, 12);
        RowSpace space(m);
        BitVec v = random_vec(gen, 12);
        BitVec r = space.reduce(v);
        BitVec diff = v;
        diff.xor_in(r);
        CHECK(space.contains(diff));
        // same coset -> same representative
        BitVec v2 = v;
        v2.xor_in(m.row(gen() % 5));
        CHECK(space.reduce(v2) == r);
    }
    SUBCASE("members and zero map to zero") {
        BinaryMatrix m = random_matrix(gen, 4, 9);
        CHECK_FALSE(coset_reduce(m.row(2), m).any());
        CHECK_FALSE(coset_reduce(BitVec(9), m).any());
    }
}

TEST_CASE("row reduction is deterministic") {
    std::mt19937 gen(41);
    BinaryMatrix m = random_matrix(gen, 8, 15);
    Rref a = row_reduce(m);
    Rref b = row_reduce(m);
    CHECK(a.r == b.r);
    CHECK(a.pivot_cols == b.pivot_cols);
}

TEST_CASE("text format round-trips exactly") {
    std::mt19937 gen(53);
    BinaryMatrix m = random_matrix(gen, 7, 11, 0.3);
    std::string text = to_text(m);
    CHECK(matrix_from_text(text) == m);
    std::istringstream in(text);
    std::size_t r = 0, c = 0;
    in >> r >> c;
    CHECK(r == 7);
    CHECK(c == 11);
}

TEST_CASE("degenerate shapes are legal") {
    BinaryMatrix m(0, 4);
    CHECK(rank(m) == 0);
    CHECK(kernel_basis(m).size() == 4);
}

}  // TEST_SUITE
