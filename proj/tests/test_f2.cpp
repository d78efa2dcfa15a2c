#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "extcalc/f2.hpp"

using namespace extcalc;

namespace {

F2Matrix from_rows(const std::vector<std::vector<int>>& rows)
{
    std::size_t r = rows.size(), c = r ? rows[0].size() : 0;
    F2Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            if (rows[i][j])
                m.set(i, j);
    return m;
}

// Textbook Gaussian elimination on unpacked 0/1 entries; the independent
// oracle for rank.
std::size_t unpacked_rank(std::vector<std::vector<int>> a)
{
    std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t pivot = rows;
        for (std::size_t i = rank; i < rows; ++i)
            if (a[i][c]) {
                pivot = i;
                break;
            }
        if (pivot == rows)
            continue;
        std::swap(a[rank], a[pivot]);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != rank && a[i][c])
                for (std::size_t j = 0; j < cols; ++j)
                    a[i][j] ^= a[rank][j];
        ++rank;
    }
    return rank;
}

F2Vector vec(std::initializer_list<int> bits)
{
    F2Vector v(bits.size());
    std::size_t i = 0;
    for (int b : bits)
        v.set(i++, b != 0);
    return v;
}

}  // namespace

TEST_CASE("rref on the identity")
{
    auto rr = rref(F2Matrix::identity(3));
    CHECK(rr.reduced == F2Matrix::identity(3));
    CHECK(rr.pivots == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("rref collapses a rank-1 matrix")
{
    auto rr = rref(from_rows({{1, 1}, {1, 1}}));
    CHECK(rr.reduced == from_rows({{1, 1}, {0, 0}}));
    CHECK(rr.pivots == std::vector<std::size_t>{0});
}

TEST_CASE("rref rank agrees with an unpacked elimination oracle")
{
    std::mt19937 rng(20240815);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<std::vector<int>> raw(20, std::vector<int>(20));
        F2Matrix m(20, 20);
        for (std::size_t i = 0; i < 20; ++i)
            for (std::size_t j = 0; j < 20; ++j) {
                int b = static_cast<int>(rng() & 1);
                raw[i][j] = b;
                if (b)
                    m.set(i, j);
            }
        CHECK(rref(m).pivots.size() == unpacked_rank(raw));
    }
}

TEST_CASE("rref is idempotent")
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        F2Matrix m(8, 11);
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 11; ++j)
                if (rng() & 1)
                    m.set(i, j);
        auto once = rref(m).reduced;
        CHECK(rref(once).reduced == once);
    }
}

TEST_CASE("kernel of the identity is empty")
{
    CHECK(kernel_basis(F2Matrix::identity(4)).empty());
}

TEST_CASE("kernel of the zero 2x3 matrix has three basis vectors")
{
    auto k = kernel_basis(F2Matrix(2, 3));
    REQUIRE(k.size() == 3);
    CHECK(k[0] == vec({1, 0, 0}));
    CHECK(k[1] == vec({0, 1, 0}));
    CHECK(k[2] == vec({0, 0, 1}));
}

TEST_CASE("kernel matches brute-force enumeration")
{
    // Expected kernel of [[1,1,0],[0,1,1]] by checking all 8 vectors.
    F2Matrix m = from_rows({{1, 1, 0}, {0, 1, 1}});
    std::vector<F2Vector> expected;
    for (int bits = 1; bits < 8; ++bits) {
        F2Vector v(3);
        for (int j = 0; j < 3; ++j)
            if ((bits >> j) & 1)
                v.set(static_cast<std::size_t>(j));
        if (m.apply(v).is_zero())
            expected.push_back(v);
    }
    REQUIRE(expected.size() == 1);
    auto k = kernel_basis(m);
    REQUIRE(k.size() == 1);
    CHECK(k[0] == expected[0]);
    CHECK(k[0] == vec({1, 1, 1}));
}

TEST_CASE("solve on the identity returns the target")
{
    F2Vector b = vec({1, 0, 1, 1});
    auto x = solve(F2Matrix::identity(4), b);
    REQUIRE(x);
    CHECK(*x == b);
}

TEST_CASE("solve reports inconsistency for the zero matrix")
{
    CHECK_FALSE(solve(F2Matrix(2, 3), vec({1, 0})));
}

TEST_CASE("solve matches candidate enumeration")
{
    // m = [[1,1],[0,1]], b = (0,1): the unique solution among all 4 vectors.
    F2Matrix m = from_rows({{1, 1}, {0, 1}});
    F2Vector b = vec({0, 1});
    std::vector<F2Vector> sols;
    for (int bits = 0; bits < 4; ++bits) {
        F2Vector v(2);
        for (int j = 0; j < 2; ++j)
            if ((bits >> j) & 1)
                v.set(static_cast<std::size_t>(j));
        if (m.apply(v) == b)
            sols.push_back(v);
    }
    REQUIRE(sols.size() == 1);
    auto x = solve(m, b);
    REQUIRE(x);
    CHECK(*x == sols[0]);
    CHECK(*x == vec({1, 1}));
}

TEST_CASE("solve succeeds on anything in the column space")
{
    std::mt19937 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        F2Matrix m(9, 7);
        for (std::size_t i = 0; i < 9; ++i)
            for (std::size_t j = 0; j < 7; ++j)
                if (rng() & 1)
                    m.set(i, j);
        F2Vector x(7);
        for (std::size_t j = 0; j < 7; ++j)
            if (rng() & 1)
                x.set(j);
        F2Vector b = m.apply(x);
        auto got = solve(m, b);
        REQUIRE(got);
        CHECK(m.apply(*got) == b);
    }
}

TEST_CASE("rank plus nullity equals the column count")
{
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t r = 1 + rng() % 12, c = 1 + rng() % 12;
        F2Matrix m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                if (rng() & 1)
                    m.set(i, j);
        auto k = kernel_basis(m);
        CHECK(rank(m) + k.size() == c);
        for (const auto& v : k)
            CHECK(m.apply(v).is_zero());
        // Independence of the kernel basis.
        F2Matrix km(k.size(), c);
        for (std::size_t i = 0; i < k.size(); ++i)
            km.row(i) = k[i];
        CHECK(rank(km) == k.size());
    }
}

TEST_CASE("coordinate access beyond the length is an error")
{
    F2Vector v(5);
    CHECK_THROWS_AS(v.get(5), std::out_of_range);
    CHECK_THROWS_AS(v.set(6), std::out_of_range);
    F2Vector w(8);
    CHECK_THROWS(v ^= w);
}

TEST_CASE("addition is self-inverse")
{
    std::mt19937 rng(3);
    F2Vector v(70);
    for (std::size_t i = 0; i < 70; ++i)
        if (rng() & 1)
            v.set(i);
    F2Vector sum = v ^ v;
    CHECK(sum.is_zero());
}

TEST_CASE("echelon basis inserts and reduces deterministically")
{
    EchelonBasis eb(4);
    CHECK(eb.insert(vec({1, 1, 0, 0})));
    CHECK(eb.insert(vec({0, 1, 1, 0})));
    CHECK_FALSE(eb.insert(vec({1, 0, 1, 0})));
    CHECK(eb.dim() == 2);
    CHECK(eb.contains(vec({1, 0, 1, 0})));
    CHECK_FALSE(eb.contains(vec({0, 0, 0, 1})));
    CHECK(eb.free_indices() == std::vector<std::size_t>{2, 3});
}
