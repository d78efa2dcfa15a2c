#pragma once

// Exact linear algebra over GF(2) with bit-packed rows.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace extcalc {

class F2Vector {
public:
    F2Vector() = default;
    explicit F2Vector(std::size_t length) : len_(length), words_((length + 63) / 64, 0) {}

    std::size_t size() const { return len_; }

    bool get(std::size_t i) const
    {
        check(i);
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    void set(std::size_t i, bool v = true)
    {
        check(i);
        if (v)
            words_[i >> 6] |= (std::uint64_t{1} << (i & 63));
        else
            words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }

    void flip(std::size_t i)
    {
        check(i);
        words_[i >> 6] ^= (std::uint64_t{1} << (i & 63));
    }

    F2Vector& operator^=(const F2Vector& o)
    {
        if (o.len_ != len_)
            throw std::invalid_argument("F2Vector: length mismatch in xor");
        for (std::size_t k = 0; k < words_.size(); ++k)
            words_[k] ^= o.words_[k];
        return *this;
    }

    friend F2Vector operator^(F2Vector a, const F2Vector& b)
    {
        a ^= b;
        return a;
    }

    bool is_zero() const
    {
        for (auto w : words_)
            if (w)
                return false;
        return true;
    }

    bool operator==(const F2Vector& o) const { return len_ == o.len_ && words_ == o.words_; }
    bool operator!=(const F2Vector& o) const { return !(*this == o); }

    // Index of the lowest set bit, or -1.
    long first_set() const
    {
        for (std::size_t k = 0; k < words_.size(); ++k)
            if (words_[k])
                return static_cast<long>((k << 6) + static_cast<std::size_t>(__builtin_ctzll(words_[k])));
        return -1;
    }

    std::vector<std::size_t> support() const
    {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < words_.size(); ++k) {
            std::uint64_t w = words_[k];
            while (w) {
                out.push_back((k << 6) + static_cast<std::size_t>(__builtin_ctzll(w)));
                w &= w - 1;
            }
        }
        return out;
    }

    bool dot(const F2Vector& o) const
    {
        if (o.len_ != len_)
            throw std::invalid_argument("F2Vector: length mismatch in dot");
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < words_.size(); ++k)
            acc ^= words_[k] & o.words_[k];
        return __builtin_popcountll(acc) & 1u;
    }

private:
    void check(std::size_t i) const
    {
        if (i >= len_)
            throw std::out_of_range("F2Vector: index " + std::to_string(i) + " >= length " + std::to_string(len_));
    }

    std::size_t len_ = 0;
    std::vector<std::uint64_t> words_;
};

class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_(rows, F2Vector(cols)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    const F2Vector& row(std::size_t i) const { return row_.at(i); }
    F2Vector& row(std::size_t i) { return row_.at(i); }

    bool get(std::size_t i, std::size_t j) const { return row_.at(i).get(j); }
    void set(std::size_t i, std::size_t j, bool v = true) { row_.at(i).set(j, v); }
    void flip_entry(std::size_t i, std::size_t j) { row_.at(i).flip(j); }

    // Column j as a vector (the image of the j-th source basis vector when the
    // matrix is read as a linear map target <- source).
    F2Vector col(std::size_t j) const
    {
        F2Vector v(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            if (row_[i].get(j))
                v.set(i);
        return v;
    }

    void set_col(std::size_t j, const F2Vector& v)
    {
        if (v.size() != rows_)
            throw std::invalid_argument("F2Matrix::set_col: size mismatch");
        for (std::size_t i = 0; i < rows_; ++i)
            row_[i].set(j, v.get(i));
    }

    // m.apply(x) = m * x.
    F2Vector apply(const F2Vector& x) const
    {
        if (x.size() != cols_)
            throw std::invalid_argument("F2Matrix::apply: size mismatch");
        F2Vector y(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            if (row_[i].dot(x))
                y.set(i);
        return y;
    }

    // (this * other): composition of maps, this after other.
    F2Matrix compose(const F2Matrix& other) const
    {
        if (cols_ != other.rows_)
            throw std::invalid_argument("F2Matrix::compose: size mismatch");
        F2Matrix out(rows_, other.cols_);
        for (std::size_t j = 0; j < other.cols_; ++j)
            out.set_col(j, apply(other.col(j)));
        return out;
    }

    F2Matrix& operator^=(const F2Matrix& o)
    {
        if (o.rows_ != rows_ || o.cols_ != cols_)
            throw std::invalid_argument("F2Matrix: shape mismatch in xor");
        for (std::size_t i = 0; i < rows_; ++i)
            row_[i] ^= o.row_[i];
        return *this;
    }

    bool operator==(const F2Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && row_ == o.row_; }
    bool operator!=(const F2Matrix& o) const { return !(*this == o); }

    static F2Matrix identity(std::size_t n)
    {
        F2Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m.set(i, i);
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<F2Vector> row_;
};

struct RrefResult {
    F2Matrix reduced;
    std::vector<std::size_t> pivots;  // strictly increasing column indices
};

// Reduced row echelon form. Row space is preserved; pivot columns come out
// strictly increasing, and every pivot column is cleared above and below.
inline RrefResult rref(const F2Matrix& m)
{
    F2Matrix a = m;
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        std::size_t pivot_row = a.rows();
        for (std::size_t i = r; i < a.rows(); ++i) {
            if (a.get(i, c)) {
                pivot_row = i;
                break;
            }
        }
        if (pivot_row == a.rows())
            continue;
        std::swap(a.row(r), a.row(pivot_row));
        for (std::size_t i = 0; i < a.rows(); ++i)
            if (i != r && a.get(i, c))
                a.row(i) ^= a.row(r);
        pivots.push_back(c);
        ++r;
    }
    return {std::move(a), std::move(pivots)};
}

inline std::size_t rank(const F2Matrix& m) { return rref(m).pivots.size(); }

// Basis of {x : m*x = 0}. One vector per free column, in ascending column
// order; the free coordinate of each vector is set to 1.
inline std::vector<F2Vector> kernel_basis(const F2Matrix& m)
{
    RrefResult rr = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : rr.pivots)
        is_pivot[c] = true;
    std::vector<F2Vector> out;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        F2Vector v(m.cols());
        v.set(f);
        for (std::size_t r = 0; r < rr.pivots.size(); ++r)
            if (rr.reduced.get(r, f))
                v.set(rr.pivots[r]);
        out.push_back(std::move(v));
    }
    return out;
}

// Particular solution of m*x = b with zeros on the free columns, or nullopt
// when b is outside the column space.
inline std::optional<F2Vector> solve(const F2Matrix& m, const F2Vector& b)
{
    if (b.size() != m.rows())
        throw std::invalid_argument("solve: rhs length must equal row count");
    F2Matrix aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        aug.row(i) = F2Vector(m.cols() + 1);
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m.get(i, j))
                aug.row(i).set(j);
        if (b.get(i))
            aug.row(i).set(m.cols());
    }
    RrefResult rr = rref(aug);
    F2Vector x(m.cols());
    for (std::size_t r = 0; r < rr.pivots.size(); ++r) {
        if (rr.pivots[r] == m.cols())
            return std::nullopt;  // pivot in the augmented column
        if (rr.reduced.get(r, m.cols()))
            x.set(rr.pivots[r]);
    }
    return x;
}

// Incremental row-echelon span. Insertion order is the caller's; pivots are
// lowest-set-bit, which keeps every derived choice deterministic.
class EchelonBasis {
public:
    explicit EchelonBasis(std::size_t width) : width_(width) {}

    std::size_t width() const { return width_; }
    std::size_t dim() const { return rows_.size(); }

    F2Vector reduce(F2Vector v) const
    {
        for (std::size_t k = 0; k < rows_.size(); ++k)
            if (v.get(pivot_[k]))
                v ^= rows_[k];
        return v;
    }

    bool contains(const F2Vector& v) const { return reduce(v).is_zero(); }

    // Insert v if independent of the current span; returns true if inserted.
    bool insert(const F2Vector& v)
    {
        F2Vector r = reduce(v);
        long p = r.first_set();
        if (p < 0)
            return false;
        for (std::size_t k = 0; k < rows_.size(); ++k)
            if (rows_[k].get(static_cast<std::size_t>(p)))
                rows_[k] ^= r;
        rows_.push_back(std::move(r));
        pivot_.push_back(static_cast<std::size_t>(p));
        return true;
    }

    const std::vector<std::size_t>& pivots() const { return pivot_; }
    const F2Vector& row(std::size_t k) const { return rows_.at(k); }

    // Indices not used as pivots, ascending.
    std::vector<std::size_t> free_indices() const
    {
        std::vector<bool> used(width_, false);
        for (auto p : pivot_)
            used[p] = true;
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < width_; ++i)
            if (!used[i])
                out.push_back(i);
        return out;
    }

private:
    std::size_t width_;
    std::vector<F2Vector> rows_;
    std::vector<std::size_t> pivot_;
};

}  // namespace extcalc
