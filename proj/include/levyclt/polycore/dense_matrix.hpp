#pragma once

// Small dense matrices over an exact or floating field. Only what the symbolic
// layer needs: products, transposes, determinants and inverses of q x q blocks.

#include "levyclt/polycore/scalar.hpp"

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace levyclt {

template <Coefficient T>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Scalar<T>::zero()) {}
    DenseMatrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) throw std::invalid_argument("DenseMatrix: ragged initializer");
            for (const auto& v : row) data_.push_back(v);
        }
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar<T>::one();
        return m;
    }
    static DenseMatrix diagonal(const std::vector<T>& d) {
        DenseMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("DenseMatrix: shape mismatch in product");
        DenseMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (Scalar<T>::is_zero(a(i, k))) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
            }
        return c;
    }

    bool operator==(const DenseMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_; }

    bool is_square() const { return rows_ == cols_; }
    bool is_symmetric() const {
        if (!is_square()) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }
    bool is_diagonal() const {
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (i != j && !Scalar<T>::is_zero((*this)(i, j))) return false;
        return true;
    }

    T determinant() const {
        if (!is_square()) throw std::invalid_argument("DenseMatrix: determinant of non-square matrix");
        DenseMatrix a = *this;
        T det = Scalar<T>::one();
        const std::size_t n = rows_;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = pivot_row(a, col, col);
            if (piv == n) return Scalar<T>::zero();
            if (piv != col) {
                a.swap_rows(piv, col);
                det = -det;
            }
            det *= a(col, col);
            for (std::size_t r = col + 1; r < n; ++r) {
                if (Scalar<T>::is_zero(a(r, col))) continue;
                T f = a(r, col) / a(col, col);
                for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            }
        }
        return det;
    }

    /// Gauss-Jordan inverse; throws std::domain_error when singular.
    DenseMatrix inverse() const {
        if (!is_square()) throw std::invalid_argument("DenseMatrix: inverse of non-square matrix");
        const std::size_t n = rows_;
        DenseMatrix a = *this;
        DenseMatrix inv = identity(n);
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = pivot_row(a, col, col);
            if (piv == n) throw std::domain_error("DenseMatrix: singular matrix");
            a.swap_rows(piv, col);
            inv.swap_rows(piv, col);
            T d = a(col, col);
            for (std::size_t c = 0; c < n; ++c) {
                a(col, c) /= d;
                inv(col, c) /= d;
            }
            for (std::size_t r = 0; r < n; ++r) {
                if (r == col || Scalar<T>::is_zero(a(r, col))) continue;
                T f = a(r, col);
                for (std::size_t c = 0; c < n; ++c) {
                    a(r, c) -= f * a(col, c);
                    inv(r, c) -= f * inv(col, c);
                }
            }
        }
        return inv;
    }

    /// Solves A x = b for square non-singular A.
    std::vector<T> solve(std::vector<T> b) const {
        if (!is_square() || b.size() != rows_) throw std::invalid_argument("DenseMatrix: bad shapes in solve");
        const std::size_t n = rows_;
        DenseMatrix a = *this;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = pivot_row(a, col, col);
            if (piv == n) throw std::domain_error("DenseMatrix: singular system");
            if (piv != col) {
                a.swap_rows(piv, col);
                std::swap(b[piv], b[col]);
            }
            for (std::size_t r = col + 1; r < n; ++r) {
                if (Scalar<T>::is_zero(a(r, col))) continue;
                T f = a(r, col) / a(col, col);
                for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
                b[r] -= f * b[col];
            }
        }
        std::vector<T> x(n, Scalar<T>::zero());
        for (std::size_t i = n; i-- > 0;) {
            T s = b[i];
            for (std::size_t c = i + 1; c < n; ++c) s -= a(i, c) * x[c];
            x[i] = s / a(i, i);
        }
        return x;
    }

    template <Coefficient U>
    DenseMatrix<U> cast() const {
        DenseMatrix<U> out(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) {
                if constexpr (std::is_same_v<T, U>) {
                    out(i, j) = (*this)(i, j);
                } else if constexpr (std::is_same_v<U, double>) {
                    out(i, j) = Scalar<T>::to_double((*this)(i, j));
                } else {
                    out(i, j) = Rational((*this)(i, j));
                }
            }
        return out;
    }

private:
    static std::size_t pivot_row(const DenseMatrix& a, std::size_t col, std::size_t from) {
        const std::size_t n = a.rows_;
        if constexpr (Scalar<T>::exact) {
            for (std::size_t r = from; r < n; ++r)
                if (!Scalar<T>::is_zero(a(r, col))) return r;
            return n;
        } else {
            std::size_t best = n;
            double best_abs = 0.0;
            for (std::size_t r = from; r < n; ++r) {
                double v = std::abs(a(r, col));
                if (v > best_abs) {
                    best_abs = v;
                    best = r;
                }
            }
            return best_abs > 0.0 ? best : n;
        }
    }
    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Every principal minor non-negative (exact PSD test; q <= 10 keeps 2^q subsets cheap).
template <Coefficient T>
bool is_positive_semidefinite(const DenseMatrix<T>& m) {
    if (!m.is_symmetric()) return false;
    const std::size_t n = m.rows();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        DenseMatrix<T> sub(idx.size(), idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = 0; b < idx.size(); ++b) sub(a, b) = m(idx[a], idx[b]);
        T d = sub.determinant();
        if constexpr (Scalar<T>::exact) {
            if (sgn(d) < 0) return false;
        } else {
            if (d < -1e-12) return false;
        }
    }
    return true;
}

/// Leading principal minors strictly positive.
template <Coefficient T>
bool is_positive_definite(const DenseMatrix<T>& m) {
    if (!m.is_symmetric()) return false;
    const std::size_t n = m.rows();
    for (std::size_t k = 1; k <= n; ++k) {
        DenseMatrix<T> sub(k, k);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) sub(a, b) = m(a, b);
        T d = sub.determinant();
        if constexpr (Scalar<T>::exact) {
            if (sgn(d) <= 0) return false;
        } else {
            if (!(d > 0.0)) return false;
        }
    }
    return true;
}

}  // namespace levyclt
