#pragma once

#include "levyclt/polycore/dense_matrix.hpp"
#include "levyclt/polycore/multi_index.hpp"
#include "levyclt/polycore/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace levyclt {

/// Operations refuse to build polynomials above this total degree.
inline constexpr int kMaxPolynomialDegree = 64;

/// Sparse multivariate polynomial in canonical form: terms keyed by MultiIndex in
/// graded-lex order, never storing a zero coefficient.
template <Coefficient T>
class Polynomial {
public:
    using Terms = std::map<MultiIndex, T, GradedLexLess>;

    explicit Polynomial(std::size_t dim = 1) : dim_(dim) {
        if (dim == 0) throw std::invalid_argument("Polynomial: dimension must be >= 1");
    }

    static Polynomial constant(std::size_t dim, const T& c) {
        Polynomial p(dim);
        p.add_term(MultiIndex(dim), c);
        return p;
    }
    static Polynomial variable(std::size_t dim, std::size_t j) {
        Polynomial p(dim);
        p.add_term(MultiIndex::unit(dim, j), Scalar<T>::one());
        return p;
    }
    static Polynomial monomial(const MultiIndex& alpha, const T& c) {
        Polynomial p(alpha.dim());
        p.add_term(alpha, c);
        return p;
    }

    std::size_t dim() const { return dim_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    /// Highest total degree among stored terms; -1 for the zero polynomial.
    int degree() const {
        return terms_.empty() ? -1 : terms_.rbegin()->first.order();
    }
    /// Lowest total degree among stored terms; -1 for the zero polynomial.
    int min_degree() const {
        return terms_.empty() ? -1 : terms_.begin()->first.order();
    }

    T coefficient(const MultiIndex& alpha) const {
        auto it = terms_.find(alpha);
        return it == terms_.end() ? Scalar<T>::zero() : it->second;
    }
    T constant_term() const { return coefficient(MultiIndex(dim_)); }

    void add_term(const MultiIndex& alpha, const T& c) {
        if (alpha.dim() != dim_) throw std::invalid_argument("Polynomial: multi-index dimension mismatch");
        if (alpha.order() > kMaxPolynomialDegree) throw std::domain_error("Polynomial: degree cap exceeded");
        if (Scalar<T>::is_zero(c)) return;
        auto [it, inserted] = terms_.try_emplace(alpha, c);
        if (!inserted) {
            it->second += c;
            if (Scalar<T>::is_zero(it->second)) terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        check_dim(o);
        for (const auto& [a, c] : o.terms_) add_term(a, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        check_dim(o);
        for (const auto& [a, c] : o.terms_) add_term(a, T(-c));
        return *this;
    }
    Polynomial& operator*=(const T& s) {
        if (Scalar<T>::is_zero(s)) {
            terms_.clear();
            return *this;
        }
        for (auto& [a, c] : terms_) c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(Polynomial a) { return a *= T(-1); }
    friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
    friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_dim(b);
        Polynomial out(a.dim_);
        if (a.is_zero() || b.is_zero()) return out;
        if (a.degree() + b.degree() > kMaxPolynomialDegree)
            throw std::domain_error("Polynomial: product exceeds degree cap");
        for (const auto& [ai, ac] : a.terms_)
            for (const auto& [bi, bc] : b.terms_) out.add_term(ai + bi, T(ac * bc));
        return out;
    }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    bool operator==(const Polynomial& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

    Polynomial partial(std::size_t j) const {
        if (j >= dim_) throw std::out_of_range("Polynomial: partial index out of range");
        Polynomial out(dim_);
        for (const auto& [a, c] : terms_) {
            if (a[j] == 0) continue;
            out.add_term(a.incremented(j, -1), T(c * Scalar<T>::from_int(a[j])));
        }
        return out;
    }

    /// Terms of total degree exactly k.
    Polynomial homogeneous_part(int k) const {
        Polynomial out(dim_);
        for (const auto& [a, c] : terms_)
            if (a.order() == k) out.terms_.emplace(a, c);
        return out;
    }

    /// Exact evaluation at a point with coefficients in T.
    T evaluate_exact(std::span<const T> x) const {
        if (x.size() != dim_) throw std::invalid_argument("Polynomial: point dimension mismatch");
        T sum = Scalar<T>::zero();
        for (const auto& [a, c] : terms_) {
            T term = c;
            for (std::size_t j = 0; j < dim_; ++j)
                for (int e = 0; e < a[j]; ++e) term *= x[j];
            sum += term;
        }
        return sum;
    }

    /// Floating evaluation (coefficients converted to double).
    double evaluate(std::span<const double> x) const {
        if (x.size() != dim_) throw std::invalid_argument("Polynomial: point dimension mismatch");
        double sum = 0.0;
        for (const auto& [a, c] : terms_) {
            double term = Scalar<T>::to_double(c);
            for (std::size_t j = 0; j < dim_; ++j)
                for (int e = 0; e < a[j]; ++e) term *= x[j];
            sum += term;
        }
        return sum;
    }

    /// Substitutes x_j -> images[j]; the result lives in the images' dimension.
    Polynomial substitute(const std::vector<Polynomial>& images) const {
        if (images.size() != dim_) throw std::invalid_argument("Polynomial: substitution arity mismatch");
        const std::size_t out_dim = images.front().dim();
        std::vector<std::vector<Polynomial>> powers(dim_);
        for (std::size_t j = 0; j < dim_; ++j) {
            powers[j].push_back(Polynomial::constant(out_dim, Scalar<T>::one()));
        }
        Polynomial out(out_dim);
        for (const auto& [a, c] : terms_) {
            Polynomial term = Polynomial::constant(out_dim, c);
            for (std::size_t j = 0; j < dim_; ++j) {
                while (static_cast<int>(powers[j].size()) <= a[j]) powers[j].push_back(powers[j].back() * images[j]);
                if (a[j] > 0) term = term * powers[j][a[j]];
            }
            out += term;
        }
        return out;
    }

    /// p(A x) for a square matrix A.
    Polynomial compose_linear(const DenseMatrix<T>& A) const {
        if (A.rows() != dim_ || A.cols() != dim_) throw std::invalid_argument("Polynomial: compose_linear shape mismatch");
        std::vector<Polynomial> images;
        for (std::size_t i = 0; i < dim_; ++i) {
            Polynomial row(dim_);
            for (std::size_t j = 0; j < dim_; ++j) row.add_term(MultiIndex::unit(dim_, j), A(i, j));
            images.push_back(std::move(row));
        }
        return substitute(images);
    }

    template <Coefficient U>
    Polynomial<U> cast() const {
        Polynomial<U> out(dim_);
        for (const auto& [a, c] : terms_) {
            if constexpr (std::is_same_v<T, U>) {
                out.add_term(a, c);
            } else if constexpr (std::is_same_v<U, double>) {
                out.add_term(a, Scalar<T>::to_double(c));
            } else {
                out.add_term(a, Rational(c));
            }
        }
        return out;
    }

    /// Debug text: terms in graded-lex order, "c*x1^a*x2^b" joined by " + ".
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string s;
        bool first = true;
        for (const auto& [a, c] : terms_) {
            if (!first) s += " + ";
            first = false;
            s += Scalar<T>::to_string(c);
            for (std::size_t j = 0; j < dim_; ++j) {
                if (a[j] == 0) continue;
                s += "*x" + std::to_string(j + 1);
                if (a[j] > 1) s += "^" + std::to_string(a[j]);
            }
        }
        return s;
    }

private:
    void check_dim(const Polynomial& o) const {
        if (o.dim_ != dim_) throw std::invalid_argument("Polynomial: dimension mismatch");
    }

    std::size_t dim_;
    Terms terms_;
};

template <Coefficient T>
using PolyVector = std::vector<Polynomial<T>>;

template <Coefficient T>
PolyVector<T> gradient(const Polynomial<T>& p) {
    PolyVector<T> g;
    g.reserve(p.dim());
    for (std::size_t j = 0; j < p.dim(); ++j) g.push_back(p.partial(j));
    return g;
}

template <Coefficient T>
Polynomial<T> laplacian(const Polynomial<T>& p) {
    Polynomial<T> out(p.dim());
    for (std::size_t j = 0; j < p.dim(); ++j) out += p.partial(j).partial(j);
    return out;
}

template <Coefficient T>
Polynomial<T> divergence(const PolyVector<T>& field) {
    if (field.empty()) throw std::invalid_argument("divergence: empty field");
    Polynomial<T> out(field.front().dim());
    for (std::size_t j = 0; j < field.size(); ++j) out += field[j].partial(j);
    return out;
}

/// sum_j a_j b_j for vectors of polynomials.
template <Coefficient T>
Polynomial<T> dot(const PolyVector<T>& a, const PolyVector<T>& b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("dot: size mismatch");
    Polynomial<T> out(a.front().dim());
    for (std::size_t j = 0; j < a.size(); ++j) out += a[j] * b[j];
    return out;
}

/// M v for a constant matrix M and polynomial vector v.
template <Coefficient T>
PolyVector<T> apply_matrix(const DenseMatrix<T>& m, const PolyVector<T>& v) {
    if (m.cols() != v.size() || v.empty()) throw std::invalid_argument("apply_matrix: shape mismatch");
    PolyVector<T> out(m.rows(), Polynomial<T>(v.front().dim()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!Scalar<T>::is_zero(m(i, j))) out[i] += v[j] * m(i, j);
    return out;
}

/// The coordinate field x = (x_1, ..., x_q).
template <Coefficient T>
PolyVector<T> coordinate_field(std::size_t dim) {
    PolyVector<T> x;
    for (std::size_t j = 0; j < dim; ++j) x.push_back(Polynomial<T>::variable(dim, j));
    return x;
}

/// Exact curl-free test: d_i v_j == d_j v_i for all i < j.
template <Coefficient T>
bool is_curl_free(const PolyVector<T>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (!(v[j].partial(i) == v[i].partial(j))) return false;
    return true;
}

extern template class Polynomial<double>;
extern template class Polynomial<Rational>;

}  // namespace levyclt
