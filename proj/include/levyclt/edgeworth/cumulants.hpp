#pragma once

// Moments and cumulants of a mean-zero law on R^q, indexed by multi-index.

#include "levyclt/polycore/dense_matrix.hpp"
#include "levyclt/polycore/linalg.hpp"
#include "levyclt/polycore/multi_index.hpp"
#include "levyclt/polycore/scalar.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

namespace levyclt {

template <Coefficient T>
using IndexMap = std::map<MultiIndex, T, GradedLexLess>;

/// E X^alpha for 1 <= |alpha| <= order. Every index of that range must be present;
/// first moments must vanish and the second moments must form an SPD matrix.
template <Coefficient T>
class MomentSet {
public:
    MomentSet(std::size_t dim, int order, IndexMap<T> values) : dim_(dim), order_(order), values_(std::move(values)) {
        if (dim == 0) throw std::invalid_argument("MomentSet: dimension must be >= 1");
        if (order < 2) throw std::invalid_argument("MomentSet: order must be >= 2");
        for (auto& [a, v] : values_) {
            if constexpr (Scalar<T>::exact) v.canonicalize();
            if (a.dim() != dim_) throw std::invalid_argument("MomentSet: index dimension mismatch");
            if (a.order() < 1 || a.order() > order_) throw std::invalid_argument("MomentSet: index " + a.to_string() + " outside 1..order");
        }
        for (const auto& a : multi_indices_between(dim_, 1, order_)) {
            auto it = values_.find(a);
            if (it == values_.end()) throw std::invalid_argument("MomentSet: missing moment " + a.to_string());
            if (a.order() == 1 && !Scalar<T>::is_zero(it->second))
                throw std::invalid_argument("MomentSet: first moments must vanish (mean-zero law)");
        }
        if (!is_positive_definite(covariance())) throw std::domain_error("MomentSet: second moments are not positive definite");
    }

    std::size_t dim() const { return dim_; }
    int order() const { return order_; }
    const IndexMap<T>& values() const { return values_; }

    /// E X^alpha; 1 for alpha = 0.
    T value(const MultiIndex& alpha) const {
        if (alpha.order() == 0) return Scalar<T>::one();
        auto it = values_.find(alpha);
        if (it == values_.end()) throw std::out_of_range("MomentSet: no moment " + alpha.to_string());
        return it->second;
    }

    DenseMatrix<T> covariance() const {
        DenseMatrix<T> s(dim_, dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) s(i, j) = values_.at(MultiIndex::unit(dim_, i) + MultiIndex::unit(dim_, j));
        return s;
    }

private:
    std::size_t dim_;
    int order_;
    IndexMap<T> values_;
};

/// Cumulants mu_alpha for 2 <= |alpha| <= order. Absent entries are zero.
template <Coefficient T>
class CumulantSet {
public:
    CumulantSet(std::size_t dim, int order, IndexMap<T> mu) : dim_(dim), order_(order) {
        if (dim == 0) throw std::invalid_argument("CumulantSet: dimension must be >= 1");
        if (order < 2) throw std::invalid_argument("CumulantSet: order must be >= 2");
        for (auto& [a, v] : mu) {
            if constexpr (Scalar<T>::exact) v.canonicalize();
            if (a.dim() != dim_) throw std::invalid_argument("CumulantSet: index dimension mismatch");
            if (a.order() < 2 || a.order() > order_)
                throw std::invalid_argument("CumulantSet: index " + a.to_string() + " outside 2..order");
            if (!Scalar<T>::is_zero(v)) mu_.emplace(a, v);
        }
        const DenseMatrix<double> sd = covariance().template cast<double>();
        eigenvalues_ = symmetric_eigen(sd).values;
    }

    std::size_t dim() const { return dim_; }
    int order() const { return order_; }
    const IndexMap<T>& values() const { return mu_; }

    T mu(const MultiIndex& alpha) const {
        if (alpha.order() > order_) throw std::out_of_range("CumulantSet: order " + std::to_string(alpha.order()) + " not available");
        auto it = mu_.find(alpha);
        return it == mu_.end() ? Scalar<T>::zero() : it->second;
    }

    DenseMatrix<T> covariance() const {
        DenseMatrix<T> s(dim_, dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) s(i, j) = mu(MultiIndex::unit(dim_, i) + MultiIndex::unit(dim_, j));
        return s;
    }

    /// Eigenvalues of Sigma, ascending.
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

    /// lambda_1 < 1e-10 lambda_q, or an exact zero determinant in rational mode.
    bool is_singular() const {
        if constexpr (Scalar<T>::exact) {
            if (sgn(covariance().determinant()) == 0) return true;
        }
        return !(eigenvalues_.back() > 0.0) || eigenvalues_.front() < 1e-10 * eigenvalues_.back();
    }
    void require_nonsingular(const char* who) const {
        if (is_singular()) throw std::domain_error(std::string(who) + ": covariance is singular");
    }

    bool is_gaussian() const {
        for (const auto& [a, v] : mu_)
            if (a.order() >= 3) return false;
        return true;
    }

    /// Cumulants of m^{-1/2}(X_1 + ... + X_m) when eps = m^{-1/2}: mu_alpha eps^{|alpha|-2}.
    CumulantSet scaled(const T& eps) const {
        IndexMap<T> out;
        for (const auto& [a, v] : mu_) {
            T s = v;
            for (int k = 2; k < a.order(); ++k) s *= eps;
            out.emplace(a, s);
        }
        return CumulantSet(dim_, order_, std::move(out));
    }

    /// Same law, lower order.
    CumulantSet truncated(int order) const {
        IndexMap<T> out;
        for (const auto& [a, v] : mu_)
            if (a.order() <= order) out.emplace(a, v);
        return CumulantSet(dim_, order, std::move(out));
    }

    template <Coefficient U>
    CumulantSet<U> cast() const {
        IndexMap<U> out;
        for (const auto& [a, v] : mu_) {
            if constexpr (std::is_same_v<T, U>) out.emplace(a, v);
            else if constexpr (std::is_same_v<U, double>) out.emplace(a, Scalar<T>::to_double(v));
            else out.emplace(a, Rational(v));
        }
        return CumulantSet<U>(dim_, order_, std::move(out));
    }

private:
    std::size_t dim_;
    int order_;
    IndexMap<T> mu_;
    std::vector<double> eigenvalues_;
};

namespace detail {

// m_alpha = sum_{0 <= beta <= alpha - e_i} C(alpha - e_i, beta) kappa_{beta + e_i} m_{alpha - e_i - beta},
// i the first non-zero coordinate of alpha. The beta = alpha - e_i term is kappa_alpha.
template <Coefficient T, class Kappa, class Moment>
T moment_cumulant_rest(const MultiIndex& alpha, Kappa&& kappa, Moment&& moment) {
    std::size_t i = 0;
    while (alpha[i] == 0) ++i;
    const MultiIndex a1 = alpha.incremented(i, -1);
    T rest = Scalar<T>::zero();
    for (const auto& beta : sub_indices(a1)) {
        if (beta == a1) continue;
        const MultiIndex kb = beta.incremented(i, 1);
        if (kb.order() < 2) continue;  // mean-zero: first cumulants vanish
        const MultiIndex mb = a1 - beta;
        T k = kappa(kb);
        if (Scalar<T>::is_zero(k)) continue;
        T m = moment(mb);
        if (Scalar<T>::is_zero(m)) continue;
        T c;
        if constexpr (Scalar<T>::exact) c = Rational(binomial(a1, beta));
        else c = binomial(a1, beta).get_d();
        rest += c * k * m;
    }
    return rest;
}

}  // namespace detail

template <Coefficient T>
CumulantSet<T> moments_to_cumulants(const MomentSet<T>& m) {
    IndexMap<T> kappa;
    auto kap = [&](const MultiIndex& a) { return kappa.at(a); };
    auto mom = [&](const MultiIndex& a) { return m.value(a); };
    for (const auto& a : multi_indices_between(m.dim(), 2, m.order()))
        kappa[a] = m.value(a) - detail::moment_cumulant_rest<T>(a, kap, mom);
    return CumulantSet<T>(m.dim(), m.order(), std::move(kappa));
}

template <Coefficient T>
MomentSet<T> cumulants_to_moments(const CumulantSet<T>& c) {
    IndexMap<T> mom;
    for (const auto& a : multi_indices_of_degree(c.dim(), 1)) mom[a] = Scalar<T>::zero();
    auto kap = [&](const MultiIndex& a) { return c.mu(a); };
    auto mm = [&](const MultiIndex& a) { return a.order() == 0 ? Scalar<T>::one() : mom.at(a); };
    for (const auto& a : multi_indices_between(c.dim(), 2, c.order()))
        mom[a] = c.mu(a) + detail::moment_cumulant_rest<T>(a, kap, mm);
    return MomentSet<T>(c.dim(), c.order(), std::move(mom));
}

/// Text format: one line per cumulant, "a_1 ... a_q value", '#' comments allowed,
/// values as p/q fractions or exact decimals. Dimension is the token count minus
/// one; order is max |alpha| unless `order` > 0.
CumulantSet<Rational> read_cumulants(std::istream& in, int order = 0);
CumulantSet<Rational> read_cumulants_file(const std::string& path, int order = 0);
void write_cumulants(std::ostream& out, const CumulantSet<Rational>& c);

}  // namespace levyclt
