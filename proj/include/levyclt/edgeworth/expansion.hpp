#pragma once

// Characteristic-function polynomials P_k and Edgeworth polynomials Q_k.

#include "levyclt/edgeworth/cumulants.hpp"
#include "levyclt/polycore/eps_series.hpp"
#include "levyclt/polycore/polynomial.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace levyclt {

/// P_1..P_r. Coefficients are the real b_alpha of (iz)^alpha, i.e. each returned
/// polynomial is in the variable w = iz:  exp(sum_k eps^k sum_{|a|=k+2} mu_a w^a / a!)
/// = 1 + sum_k eps^k P_k(w).
template <Coefficient T>
std::vector<Polynomial<T>> build_P(const CumulantSet<T>& c, int r) {
    if (r < 1) throw std::invalid_argument("build_P: r must be >= 1");
    if (c.order() < r + 2) throw std::invalid_argument("build_P: need cumulants up to order r+2");
    const std::size_t q = c.dim();
    EpsSeries<T> s(q, r);
    for (int k = 1; k <= r; ++k)
        for (const auto& a : multi_indices_of_degree(q, k + 2)) {
            T v = c.mu(a);
            if (Scalar<T>::is_zero(v)) continue;
            if constexpr (Scalar<T>::exact) s[k].add_term(a, v / Rational(factorial(a)));
            else s[k].add_term(a, v / factorial(a).get_d());
        }
    const EpsSeries<T> e = series_exp(s);
    std::vector<Polynomial<T>> out;
    for (int k = 1; k <= r; ++k) out.push_back(e[k]);
    return out;
}

/// h_alpha = (-d)^alpha phi_Sigma / phi_Sigma, generated by
/// h_{alpha + e_j} = (Sigma^{-1} x)_j h_alpha - d_j h_alpha. For diagonal Sigma this is
/// prod_j lambda_j^{-a_j/2} H_{a_j}(lambda_j^{-1/2} x_j).
template <Coefficient T>
class GaussianHermiteBasis {
public:
    explicit GaussianHermiteBasis(const DenseMatrix<T>& sigma) : q_(sigma.rows()) {
        const DenseMatrix<T> inv = sigma.inverse();
        for (std::size_t j = 0; j < q_; ++j) {
            Polynomial<T> y(q_);
            for (std::size_t i = 0; i < q_; ++i) y.add_term(MultiIndex::unit(q_, i), inv(j, i));
            sinv_x_.push_back(std::move(y));
        }
        memo_.emplace(MultiIndex(q_), Polynomial<T>::constant(q_, Scalar<T>::one()));
    }

    const Polynomial<T>& operator()(const MultiIndex& alpha) {
        if (auto it = memo_.find(alpha); it != memo_.end()) return it->second;
        std::size_t j = 0;
        while (alpha[j] == 0) ++j;
        const MultiIndex prev = alpha.incremented(j, -1);
        Polynomial<T> h = (*this)(prev);
        Polynomial<T> next = sinv_x_[j] * h - h.partial(j);
        return memo_.emplace(alpha, std::move(next)).first->second;
    }

private:
    std::size_t q_;
    PolyVector<T> sinv_x_;
    std::map<MultiIndex, Polynomial<T>, GradedLexLess> memo_;
};

/// Q_1..Q_r with phi_Sigma Q_k the inverse Fourier transform (kernel e^{-izx}) of
/// e^{-z.Sigma z/2} P_k(z).
template <Coefficient T>
std::vector<Polynomial<T>> build_Q(const CumulantSet<T>& c, int r) {
    c.require_nonsingular("build_Q");
    const auto P = build_P(c, r);
    GaussianHermiteBasis<T> h(c.covariance());
    std::vector<Polynomial<T>> out;
    for (const auto& p : P) {
        Polynomial<T> qk(c.dim());
        for (const auto& [a, b] : p.terms()) qk += h(a) * b;
        out.push_back(std::move(qk));
    }
    return out;
}

/// Gaussian density with a fixed covariance, evaluated in floating point.
class GaussianDensity {
public:
    explicit GaussianDensity(const DenseMatrix<double>& sigma);
    double operator()(std::span<const double> x) const;
    std::size_t dim() const { return inv_.rows(); }
    const DenseMatrix<double>& inverse() const { return inv_; }

private:
    DenseMatrix<double> inv_;
    double norm_;
};

/// phi_Sigma(x) (1 + sum_k eps^k Q_k(x)); signed, may be negative.
class EdgeworthDensity {
public:
    EdgeworthDensity(const DenseMatrix<double>& sigma, std::vector<Polynomial<double>> Q)
        : phi_(sigma), Q_(std::move(Q)) {}
    template <Coefficient T>
    EdgeworthDensity(const CumulantSet<T>& c, int r)
        : phi_(c.covariance().template cast<double>()), Q_(cast_all(r == 0 ? std::vector<Polynomial<T>>{} : build_Q(c, r))) {}

    double operator()(double eps, std::span<const double> x) const {
        double corr = 1.0, pw = 1.0;
        for (const auto& q : Q_) {
            pw *= eps;
            corr += pw * q.evaluate(x);
        }
        return phi_(x) * corr;
    }
    const std::vector<Polynomial<double>>& Q() const { return Q_; }

private:
    template <Coefficient T>
    static std::vector<Polynomial<double>> cast_all(const std::vector<Polynomial<T>>& v) {
        std::vector<Polynomial<double>> out;
        for (const auto& p : v) out.push_back(p.template cast<double>());
        return out;
    }

    GaussianDensity phi_;
    std::vector<Polynomial<double>> Q_;
};

template <Coefficient T>
double edgeworth_density(const CumulantSet<T>& c, int r, double eps, std::span<const double> x) {
    if (!(eps > 0.0)) throw std::invalid_argument("edgeworth_density: eps must be positive");
    return EdgeworthDensity(c, r)(eps, x);
}

}  // namespace levyclt
