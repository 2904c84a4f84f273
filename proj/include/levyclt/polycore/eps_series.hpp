#pragma once

// Truncated power series in eps whose coefficients are polynomials in x.

#include "levyclt/polycore/polynomial.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace levyclt {

template <Coefficient T>
class EpsSeries {
public:
    EpsSeries(std::size_t dim, int order) : dim_(dim), coeffs_(static_cast<std::size_t>(check_order(order)) + 1, Polynomial<T>(dim)) {}
    EpsSeries(std::vector<Polynomial<T>> coeffs) : dim_(coeffs.empty() ? 0 : coeffs.front().dim()), coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw std::invalid_argument("EpsSeries: need at least the eps^0 coefficient");
        for (const auto& c : coeffs_)
            if (c.dim() != dim_) throw std::invalid_argument("EpsSeries: coefficient dimension mismatch");
    }

    static EpsSeries constant(const Polynomial<T>& p, int order) {
        EpsSeries s(p.dim(), order);
        s.coeffs_[0] = p;
        return s;
    }
    static EpsSeries one(std::size_t dim, int order) {
        return constant(Polynomial<T>::constant(dim, Scalar<T>::one()), order);
    }

    std::size_t dim() const { return dim_; }
    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    const Polynomial<T>& operator[](int k) const { return coeffs_.at(static_cast<std::size_t>(k)); }
    Polynomial<T>& operator[](int k) { return coeffs_.at(static_cast<std::size_t>(k)); }
    const std::vector<Polynomial<T>>& coeffs() const { return coeffs_; }

    EpsSeries truncated(int order) const {
        EpsSeries out(dim_, std::min(order, this->order()));
        for (int k = 0; k <= out.order(); ++k) out.coeffs_[static_cast<std::size_t>(k)] = coeffs_[static_cast<std::size_t>(k)];
        return out;
    }

    /// Evaluates sum_k eps^k c_k(x) in floating point.
    double evaluate(double eps, std::span<const double> x) const {
        double sum = 0.0, pw = 1.0;
        for (const auto& c : coeffs_) {
            sum += pw * c.evaluate(x);
            pw *= eps;
        }
        return sum;
    }

    bool operator==(const EpsSeries& o) const { return coeffs_ == o.coeffs_; }

private:
    static int check_order(int order) {
        if (order < 0) throw std::invalid_argument("EpsSeries: negative truncation order");
        return order;
    }

    std::size_t dim_;
    std::vector<Polynomial<T>> coeffs_;
};

template <Coefficient T>
EpsSeries<T> series_add(const EpsSeries<T>& a, const EpsSeries<T>& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("series_add: dimension mismatch");
    EpsSeries<T> out(a.dim(), std::min(a.order(), b.order()));
    for (int k = 0; k <= out.order(); ++k) out[k] = a[k] + b[k];
    return out;
}

template <Coefficient T>
EpsSeries<T> series_scale(const EpsSeries<T>& a, const T& s) {
    EpsSeries<T> out = a;
    for (int k = 0; k <= out.order(); ++k) out[k] *= s;
    return out;
}

template <Coefficient T>
EpsSeries<T> series_mul(const EpsSeries<T>& a, const EpsSeries<T>& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("series_mul: dimension mismatch");
    const int r = std::min(a.order(), b.order());
    EpsSeries<T> out(a.dim(), r);
    for (int i = 0; i <= r; ++i) {
        if (a[i].is_zero()) continue;
        for (int j = 0; i + j <= r; ++j) {
            if (b[j].is_zero()) continue;
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

/// exp(s) for s with vanishing eps^0 coefficient; k E_k = sum_{j=1}^k j s_j E_{k-j}.
template <Coefficient T>
EpsSeries<T> series_exp(const EpsSeries<T>& s) {
    if (!s[0].is_zero()) throw std::invalid_argument("series_exp: eps^0 coefficient must vanish");
    const int r = s.order();
    EpsSeries<T> e = EpsSeries<T>::one(s.dim(), r);
    for (int k = 1; k <= r; ++k) {
        Polynomial<T> acc(s.dim());
        for (int j = 1; j <= k; ++j) {
            if (s[j].is_zero() || e[k - j].is_zero()) continue;
            acc += (s[j] * e[k - j]) * Scalar<T>::from_int(j);
        }
        e[k] = acc * Scalar<T>::from_ratio(1, k);
    }
    return e;
}

/// 1/s for s with eps^0 coefficient exactly 1; R_k = -sum_{j=1}^k s_j R_{k-j}.
template <Coefficient T>
EpsSeries<T> series_reciprocal(const EpsSeries<T>& s) {
    if (!(s[0] == Polynomial<T>::constant(s.dim(), Scalar<T>::one())))
        throw std::invalid_argument("series_reciprocal: eps^0 coefficient must be 1");
    const int r = s.order();
    EpsSeries<T> out = EpsSeries<T>::one(s.dim(), r);
    for (int k = 1; k <= r; ++k) {
        Polynomial<T> acc(s.dim());
        for (int j = 1; j <= k; ++j) {
            if (s[j].is_zero() || out[k - j].is_zero()) continue;
            acc -= s[j] * out[k - j];
        }
        out[k] = std::move(acc);
    }
    return out;
}

/// Expansion of S(x + sum_{k>=1} eps^k U_k(x)) in powers of eps, truncated at `order`
/// (default r * deg S, where the expansion terminates).
template <Coefficient T>
EpsSeries<T> taylor_shift(const Polynomial<T>& S, const std::vector<PolyVector<T>>& U, int order = -1) {
    const std::size_t q = S.dim();
    for (const auto& u : U) {
        if (u.size() != q) throw std::invalid_argument("taylor_shift: displacement arity mismatch");
        for (const auto& c : u)
            if (c.dim() != q) throw std::invalid_argument("taylor_shift: displacement dimension mismatch");
    }
    if (order < 0) order = static_cast<int>(U.size()) * std::max(S.degree(), 0);

    std::vector<EpsSeries<T>> X;
    for (std::size_t j = 0; j < q; ++j) {
        EpsSeries<T> xj(q, order);
        xj[0] = Polynomial<T>::variable(q, j);
        for (std::size_t k = 0; k < U.size() && static_cast<int>(k) + 1 <= order; ++k) xj[static_cast<int>(k) + 1] = U[k][j];
        X.push_back(std::move(xj));
    }
    std::vector<std::vector<EpsSeries<T>>> powers(q);
    for (std::size_t j = 0; j < q; ++j) powers[j].push_back(EpsSeries<T>::one(q, order));

    EpsSeries<T> out(q, order);
    for (const auto& [a, c] : S.terms()) {
        EpsSeries<T> term = EpsSeries<T>::constant(Polynomial<T>::constant(q, c), order);
        for (std::size_t j = 0; j < q; ++j) {
            while (static_cast<int>(powers[j].size()) <= a[j]) powers[j].push_back(series_mul(powers[j].back(), X[j]));
            if (a[j] > 0) term = series_mul(term, powers[j][static_cast<std::size_t>(a[j])]);
        }
        out = series_add(out, term);
    }
    return out;
}

}  // namespace levyclt
