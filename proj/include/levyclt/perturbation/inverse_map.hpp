#pragma once

// Gradient perturbations p_k = grad u_k whose push-forward of N(0, Sigma) has density
// phi_Sigma (1 + sum_k eps^k Q_k) up to O(eps^{r+1}).

#include "levyclt/perturbation/hermite_pde.hpp"
#include "levyclt/polycore/eps_series.hpp"

#include <span>
#include <vector>

namespace levyclt {

template <Coefficient T>
class GradientPolyMap {
public:
    GradientPolyMap(DenseMatrix<T> sigma, std::vector<Polynomial<T>> potentials)
        : sigma_(std::move(sigma)), potentials_(std::move(potentials)) {
        for (const auto& u : potentials_) {
            if (u.dim() != sigma_.rows()) throw std::invalid_argument("GradientPolyMap: potential dimension mismatch");
            gradients_.push_back(gradient(u));
        }
    }

    std::size_t dim() const { return sigma_.rows(); }
    int order() const { return static_cast<int>(potentials_.size()); }
    const DenseMatrix<T>& sigma() const { return sigma_; }
    const std::vector<Polynomial<T>>& potentials() const { return potentials_; }
    const std::vector<PolyVector<T>>& gradients() const { return gradients_; }
    bool is_identity() const {
        for (const auto& u : potentials_)
            if (!u.is_zero()) return false;
        return true;
    }

    /// out = x + sum_{k <= r} eps^k p_k(x); r < 0 uses every level.
    void apply(double eps, std::span<const double> x, std::span<double> out, int r = -1) const {
        const std::size_t q = dim();
        const int levels = r < 0 ? order() : std::min(r, order());
        for (std::size_t j = 0; j < q; ++j) out[j] = x[j];
        double pw = 1.0;
        for (int k = 0; k < levels; ++k) {
            pw *= eps;
            for (std::size_t j = 0; j < q; ++j) out[j] += pw * gradients_[static_cast<std::size_t>(k)][j].evaluate(x);
        }
    }

    template <Coefficient U>
    GradientPolyMap<U> cast() const {
        std::vector<Polynomial<U>> pots;
        for (const auto& u : potentials_) pots.push_back(u.template cast<U>());
        return GradientPolyMap<U>(sigma_.template cast<U>(), std::move(pots));
    }

private:
    DenseMatrix<T> sigma_;
    std::vector<Polynomial<T>> potentials_;
    std::vector<PolyVector<T>> gradients_;
};

/// Formal series exp(x.Sigma^{-1}U + U.Sigma^{-1}U/2) / det(I + DU) = 1 + sum eps^k T_k for
/// U = sum_j eps^j grad u_j, truncated at `order`.
template <Coefficient T>
EpsSeries<T> pushforward_series(const std::vector<Polynomial<T>>& u, const DenseMatrix<T>& sigma, int order) {
    const std::size_t q = sigma.rows();
    const DenseMatrix<T> inv = sigma.inverse();
    // U as q series
    std::vector<EpsSeries<T>> U(q, EpsSeries<T>(q, order));
    std::vector<std::vector<EpsSeries<T>>> M(q, std::vector<EpsSeries<T>>(q, EpsSeries<T>(q, order)));
    for (std::size_t j = 0; j < u.size() && static_cast<int>(j) + 1 <= order; ++j) {
        const int e = static_cast<int>(j) + 1;
        const auto g = gradient(u[j]);
        for (std::size_t a = 0; a < q; ++a) {
            U[a][e] = g[a];
            for (std::size_t b = 0; b < q; ++b) M[a][b][e] = g[a].partial(b);
        }
    }
    EpsSeries<T> exponent(q, order);
    const auto x = coordinate_field<T>(q);
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < q; ++b) {
            if (Scalar<T>::is_zero(inv(a, b))) continue;
            EpsSeries<T> xa = EpsSeries<T>::constant(x[a], order);
            EpsSeries<T> lin = series_mul(xa, U[b]);
            EpsSeries<T> quad = series_scale(series_mul(U[a], U[b]), Scalar<T>::from_ratio(1, 2));
            exponent = series_add(exponent, series_scale(series_add(lin, quad), inv(a, b)));
        }
    // -log det(I + M) = -tr log(I + M) = sum_{n>=1} (-1)^n tr(M^n) / n; M = O(eps)
    std::vector<std::vector<EpsSeries<T>>> Mn = M;
    for (int n = 1; n <= order; ++n) {
        EpsSeries<T> tr(q, order);
        for (std::size_t a = 0; a < q; ++a) tr = series_add(tr, Mn[a][a]);
        exponent = series_add(exponent, series_scale(tr, Scalar<T>::from_ratio(n % 2 == 0 ? 1 : -1, n)));
        if (n == order) break;
        std::vector<std::vector<EpsSeries<T>>> next(q, std::vector<EpsSeries<T>>(q, EpsSeries<T>(q, order)));
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < q; ++b)
                for (std::size_t c = 0; c < q; ++c) next[a][b] = series_add(next[a][b], series_mul(Mn[a][c], M[c][b]));
        Mn = std::move(next);
    }
    return series_exp(exponent);
}

/// S~_{k+1} from u_1..u_k and targets S_1..S_k: the eps^{k+1} coefficient of the push-forward
/// series minus the Taylor-shift terms w_{j,l} (j + l = k + 1, l >= 1) of S_j(x + sum eps^i grad u_i).
/// Lower levels are checked first: T_j - sum w - S_j must vanish for j <= k.
template <Coefficient T>
Polynomial<T> compute_S_tilde(const std::vector<Polynomial<T>>& u, const std::vector<Polynomial<T>>& S, const DenseMatrix<T>& sigma) {
    const int k = static_cast<int>(u.size());
    if (static_cast<int>(S.size()) != k) throw std::invalid_argument("compute_S_tilde: need as many targets as potentials");
    const std::size_t q = sigma.rows();
    const EpsSeries<T> Tser = pushforward_series(u, sigma, k + 1);

    std::vector<PolyVector<T>> U;
    for (const auto& uj : u) U.push_back(gradient(uj));
    std::vector<EpsSeries<T>> shifts;
    for (int j = 1; j <= k; ++j) shifts.push_back(taylor_shift(S[static_cast<std::size_t>(j - 1)], U, k + 1 - j));

    auto level = [&](int n) {
        Polynomial<T> out = Tser[n];
        for (int j = 1; j < n && j <= k; ++j) {
            const int l = n - j;
            const auto& sh = shifts[static_cast<std::size_t>(j - 1)];
            if (l <= sh.order()) out -= sh[l];
        }
        return out;
    };
    for (int j = 1; j <= k; ++j) {
        Polynomial<T> resid = level(j) - S[static_cast<std::size_t>(j - 1)];
        bool zero;
        if constexpr (Scalar<T>::exact) {
            zero = resid.is_zero();
        } else {
            zero = true;
            for (const auto& [a, c] : resid.terms())
                if (std::abs(c) > 1e-9) zero = false;
        }
        if (!zero) throw std::invalid_argument("compute_S_tilde: inputs inconsistent at level " + std::to_string(j));
    }
    (void)q;
    return level(k + 1);
}

/// Builds u_1..u_r with S~_1 = 0 and -Lap u_k + x.Sigma^{-1} grad u_k = Q_k - S~_k.
template <Coefficient T>
GradientPolyMap<T> invert_S_map(const std::vector<Polynomial<T>>& Q, const DenseMatrix<T>& sigma) {
    std::vector<Polynomial<T>> u;
    std::vector<Polynomial<T>> targets;
    const std::size_t q = sigma.rows();
    for (std::size_t k = 0; k < Q.size(); ++k) {
        const Polynomial<T> s_tilde = k == 0 ? Polynomial<T>(q) : compute_S_tilde(u, targets, sigma);
        u.push_back(solve_hermite_pde(Q[k] - s_tilde, sigma));
        targets.push_back(Q[k]);
    }
    return GradientPolyMap<T>(sigma, std::move(u));
}

/// Residual -Lap u_k + x.Sigma^{-1} grad u_k - (Q_k - S~_k) for every level.
template <Coefficient T>
std::vector<Polynomial<T>> pde_residuals(const GradientPolyMap<T>& map, const std::vector<Polynomial<T>>& Q) {
    std::vector<Polynomial<T>> out;
    const auto& u = map.potentials();
    for (std::size_t k = 0; k < u.size(); ++k) {
        std::vector<Polynomial<T>> prev(u.begin(), u.begin() + static_cast<long>(k));
        std::vector<Polynomial<T>> tg(Q.begin(), Q.begin() + static_cast<long>(k));
        const Polynomial<T> s_tilde = k == 0 ? Polynomial<T>(map.dim()) : compute_S_tilde(prev, tg, map.sigma());
        out.push_back(hermite_operator(u[k], map.sigma()) - (Q[k] - s_tilde));
    }
    return out;
}

/// u(A x) and p'(x) = A^T p(A x) for orthogonal A.
template <Coefficient T>
GradientPolyMap<T> rotate_map(const GradientPolyMap<T>& map, const DenseMatrix<T>& A) {
    std::vector<Polynomial<T>> pots;
    for (const auto& u : map.potentials()) pots.push_back(u.compose_linear(A));
    return GradientPolyMap<T>(A.transpose() * map.sigma() * A, std::move(pots));
}

/// Density at y of the push-forward of N(0, sigma^2) (1D) under x + sum eps^k p_k(x),
/// summing phi(x)/|g'(x)| over all real preimages (roots of a polynomial).
double pushforward_density_1d(const GradientPolyMap<double>& map, double eps, double y);

/// P(x + sum_{k <= r} eps^k p_k(x) <= y) for x ~ N(0, sigma^2): Gaussian mass of the
/// sublevel set, whose endpoints are the real roots. r < 0 uses every level.
double pushforward_cdf_1d(const GradientPolyMap<double>& map, double eps, double y, int r = -1);

/// Inverse of pushforward_cdf_1d by bisection on y.
double pushforward_quantile_1d(const GradientPolyMap<double>& map, double eps, double t, int r = -1);

}  // namespace levyclt
