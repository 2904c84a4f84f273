#include "levyclt/edgeworth/diagnostics.hpp"

#include "levyclt/polycore/gaussian_moment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levyclt {

double kappa(double abs_moment) {
    if (!(abs_moment >= 0.0)) throw std::invalid_argument("kappa: absolute moment must be non-negative");
    return std::max(1.0, abs_moment);
}

double kappa_from_samples(std::span<const double> points, std::size_t dim, double M) {
    if (dim == 0 || points.size() % dim != 0 || points.empty()) throw std::invalid_argument("kappa_from_samples: bad sample layout");
    if (!(M > 0.0)) throw std::invalid_argument("kappa_from_samples: M must be positive");
    const std::size_t n = points.size() / dim;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r2 = 0.0;
        for (std::size_t j = 0; j < dim; ++j) r2 += points[i * dim + j] * points[i * dim + j];
        sum += std::pow(r2, 0.5 * M);
    }
    return kappa(sum / static_cast<double>(n));
}

double kappa_gaussian(const DenseMatrix<Rational>& sigma, int M) {
    if (M <= 0 || M % 2 != 0) throw std::invalid_argument("kappa_gaussian: M must be a positive even integer");
    const std::size_t q = sigma.rows();
    Polynomial<Rational> r2(q);
    for (std::size_t j = 0; j < q; ++j) r2.add_term(MultiIndex::unit(q, j).incremented(j, 1), Rational(1));
    Polynomial<Rational> p = Polynomial<Rational>::constant(q, Rational(1));
    for (int k = 0; k < M / 2; ++k) p = p * r2;
    GaussianMoments<Rational> gm(sigma);
    return kappa(gm.expectation(p).get_d());
}

MinMResult min_m_heuristic(const CumulantSet<double>& c, int n, double gamma_bar, double kappa_n_tau) {
    if (!(gamma_bar > 0.0 && gamma_bar < 1.0)) throw std::invalid_argument("min_m_heuristic: gamma_bar must lie in (0,1)");
    if (n < 3) throw std::invalid_argument("min_m_heuristic: n must be >= 3");
    if (!(kappa_n_tau >= 1.0)) throw std::invalid_argument("min_m_heuristic: kappa must be >= 1");
    c.require_nonsingular("min_m_heuristic");

    MinMResult res;
    const double expo = std::max(4.0, 12.0 / n);
    res.kappa_bound = static_cast<long>(std::floor(std::pow(kappa_n_tau, expo))) + 1;

    const double q = static_cast<double>(c.dim());
    const double det = c.covariance().determinant();
    const double lambda1 = c.eigenvalues().front();
    const double log_rhs = -0.5 * std::log(det) - 1.5 * (n - 1) * std::log(lambda1) + (n - 2) * std::log(kappa_n_tau);
    const double a = 0.5 * (q + 1) * (n + 1);
    const double lg = std::log(gamma_bar);
    // f(m) = m log(gamma_bar) + a log m is increasing up to m = -a/log(gamma_bar), then decreasing.
    auto holds = [&](double m) { return m * lg + a * std::log(m) <= log_rhs; };
    const double peak = -a / lg;
    const long peak_lo = std::max(1L, static_cast<long>(std::floor(peak)));
    const long peak_hi = std::max(1L, static_cast<long>(std::ceil(peak)));
    long lo = 1;
    if (!(holds(static_cast<double>(peak_lo)) && holds(static_cast<double>(peak_hi)))) {
        long hi = peak_hi;
        while (!holds(static_cast<double>(hi))) hi *= 2;
        long l = peak_hi;
        while (hi - l > 1) {
            long mid = l + (hi - l) / 2;
            (holds(static_cast<double>(mid)) ? hi : l) = mid;
        }
        lo = hi;
    }
    res.char_bound = lo;
    res.m = std::max(res.kappa_bound, res.char_bound);
    return res;
}

}  // namespace levyclt
