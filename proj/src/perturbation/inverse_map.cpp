#include "levyclt/perturbation/inverse_map.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace levyclt {

namespace {

// g(x) = x + sum_{k <= r} eps^k p_k(x) - y
Polynomial<double> shifted_map(const GradientPolyMap<double>& map, double eps, double y, int r) {
    Polynomial<double> g = Polynomial<double>::variable(1, 0) - Polynomial<double>::constant(1, y);
    const int levels = r < 0 ? map.order() : std::min(r, map.order());
    double pw = 1.0;
    for (int k = 0; k < levels; ++k) {
        pw *= eps;
        g += map.gradients()[static_cast<std::size_t>(k)][0] * pw;
    }
    return g;
}

std::vector<double> real_roots(const Polynomial<double>& g) {
    const Polynomial<double> dg = g.partial(0);
    const int deg = g.degree();
    std::vector<double> roots;
    if (deg < 1) return roots;
    if (deg == 1) {
        roots.push_back(-g.coefficient(MultiIndex{0}) / g.coefficient(MultiIndex{1}));
    } else {
        Eigen::VectorXd coeffs(deg + 1);
        for (int i = 0; i <= deg; ++i) coeffs(i) = g.coefficient(MultiIndex{i});
        Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
        for (const auto& z : solver.roots()) {
            if (std::abs(z.imag()) > 1e-9 * std::max(1.0, std::abs(z.real()))) continue;
            double x = z.real();
            // polish with Newton on the real line
            for (int it = 0; it < 4; ++it) {
                std::vector<double> pt{x};
                const double d = dg.evaluate(pt);
                if (d == 0.0) break;
                x -= g.evaluate(pt) / d;
            }
            roots.push_back(x);
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace

double pushforward_density_1d(const GradientPolyMap<double>& map, double eps, double y) {
    if (map.dim() != 1) throw std::invalid_argument("pushforward_density_1d: map must be one-dimensional");
    const Polynomial<double> g = shifted_map(map, eps, y, -1);
    const Polynomial<double> dg = g.partial(0);
    const double var = map.sigma()(0, 0);
    auto phi = [var](double x) { return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var); };
    const std::vector<double> roots = real_roots(g);
    double dens = 0.0;
    for (double x : roots) {
        std::vector<double> pt{x};
        const double d = std::abs(dg.evaluate(pt));
        if (d == 0.0) continue;
        dens += phi(x) / d;
    }
    return dens;
}

double pushforward_cdf_1d(const GradientPolyMap<double>& map, double eps, double y, int r) {
    if (map.dim() != 1) throw std::invalid_argument("pushforward_cdf_1d: map must be one-dimensional");
    const Polynomial<double> g = shifted_map(map, eps, y, r);
    const double sd = std::sqrt(map.sigma()(0, 0));
    auto Phi = [sd](double x) { return 0.5 * std::erfc(-x / (sd * std::numbers::sqrt2)); };
    std::vector<double> cuts = real_roots(g);
    // sign of g on each interval between consecutive roots, probed at an interior point
    double mass = 0.0;
    for (std::size_t i = 0; i <= cuts.size(); ++i) {
        const double lo = i == 0 ? -std::numeric_limits<double>::infinity() : cuts[i - 1];
        const double hi = i == cuts.size() ? std::numeric_limits<double>::infinity() : cuts[i];
        double probe;
        if (cuts.empty()) probe = 0.0;
        else if (i == 0) probe = hi - 1.0 - std::abs(hi);
        else if (i == cuts.size()) probe = lo + 1.0 + std::abs(lo);
        else probe = 0.5 * (lo + hi);
        std::vector<double> pt{probe};
        if (g.evaluate(pt) <= 0.0) mass += (i == cuts.size() ? 1.0 : Phi(hi)) - (i == 0 ? 0.0 : Phi(lo));
    }
    return std::clamp(mass, 0.0, 1.0);
}

double pushforward_quantile_1d(const GradientPolyMap<double>& map, double eps, double t, int r) {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("pushforward_quantile_1d: t must lie in (0, 1)");
    double lo = -1.0, hi = 1.0;
    while (pushforward_cdf_1d(map, eps, lo, r) > t) lo *= 2.0;
    while (pushforward_cdf_1d(map, eps, hi, r) < t) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pushforward_cdf_1d(map, eps, mid, r) < t) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace levyclt
