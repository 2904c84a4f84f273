#include "levyclt/levy/cramer.hpp"

#include "levyclt/levy/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace levyclt {

CramerProbeResult cramer_probe(const LevyMeasure& nu, int r, double rho, const std::vector<double>& grid,
                               std::vector<double> direction) {
    const std::size_t q = nu.dim();
    if (direction.empty()) {
        direction.assign(q, 0.0);
        direction[0] = 1.0;
    }
    if (direction.size() != q) throw std::invalid_argument("cramer_probe: direction dimension mismatch");
    double n2 = 0.0;
    for (double v : direction) n2 += v * v;
    if (n2 == 0.0) throw std::invalid_argument("cramer_probe: zero direction");
    for (auto& v : direction) v /= std::sqrt(n2);

    auto [a, b] = annulus_bounds(r);
    CramerProbeResult res;
    const double scale = std::ldexp(1.0, r);
    std::vector<double> s(q);
    for (double t : grid) {
        if (t < rho) continue;
        for (std::size_t j = 0; j < q; ++j) s[j] = t * scale * direction[j];
        const double v = std::abs(nu.shell_char_fn(a, b, s));
        if (!std::isfinite(v)) {
            res.ok = false;
            res.message = "non-finite characteristic function at |s| = " + std::to_string(t);
            continue;
        }
        if (v > res.sup_abs) {
            res.sup_abs = v;
            res.argmax = t;
        }
    }
    return res;
}

double cramer_amplify(double rho, double gamma, double delta) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("cramer_amplify: gamma must lie in (0,1)");
    if (!(rho > 0.0)) throw std::invalid_argument("cramer_amplify: rho must be positive");
    if (!(delta > 0.0 && delta < std::min(rho, 1.0))) throw std::invalid_argument("cramer_amplify: delta must lie in (0, min(rho,1))");
    return 1.0 - (1.0 - gamma) * delta * delta / ((rho + 1.0) * (rho + 1.0));
}

SufficientCheckResult sufficient_condition_check(const RadialMeasure& nu, int r, double a, double b, int n_cells,
                                                 int trials, RngStream& rng) {
    const std::size_t q = nu.dim();
    if (q > 2) throw std::invalid_argument("sufficient_condition_check: polar cells implemented for q <= 2");
    if (!(a > 0.0 && a <= 1.0) || !(b > 0.0 && b <= 1.0)) throw std::invalid_argument("sufficient_condition_check: a, b must lie in (0,1]");
    if (n_cells < 1 || trials < 1) throw std::invalid_argument("sufficient_condition_check: need cells and trials");

    auto [lo, hi] = annulus_bounds(r);
    // radial x angular grid; in 1D the angular factor is the sign
    const int n_ang = q == 1 ? 2 : std::max(1, static_cast<int>(std::round(std::sqrt(static_cast<double>(n_cells)))));
    const int n_rad = std::max(1, n_cells / n_ang);
    std::vector<double> leb, mass;
    for (int i = 0; i < n_rad; ++i) {
        const double r1 = lo + (hi - lo) * i / n_rad;
        const double r2 = lo + (hi - lo) * (i + 1) / n_rad;
        const double leb_shell = q == 1 ? 2.0 * (r2 - r1) : std::numbers::pi * (r2 * r2 - r1 * r1);
        const double nu_shell = nu.shell_mass(r1, r2);
        for (int j = 0; j < n_ang; ++j) {
            leb.push_back(leb_shell / n_ang);
            mass.push_back(nu_shell / n_ang);
        }
    }
    const double leb_total = std::accumulate(leb.begin(), leb.end(), 0.0);
    const double mass_total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (!(mass_total > 0.0)) throw std::domain_error("sufficient_condition_check: annulus carries no mass");

    SufficientCheckResult res;
    std::vector<std::size_t> order(leb.size());
    for (int t = 0; t < trials; ++t) {
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
            std::swap(order[i - 1], order[std::min(j, i - 1)]);
        }
        double l = 0.0, m = 0.0;
        for (std::size_t k = 0; k < order.size() && l < a * leb_total * (1.0 - 1e-12); ++k) {
            l += leb[order[k]];
            m += mass[order[k]];
        }
        const double ratio = m / mass_total;
        ++res.unions_tested;
        res.min_ratio = std::min(res.min_ratio, ratio);
        if (ratio < b * (1.0 - 1e-12)) res.holds = false;
    }
    return res;
}

}  // namespace levyclt
