#include "levyclt/levy/annulus.hpp"

#include <cmath>
#include <stdexcept>

namespace levyclt {

std::pair<double, double> annulus_bounds(int r) { return {std::ldexp(1.0, -r - 1), std::ldexp(1.0, -r)}; }

double annulus_mass(const LevyMeasure& nu, int r) {
    auto [a, b] = annulus_bounds(r);
    return nu.shell_mass(a, b);
}

DenseMatrix<double> annulus_covariance(const LevyMeasure& nu, int r) {
    auto [a, b] = annulus_bounds(r);
    return nu.shell_covariance(a, b);
}

std::vector<double> annulus_mean(const LevyMeasure& nu, int r) {
    auto [a, b] = annulus_bounds(r);
    return nu.shell_mean(a, b);
}

SmallJumpCovariance small_jump_covariance(const LevyMeasure& nu, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("small_jump_covariance: eps must be positive");
    SmallJumpCovariance out;
    if (eps > nu.support_radius() && nu.support_radius() > 0.0) {
        eps = nu.support_radius();
        out.clamped = true;
    }
    out.sigma = nu.shell_covariance(0.0, eps);
    return out;
}

namespace {

double trace(const DenseMatrix<double>& m) {
    double t = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

}  // namespace

AnnulusDecomposition::AnnulusDecomposition(const LevyMeasure& nu, double eps, int depth)
    : eps_(eps), retained_(nu.dim(), nu.dim()) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("AnnulusDecomposition: eps must be positive");
    if (depth < 0) throw std::invalid_argument("AnnulusDecomposition: depth must be non-negative");
    r0_ = static_cast<int>(std::floor(-std::log2(eps)));
    // guard against log2 rounding at exact powers of two
    while (std::ldexp(1.0, -r0_) < eps) --r0_;
    while (std::ldexp(1.0, -r0_ - 1) >= eps) ++r0_;
    r_max_ = r0_ + depth;
    for (int r = r0_; r <= r_max_; ++r) {
        auto [lo, hi] = annulus_bounds(r);
        hi = std::min(hi, eps);
        Shell s{r, lo, hi, nu.shell_mass(lo, hi), nu.shell_covariance(lo, hi), nu.shell_mean(lo, hi)};
        for (std::size_t i = 0; i < nu.dim(); ++i)
            for (std::size_t j = 0; j < nu.dim(); ++j) retained_(i, j) += s.covariance(i, j);
        shells_.push_back(std::move(s));
    }
    const double full = trace(nu.shell_covariance(0.0, eps));
    tail_rel_ = full > 0.0 ? std::max(0.0, 1.0 - trace(retained_) / full) : 0.0;
}

AnnulusDecomposition AnnulusDecomposition::with_tolerance(const LevyMeasure& nu, double eps, double tol, int max_depth) {
    for (int d = 0; d < max_depth; ++d) {
        AnnulusDecomposition dec(nu, eps, d);
        if (dec.tail_relative_variance() <= tol) return dec;
    }
    return AnnulusDecomposition(nu, eps, max_depth);
}

double AnnulusDecomposition::total_intensity() const {
    double m = 0.0;
    for (const auto& s : shells_) m += s.mass;
    return m;
}

}  // namespace levyclt
