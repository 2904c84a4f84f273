#pragma once

// Dyadic shells Omega_r = {2^{-r-1} < |z| <= 2^{-r}} below a cutoff eps.

#include "levyclt/levy/measure.hpp"

#include <vector>

namespace levyclt {

/// Bounds (2^{-r-1}, 2^{-r}].
std::pair<double, double> annulus_bounds(int r);

double annulus_mass(const LevyMeasure& nu, int r);
DenseMatrix<double> annulus_covariance(const LevyMeasure& nu, int r);
std::vector<double> annulus_mean(const LevyMeasure& nu, int r);

struct SmallJumpCovariance {
    DenseMatrix<double> sigma;
    bool clamped = false;  // eps exceeded the support radius and was reduced to it
};

/// Sigma_eps = integral of z z^T over {0 < |z| <= eps}. For stable-like measures this is
/// the closed form S_{q-1} eps^{2-alpha} / (q (2 - alpha)) I.
SmallJumpCovariance small_jump_covariance(const LevyMeasure& nu, double eps);

struct Shell {
    int r;
    double lo;
    double hi;
    double mass;
    DenseMatrix<double> covariance;
    std::vector<double> mean;
};

/// Shells r0..r_max covering (2^{-r_max-1}, eps], r0 = floor(-log2 eps); the first shell is
/// clipped to (2^{-r0-1}, eps]. Shells beyond r_max are dropped.
class AnnulusDecomposition {
public:
    AnnulusDecomposition(const LevyMeasure& nu, double eps, int depth);

    /// Smallest depth whose dropped relative variance is below tol (capped at max_depth).
    static AnnulusDecomposition with_tolerance(const LevyMeasure& nu, double eps, double tol, int max_depth);

    double eps() const { return eps_; }
    int r0() const { return r0_; }
    int r_max() const { return r_max_; }
    const std::vector<Shell>& shells() const { return shells_; }

    /// Sum of the retained shell covariances.
    const DenseMatrix<double>& retained_covariance() const { return retained_; }
    /// tr(dropped) / tr(Sigma_eps); 0 when Sigma_eps vanishes.
    double tail_relative_variance() const { return tail_rel_; }
    /// Expected number of retained jumps per unit time.
    double total_intensity() const;

private:
    double eps_;
    int r0_;
    int r_max_;
    std::vector<Shell> shells_;
    DenseMatrix<double> retained_;
    double tail_rel_ = 0.0;
};

}  // namespace levyclt
