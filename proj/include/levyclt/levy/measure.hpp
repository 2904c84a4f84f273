#pragma once

// Levy measures described shell by shell: mass, covariance, mean and moments of the
// restriction to {a < |z| <= b}, plus a sampler for the normalized restriction.

#include "levyclt/polycore/dense_matrix.hpp"
#include "levyclt/polycore/multi_index.hpp"
#include "levyclt/sampling/rng.hpp"

#include <complex>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace levyclt {

inline constexpr double kInfiniteRadius = std::numeric_limits<double>::infinity();

/// Surface measure of the unit sphere in R^q, 2 pi^{q/2} / Gamma(q/2).
double sphere_surface(std::size_t q);
/// Integral of theta^alpha over the unit sphere: 2 prod Gamma((a_j+1)/2) / Gamma((|a|+q)/2)
/// when every a_j is even, 0 otherwise.
double sphere_moment(const MultiIndex& alpha);

class LevyMeasure {
public:
    virtual ~LevyMeasure() = default;

    virtual std::size_t dim() const = 0;
    /// Radius beyond which the measure vanishes (may be infinite).
    virtual double support_radius() const = 0;
    virtual std::string kind() const = 0;

    /// nu({a < |z| <= b}).
    virtual double shell_mass(double a, double b) const = 0;
    /// integral of z z^T over the shell.
    virtual DenseMatrix<double> shell_covariance(double a, double b) const = 0;
    /// integral of z over the shell.
    virtual std::vector<double> shell_mean(double a, double b) const = 0;
    /// integral of z^alpha over the shell.
    virtual double shell_moment(double a, double b, const MultiIndex& alpha) const = 0;
    /// One draw from nu restricted to the shell and normalized. Requires positive mass.
    virtual void sample_shell(double a, double b, RngStream& rng, std::span<double> out) const = 0;
    /// E exp(i s.Z) for Z drawn from the normalized shell restriction.
    virtual std::complex<double> shell_char_fn(double a, double b, std::span<const double> s) const = 0;
};

/// Rotation-invariant measure nu(dz) = g(|z|) dz. Subclasses give radial integrals
/// I_k(a, b) = int_a^b rho^{k+q-1} g(rho) d rho and a radius sampler.
class RadialMeasure : public LevyMeasure {
public:
    explicit RadialMeasure(std::size_t q);

    std::size_t dim() const override { return q_; }

    virtual double radial_integral(double a, double b, double k) const = 0;
    /// Radius drawn with density proportional to rho^{q-1} g(rho) on (a, b].
    virtual double sample_radius(double a, double b, RngStream& rng) const = 0;
    /// g(rho), the density in z at |z| = rho.
    virtual double radial_density(double rho) const = 0;

    double shell_mass(double a, double b) const override;
    DenseMatrix<double> shell_covariance(double a, double b) const override;
    std::vector<double> shell_mean(double a, double b) const override;
    double shell_moment(double a, double b, const MultiIndex& alpha) const override;
    void sample_shell(double a, double b, RngStream& rng, std::span<double> out) const override;
    /// Bessel form for q != 2; for q = 2 a direct (rho, theta) quadrature.
    std::complex<double> shell_char_fn(double a, double b, std::span<const double> s) const override;

protected:
    std::size_t q_;
};

/// nu(dz) = |z|^{-q-alpha} dz on 0 < |z| <= tau.
class StableLikeMeasure final : public RadialMeasure {
public:
    StableLikeMeasure(std::size_t q, double alpha, double tau = 1.0);

    double alpha() const { return alpha_; }
    double support_radius() const override { return tau_; }
    std::string kind() const override { return "stable-like"; }

    double radial_integral(double a, double b, double k) const override;
    double sample_radius(double a, double b, RngStream& rng) const override;
    double radial_density(double rho) const override;

private:
    double alpha_;
    double tau_;
};

/// g tabulated at increasing radii, linear in between, zero outside [r_0, r_n].
class CustomRadialMeasure final : public RadialMeasure {
public:
    CustomRadialMeasure(std::size_t q, std::vector<double> radii, std::vector<double> density);

    double support_radius() const override { return radii_.back(); }
    std::string kind() const override { return "custom-radial"; }

    double radial_integral(double a, double b, double k) const override;
    double sample_radius(double a, double b, RngStream& rng) const override;
    double radial_density(double rho) const override;

private:
    // integral of rho^{k+q-1} (c0 + c1 rho) over [lo, hi] within segment i
    double segment_integral(std::size_t i, double lo, double hi, double k) const;

    std::vector<double> radii_;
    std::vector<double> density_;
};

/// Finite sum of weighted atoms; used to exercise lattice-type degeneracies.
class PointMassMeasure final : public LevyMeasure {
public:
    PointMassMeasure(std::size_t q, std::vector<std::vector<double>> atoms, std::vector<double> weights);

    std::size_t dim() const override { return q_; }
    double support_radius() const override;
    std::string kind() const override { return "point-mass"; }

    double shell_mass(double a, double b) const override;
    DenseMatrix<double> shell_covariance(double a, double b) const override;
    std::vector<double> shell_mean(double a, double b) const override;
    double shell_moment(double a, double b, const MultiIndex& alpha) const override;
    void sample_shell(double a, double b, RngStream& rng, std::span<double> out) const override;
    std::complex<double> shell_char_fn(double a, double b, std::span<const double> s) const override;

private:
    std::vector<std::size_t> in_shell(double a, double b) const;

    std::size_t q_;
    std::vector<std::vector<double>> atoms_;
    std::vector<double> weights_;
    std::vector<double> norms_;
};

/// The zero measure.
class ZeroMeasure final : public LevyMeasure {
public:
    explicit ZeroMeasure(std::size_t q) : q_(q) {}
    std::size_t dim() const override { return q_; }
    double support_radius() const override { return 0.0; }
    std::string kind() const override { return "zero"; }
    double shell_mass(double, double) const override { return 0.0; }
    DenseMatrix<double> shell_covariance(double, double) const override { return DenseMatrix<double>(q_, q_); }
    std::vector<double> shell_mean(double, double) const override { return std::vector<double>(q_, 0.0); }
    double shell_moment(double, double, const MultiIndex&) const override { return 0.0; }
    void sample_shell(double, double, RngStream&, std::span<double>) const override;
    std::complex<double> shell_char_fn(double, double, std::span<const double>) const override { return 1.0; }

private:
    std::size_t q_;
};

}  // namespace levyclt
