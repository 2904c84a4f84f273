#pragma once

#include "levyclt/levy/annulus.hpp"
#include "levyclt/perturbation/inverse_map.hpp"
#include "levyclt/sampling/rng.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace levyclt {

/// N(0, Sigma) through the symmetric square root of Sigma.
class GaussianSampler {
public:
    explicit GaussianSampler(const DenseMatrix<double>& sigma);
    std::size_t dim() const { return root_.rows(); }
    const DenseMatrix<double>& root() const { return root_; }
    void sample(RngStream& rng, std::span<double> out) const;

private:
    DenseMatrix<double> root_;
    mutable std::vector<double> z_;
};

void sample_gaussian(const DenseMatrix<double>& sigma, RngStream& rng, std::span<double> out);

/// xi + sum_{k <= r} eps^k p_k(xi), xi ~ N(0, Sigma) drawn exactly as GaussianSampler does.
class PerturbedNormalSampler {
public:
    explicit PerturbedNormalSampler(GradientPolyMap<double> map);
    const GradientPolyMap<double>& map() const { return map_; }
    void sample(double eps, int r, RngStream& rng, std::span<double> out) const;

private:
    GradientPolyMap<double> map_;
    GaussianSampler gauss_;
    mutable std::vector<double> xi_;
};

void sample_perturbed_normal(const GradientPolyMap<double>& map, double eps, int r, RngStream& rng, std::span<double> out);

using JumpSampler = std::function<void(RngStream&, std::span<double>)>;

/// sum_{j <= N_t} X_j - t * intensity * E X with N_t ~ Poisson(t * intensity).
void sample_compound_poisson(double intensity, double t, const JumpSampler& jump, std::span<const double> mean_jump,
                             RngStream& rng, std::span<double> out);

/// Compensated small-jump sum over the retained shells of `dec` at time t.
void sample_small_jumps(const LevyMeasure& nu, const AnnulusDecomposition& dec, double t, RngStream& rng, std::span<double> out);

enum class IncrementMode { Exact, Gaussianized, Perturbed };
IncrementMode parse_increment_mode(const std::string& s);
std::string to_string(IncrementMode m);

/// Increments of Z over a step h: drift a, Brownian matrix B (q x q1), Levy measure nu cut at eps.
class LevyIncrementModel {
public:
    struct Params {
        std::vector<double> a;
        DenseMatrix<double> B;
        std::shared_ptr<const LevyMeasure> nu;
        double eps = 0.5;
        int depth = 4;
        double h = 0.1;
        int perturbed_order = 2;  // Edgeworth order n; r = n - 2 correction levels
    };

    explicit LevyIncrementModel(Params p);

    std::size_t dim() const { return p_.a.size(); }
    std::size_t brownian_dim() const { return p_.B.cols(); }
    const Params& params() const { return p_; }
    const AnnulusDecomposition& decomposition() const { return dec_; }
    /// Drift net of the big-jump compensator: a - int_{|z|>eps} z nu(dz).
    const std::vector<double>& abar() const { return abar_; }
    double big_jump_mass() const { return big_mass_; }
    /// (B B^T + Sigma_retained)^{1/2}.
    const DenseMatrix<double>& bbar() const { return bbar_; }
    const PerturbedNormalSampler* perturbed() const { return perturbed_.get(); }

    /// Uncompensated big jumps over time t.
    void sample_big_jumps(double t, RngStream& rng, std::span<double> out) const;
    /// Full increment over the model's step h in the requested mode.
    void sample(IncrementMode mode, RngStream& rng, std::span<double> out) const;

private:
    Params p_;
    AnnulusDecomposition dec_;
    double big_mass_ = 0.0;
    std::vector<double> abar_;
    DenseMatrix<double> bbar_;
    std::unique_ptr<PerturbedNormalSampler> perturbed_;
};

/// Perturbed-normal map for m^{-1/2}-free small jumps: cumulants of Z_h / sqrt(h) up to order n
/// from the retained shells (exact rational conversion of the double values), then Q_k and the
/// inverse map; used with eps = 1.
GradientPolyMap<double> small_jump_perturbation(const LevyMeasure& nu, const AnnulusDecomposition& dec, double h, int n);

}  // namespace levyclt
