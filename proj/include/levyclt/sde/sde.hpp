#pragma once

// Euler schemes for dX = sigma(X-) dZ with Z = a t + B W + compensated small jumps + big jumps,
// the approximate scheme with Gaussian (or perturbed-normal) small jumps, and the per-step
// optimal-transport coupling of the two.

#include "levyclt/sampling/samplers.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace levyclt {

/// Bounded Lipschitz coefficient R^d -> R^{d x q} with declared bounds.
struct SigmaFn {
    std::string name;
    std::size_t d = 1;
    std::size_t q = 1;
    std::function<void(std::span<const double>, DenseMatrix<double>&)> eval;
    double lipschitz = 0.0;
    double sup_norm = 0.0;
    /// True when sigma does not depend on x.
    bool constant = false;
};

SigmaFn sigma_zero(std::size_t d, std::size_t q);
SigmaFn sigma_constant(const DenseMatrix<double>& m);
/// I / (1 + |x|^2), d = q.
SigmaFn sigma_decay(std::size_t d);
/// (1 + 0.5 sin(x_1)) I, d = q.
SigmaFn sigma_oscillating(std::size_t d);
/// Built-in by name: "zero", "identity", "decay", "oscillating".
SigmaFn sigma_by_name(const std::string& name, std::size_t d, std::size_t q);

struct SdeSpec {
    std::size_t d = 1;
    std::size_t q = 1;
    std::vector<double> a;
    DenseMatrix<double> B;  // q x q1
    std::shared_ptr<const LevyMeasure> nu;
    SigmaFn sigma;
    std::vector<double> x0;
    double T = 1.0;

    void validate() const;
};

enum class SchemeMode { EulerExact, EulerGaussianized, EulerPerturbed };
SchemeMode parse_scheme_mode(const std::string& s);
std::string to_string(SchemeMode m);

struct SchemeConfig {
    double h = 0.1;
    double eps = 0.1;
    SchemeMode mode = SchemeMode::EulerGaussianized;
    bool coupling = true;
    int depth = 3;             // shells kept below eps
    int fine_substeps = 16;    // exact-path proxy grid h / fine_substeps
    int perturbed_order = 4;   // Edgeworth order for EulerPerturbed
    int threads = 1;

    void validate() const;
    int steps(double T) const;
};

/// Rows X_0..X_K, each of length d.
using Path = std::vector<std::vector<double>>;

/// Shared per-spec data: the decomposition below eps, big-jump rates, surrogate samplers.
class SchemeContext {
public:
    SchemeContext(const SdeSpec& spec, const SchemeConfig& cfg);
    const SdeSpec& spec() const { return spec_; }
    const SchemeConfig& config() const { return cfg_; }
    const AnnulusDecomposition& decomposition() const { return dec_; }
    const std::vector<double>& abar() const { return abar_; }
    double big_jump_mass() const { return big_mass_; }
    const DenseMatrix<double>& retained_root() const { return root_; }
    const PerturbedNormalSampler* perturbed() const { return perturbed_.get(); }
    int steps() const { return steps_; }

    /// Fine Brownian increments of step k (fine_substeps x q1) for one replicate.
    std::vector<std::vector<double>> brownian(std::uint64_t seed, std::uint64_t rep, int k) const;
    /// Compensated small jumps per fine substep (fine_substeps x q).
    std::vector<std::vector<double>> small_jumps(std::uint64_t seed, std::uint64_t rep, int k) const;
    /// Uncompensated big jumps over step k.
    std::vector<double> big_jumps(std::uint64_t seed, std::uint64_t rep, int k) const;
    /// Surrogate for the small jumps over step k: sqrt(h) xi_Sigma or sqrt(h) p(xi_Sigma).
    std::vector<double> surrogate(std::uint64_t seed, std::uint64_t rep, int k) const;

private:
    SdeSpec spec_;
    SchemeConfig cfg_;
    AnnulusDecomposition dec_;
    std::vector<double> abar_;
    double big_mass_ = 0.0;
    DenseMatrix<double> root_;
    std::unique_ptr<PerturbedNormalSampler> perturbed_;
    int steps_ = 0;
};

/// Coarse-grid Euler path in the configured mode; deterministic given (seed, rep).
Path euler_path(const SchemeContext& ctx, std::uint64_t seed, std::uint64_t rep);

struct CoupledBatch {
    std::vector<Path> exact;        // fine-grid proxy sampled on the coarse grid
    std::vector<Path> approx;       // coarse scheme
    std::vector<double> sup_dist;   // max_k |X_k - Xbar_k|
    /// Per replicate and step: summed small jumps minus the assigned surrogate (length q).
    std::vector<std::vector<std::vector<double>>> increment_gap;
    bool all_certified = true;      // every per-step assignment passed its optimality check
};

/// M replicates rep_offset..rep_offset+M-1 of the exact proxy and the approximate scheme,
/// sharing drift, Brownian and big-jump draws; small jumps and surrogates are matched by an
/// exact assignment per step when cfg.coupling is set.
CoupledBatch coupled_paths(const SchemeContext& ctx, std::size_t M, std::uint64_t seed, std::uint64_t rep_offset = 0);

/// Fine-grid Euler path of dX = sigma(X)(abar dt + B dW + Sigma^{1/2} dV) sampled on the coarse
/// grid, sharing the Brownian stream with the other schemes. Requires no big jumps.
Path continuous_gaussian_limit_path(const SchemeContext& ctx, std::uint64_t seed, std::uint64_t rep);

double sup_distance(const Path& x, const Path& y);

}  // namespace levyclt
