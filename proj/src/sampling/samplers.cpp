#include "levyclt/sampling/samplers.hpp"

#include "levyclt/edgeworth/expansion.hpp"
#include "levyclt/polycore/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace levyclt {

GaussianSampler::GaussianSampler(const DenseMatrix<double>& sigma) : root_(symmetric_sqrt(sigma)), z_(sigma.rows()) {}

void GaussianSampler::sample(RngStream& rng, std::span<double> out) const {
    const std::size_t q = dim();
    if (out.size() != q) throw std::invalid_argument("GaussianSampler: output dimension mismatch");
    rng.normals(z_);
    for (std::size_t i = 0; i < q; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < q; ++j) s += root_(i, j) * z_[j];
        out[i] = s;
    }
}

void sample_gaussian(const DenseMatrix<double>& sigma, RngStream& rng, std::span<double> out) {
    GaussianSampler(sigma).sample(rng, out);
}

PerturbedNormalSampler::PerturbedNormalSampler(GradientPolyMap<double> map)
    : map_(std::move(map)), gauss_(map_.sigma()), xi_(map_.dim()) {}

void PerturbedNormalSampler::sample(double eps, int r, RngStream& rng, std::span<double> out) const {
    gauss_.sample(rng, xi_);
    map_.apply(eps, xi_, out, r);
}

void sample_perturbed_normal(const GradientPolyMap<double>& map, double eps, int r, RngStream& rng, std::span<double> out) {
    PerturbedNormalSampler(map).sample(eps, r, rng, out);
}

void sample_compound_poisson(double intensity, double t, const JumpSampler& jump, std::span<const double> mean_jump,
                             RngStream& rng, std::span<double> out) {
    if (!(intensity >= 0.0)) throw std::invalid_argument("sample_compound_poisson: intensity must be non-negative");
    if (!(t >= 0.0)) throw std::invalid_argument("sample_compound_poisson: t must be non-negative");
    if (mean_jump.size() != out.size()) throw std::invalid_argument("sample_compound_poisson: dimension mismatch");
    for (auto& v : out) v = 0.0;
    const double lam = intensity * t;
    if (lam == 0.0) return;
    const std::uint64_t n = rng.poisson(lam);
    std::vector<double> x(out.size());
    for (std::uint64_t k = 0; k < n; ++k) {
        jump(rng, x);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += x[j];
    }
    for (std::size_t j = 0; j < out.size(); ++j) out[j] -= lam * mean_jump[j];
}

void sample_small_jumps(const LevyMeasure& nu, const AnnulusDecomposition& dec, double t, RngStream& rng, std::span<double> out) {
    const std::size_t q = nu.dim();
    if (out.size() != q) throw std::invalid_argument("sample_small_jumps: dimension mismatch");
    for (auto& v : out) v = 0.0;
    std::vector<double> part(q);
    for (const auto& s : dec.shells()) {
        if (!(s.mass > 0.0)) continue;
        // per-jump conditional mean
        std::vector<double> mean(q);
        for (std::size_t j = 0; j < q; ++j) mean[j] = s.mean[j] / s.mass;
        const double lo = s.lo, hi = s.hi;
        sample_compound_poisson(s.mass, t, [&](RngStream& g, std::span<double> z) { nu.sample_shell(lo, hi, g, z); }, mean, rng, part);
        for (std::size_t j = 0; j < q; ++j) out[j] += part[j];
    }
}

IncrementMode parse_increment_mode(const std::string& s) {
    if (s == "exact") return IncrementMode::Exact;
    if (s == "gaussianized") return IncrementMode::Gaussianized;
    if (s == "perturbed") return IncrementMode::Perturbed;
    throw std::invalid_argument("unknown increment mode '" + s + "' (exact, gaussianized, perturbed)");
}

std::string to_string(IncrementMode m) {
    switch (m) {
        case IncrementMode::Exact: return "exact";
        case IncrementMode::Gaussianized: return "gaussianized";
        case IncrementMode::Perturbed: return "perturbed";
    }
    return "?";
}

GradientPolyMap<double> small_jump_perturbation(const LevyMeasure& nu, const AnnulusDecomposition& dec, double h, int n) {
    if (n < 3) throw std::invalid_argument("small_jump_perturbation: order must be >= 3");
    const std::size_t q = nu.dim();
    IndexMap<Rational> mu;
    for (const auto& a : multi_indices_between(q, 2, n)) {
        double m = 0.0;
        for (const auto& s : dec.shells()) m += nu.shell_moment(s.lo, s.hi, a);
        // cumulants of Z_h / sqrt(h): h^{1 - |a|/2} int z^a nu(dz)
        const double v = m * std::pow(h, 1.0 - 0.5 * a.order());
        if (v != 0.0) mu.emplace(a, Rational(v));
    }
    CumulantSet<Rational> c(q, n, std::move(mu));
    auto Q = build_Q(c, n - 2);
    return invert_S_map(Q, c.covariance()).cast<double>();
}

LevyIncrementModel::LevyIncrementModel(Params p)
    : p_(std::move(p)), dec_(p_.nu ? AnnulusDecomposition(*p_.nu, p_.eps, p_.depth) : throw std::invalid_argument("LevyIncrementModel: missing measure")) {
    const std::size_t q = p_.a.size();
    if (p_.nu->dim() != q) throw std::invalid_argument("LevyIncrementModel: measure dimension does not match drift");
    if (p_.B.rows() != q || p_.B.cols() == 0) throw std::invalid_argument("LevyIncrementModel: B must be q x q1 with q1 >= 1");
    if (!(p_.h > 0.0)) throw std::invalid_argument("LevyIncrementModel: h must be positive");
    big_mass_ = p_.nu->shell_mass(p_.eps, kInfiniteRadius);
    const auto big_mean = p_.nu->shell_mean(p_.eps, kInfiniteRadius);
    abar_ = p_.a;
    for (std::size_t j = 0; j < q; ++j) abar_[j] -= big_mean[j];
    DenseMatrix<double> cov = p_.B * p_.B.transpose();
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) cov(i, j) += dec_.retained_covariance()(i, j);
    bbar_ = symmetric_sqrt(cov);
    double tr = 0.0;
    for (std::size_t i = 0; i < q; ++i) tr += dec_.retained_covariance()(i, i);
    if (tr > 0.0 && p_.perturbed_order >= 3)
        perturbed_ = std::make_unique<PerturbedNormalSampler>(small_jump_perturbation(*p_.nu, dec_, p_.h, p_.perturbed_order));
}

void LevyIncrementModel::sample_big_jumps(double t, RngStream& rng, std::span<double> out) const {
    for (auto& v : out) v = 0.0;
    if (!(big_mass_ > 0.0)) return;
    const std::uint64_t n = rng.poisson(big_mass_ * t);
    std::vector<double> z(out.size());
    for (std::uint64_t k = 0; k < n; ++k) {
        p_.nu->sample_shell(p_.eps, kInfiniteRadius, rng, z);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += z[j];
    }
}

void LevyIncrementModel::sample(IncrementMode mode, RngStream& rng, std::span<double> out) const {
    const std::size_t q = dim();
    if (out.size() != q) throw std::invalid_argument("LevyIncrementModel::sample: dimension mismatch");
    const double h = p_.h, sh = std::sqrt(h);
    std::vector<double> tmp(q);
    switch (mode) {
        case IncrementMode::Exact: {
            std::vector<double> w(brownian_dim());
            rng.normals(w);
            for (std::size_t i = 0; i < q; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < w.size(); ++j) s += p_.B(i, j) * w[j];
                out[i] = abar_[i] * h + sh * s;
            }
            sample_small_jumps(*p_.nu, dec_, h, rng, tmp);
            for (std::size_t i = 0; i < q; ++i) out[i] += tmp[i];
            break;
        }
        case IncrementMode::Gaussianized: {
            std::vector<double> w(q);
            rng.normals(w);
            for (std::size_t i = 0; i < q; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < q; ++j) s += bbar_(i, j) * w[j];
                out[i] = abar_[i] * h + sh * s;
            }
            break;
        }
        case IncrementMode::Perturbed: {
            std::vector<double> w(brownian_dim());
            rng.normals(w);
            for (std::size_t i = 0; i < q; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < w.size(); ++j) s += p_.B(i, j) * w[j];
                out[i] = abar_[i] * h + sh * s;
            }
            if (perturbed_) {
                perturbed_->sample(1.0, -1, rng, tmp);
                for (std::size_t i = 0; i < q; ++i) out[i] += sh * tmp[i];
            }
            break;
        }
    }
    sample_big_jumps(h, rng, tmp);
    for (std::size_t i = 0; i < q; ++i) out[i] += tmp[i];
}

}  // namespace levyclt
