#include "levyclt/sde/sde.hpp"

#include "levyclt/polycore/linalg.hpp"
#include "levyclt/util/parallel.hpp"
#include "levyclt/wasserstein/assignment.hpp"

#include <cmath>
#include <stdexcept>

namespace levyclt {

SigmaFn sigma_zero(std::size_t d, std::size_t q) {
    SigmaFn s{"zero", d, q, [d, q](std::span<const double>, DenseMatrix<double>& out) { out = DenseMatrix<double>(d, q); }, 0.0, 0.0, true};
    return s;
}

SigmaFn sigma_constant(const DenseMatrix<double>& m) {
    double norm = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) norm += m(i, j) * m(i, j);
    return SigmaFn{"constant", m.rows(), m.cols(), [m](std::span<const double>, DenseMatrix<double>& out) { out = m; }, 0.0,
                   std::sqrt(norm), true};
}

SigmaFn sigma_decay(std::size_t d) {
    auto f = [d](std::span<const double> x, DenseMatrix<double>& out) {
        double n2 = 0.0;
        for (double v : x) n2 += v * v;
        out = DenseMatrix<double>(d, d);
        for (std::size_t i = 0; i < d; ++i) out(i, i) = 1.0 / (1.0 + n2);
    };
    // |grad 1/(1+r^2)| <= 3 sqrt(3) / 8
    return SigmaFn{"decay", d, d, f, 3.0 * std::sqrt(3.0) / 8.0 * std::sqrt(static_cast<double>(d)), std::sqrt(static_cast<double>(d)), false};
}

SigmaFn sigma_oscillating(std::size_t d) {
    auto f = [d](std::span<const double> x, DenseMatrix<double>& out) {
        out = DenseMatrix<double>(d, d);
        const double s = 1.0 + 0.5 * std::sin(x[0]);
        for (std::size_t i = 0; i < d; ++i) out(i, i) = s;
    };
    return SigmaFn{"oscillating", d, d, f, 0.5 * std::sqrt(static_cast<double>(d)), 1.5 * std::sqrt(static_cast<double>(d)), false};
}

SigmaFn sigma_by_name(const std::string& name, std::size_t d, std::size_t q) {
    if (name == "zero") return sigma_zero(d, q);
    if (name == "identity") {
        if (d != q) throw std::invalid_argument("sigma 'identity' needs d == q");
        auto s = sigma_constant(DenseMatrix<double>::identity(d));
        s.name = "identity";
        return s;
    }
    if (name == "decay" || name == "oscillating") {
        if (d != q) throw std::invalid_argument("sigma '" + name + "' needs d == q");
        return name == "decay" ? sigma_decay(d) : sigma_oscillating(d);
    }
    throw std::invalid_argument("unknown sigma '" + name + "' (zero, identity, decay, oscillating)");
}

void SdeSpec::validate() const {
    if (d == 0 || q == 0) throw std::invalid_argument("SdeSpec: dimensions must be positive");
    if (a.size() != q) throw std::invalid_argument("SdeSpec: drift must have length q");
    if (B.rows() != q || B.cols() == 0) throw std::invalid_argument("SdeSpec: B must be q x q1 with q1 >= 1");
    if (!nu || nu->dim() != q) throw std::invalid_argument("SdeSpec: Levy measure missing or of wrong dimension");
    if (!sigma.eval || sigma.d != d || sigma.q != q) throw std::invalid_argument("SdeSpec: sigma shape must be d x q");
    if (!std::isfinite(sigma.lipschitz) || !std::isfinite(sigma.sup_norm)) throw std::invalid_argument("SdeSpec: sigma bounds must be finite");
    if (x0.size() != d) throw std::invalid_argument("SdeSpec: x0 must have length d");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("SdeSpec: horizon must be positive");
}

SchemeMode parse_scheme_mode(const std::string& s) {
    if (s == "exact" || s == "euler_exact") return SchemeMode::EulerExact;
    if (s == "gaussianized" || s == "euler_gaussianized") return SchemeMode::EulerGaussianized;
    if (s == "perturbed" || s == "euler_perturbed") return SchemeMode::EulerPerturbed;
    throw std::invalid_argument("unknown scheme mode '" + s + "' (exact, gaussianized, perturbed)");
}

std::string to_string(SchemeMode m) {
    switch (m) {
        case SchemeMode::EulerExact: return "exact";
        case SchemeMode::EulerGaussianized: return "gaussianized";
        case SchemeMode::EulerPerturbed: return "perturbed";
    }
    return "?";
}

void SchemeConfig::validate() const {
    if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("SchemeConfig: h must lie in (0,1)");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("SchemeConfig: eps must lie in (0,1)");
    if (depth < 0) throw std::invalid_argument("SchemeConfig: depth must be >= 0");
    if (fine_substeps < 1) throw std::invalid_argument("SchemeConfig: fine_substeps must be >= 1");
}

int SchemeConfig::steps(double T) const { return static_cast<int>(std::floor(T / h + 1e-9)); }

SchemeContext::SchemeContext(const SdeSpec& spec, const SchemeConfig& cfg)
    : spec_(spec), cfg_(cfg), dec_((spec.validate(), cfg.validate(), AnnulusDecomposition(*spec.nu, cfg.eps, cfg.depth))) {
    const std::size_t q = spec_.q;
    big_mass_ = spec_.nu->shell_mass(cfg_.eps, kInfiniteRadius);
    const auto big_mean = spec_.nu->shell_mean(cfg_.eps, kInfiniteRadius);
    abar_ = spec_.a;
    for (std::size_t j = 0; j < q; ++j) abar_[j] -= big_mean[j];
    root_ = symmetric_sqrt(dec_.retained_covariance());
    if (cfg_.mode == SchemeMode::EulerPerturbed) {
        double tr = 0.0;
        for (std::size_t i = 0; i < q; ++i) tr += dec_.retained_covariance()(i, i);
        if (tr > 0.0) perturbed_ = std::make_unique<PerturbedNormalSampler>(small_jump_perturbation(*spec_.nu, dec_, cfg_.h, cfg_.perturbed_order));
    }
    steps_ = cfg_.steps(spec_.T);
    if (steps_ < 1) throw std::invalid_argument("SchemeConfig: horizon shorter than one step");
}

std::vector<std::vector<double>> SchemeContext::brownian(std::uint64_t seed, std::uint64_t rep, int k) const {
    RngStream rng(seed, derive_stream_id(rep, static_cast<std::uint64_t>(k), kPurposeBrownian));
    const double sd = std::sqrt(cfg_.h / cfg_.fine_substeps);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(cfg_.fine_substeps), std::vector<double>(spec_.B.cols()));
    for (auto& row : out)
        for (auto& v : row) v = sd * rng.normal();
    return out;
}

std::vector<std::vector<double>> SchemeContext::small_jumps(std::uint64_t seed, std::uint64_t rep, int k) const {
    RngStream rng(seed, derive_stream_id(rep, static_cast<std::uint64_t>(k), kPurposeSmallJumps));
    const double dt = cfg_.h / cfg_.fine_substeps;
    std::vector<std::vector<double>> out(static_cast<std::size_t>(cfg_.fine_substeps), std::vector<double>(spec_.q, 0.0));
    if (dec_.shells().empty()) return out;
    for (auto& row : out) sample_small_jumps(*spec_.nu, dec_, dt, rng, row);
    return out;
}

std::vector<double> SchemeContext::big_jumps(std::uint64_t seed, std::uint64_t rep, int k) const {
    std::vector<double> out(spec_.q, 0.0);
    if (!(big_mass_ > 0.0)) return out;
    RngStream rng(seed, derive_stream_id(rep, static_cast<std::uint64_t>(k), kPurposeBigJumps));
    const std::uint64_t n = rng.poisson(big_mass_ * cfg_.h);
    std::vector<double> z(spec_.q);
    for (std::uint64_t i = 0; i < n; ++i) {
        spec_.nu->sample_shell(cfg_.eps, kInfiniteRadius, rng, z);
        for (std::size_t j = 0; j < spec_.q; ++j) out[j] += z[j];
    }
    return out;
}

std::vector<double> SchemeContext::surrogate(std::uint64_t seed, std::uint64_t rep, int k) const {
    RngStream rng(seed, derive_stream_id(rep, static_cast<std::uint64_t>(k), kPurposeSurrogate));
    const std::size_t q = spec_.q;
    const double sh = std::sqrt(cfg_.h);
    std::vector<double> out(q, 0.0);
    if (cfg_.mode == SchemeMode::EulerPerturbed && perturbed_) {
        perturbed_->sample(1.0, -1, rng, out);
        for (auto& v : out) v *= sh;
        return out;
    }
    std::vector<double> z(q);
    rng.normals(z);
    for (std::size_t i = 0; i < q; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < q; ++j) s += root_(i, j) * z[j];
        out[i] = sh * s;
    }
    return out;
}

namespace {

// x += sigma(x) * dz
void euler_update(const SigmaFn& sigma, std::vector<double>& x, const std::vector<double>& dz, DenseMatrix<double>& buf) {
    sigma.eval(x, buf);
    std::vector<double> dx(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < dz.size(); ++j) dx[i] += buf(i, j) * dz[j];
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
}

std::vector<double> sum_rows(const std::vector<std::vector<double>>& rows, std::size_t width) {
    std::vector<double> s(width, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < width; ++j) s[j] += r[j];
    return s;
}

// a h + B w + extra
std::vector<double> coarse_increment(const SchemeContext& ctx, const std::vector<double>& w, const std::vector<double>& extra) {
    const auto& spec = ctx.spec();
    std::vector<double> dz(spec.q);
    for (std::size_t i = 0; i < spec.q; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) s += spec.B(i, j) * w[j];
        dz[i] = ctx.abar()[i] * ctx.config().h + s + extra[i];
    }
    return dz;
}

Path fine_exact_path(const SchemeContext& ctx, std::uint64_t seed, std::uint64_t rep,
                     std::vector<std::vector<double>>* small_sums) {
    const auto& spec = ctx.spec();
    const auto& cfg = ctx.config();
    const double dt = cfg.h / cfg.fine_substeps;
    Path path{spec.x0};
    std::vector<double> x = spec.x0, dz(spec.q);
    DenseMatrix<double> buf;
    for (int k = 0; k < ctx.steps(); ++k) {
        const auto w = ctx.brownian(seed, rep, k);
        const auto s = ctx.small_jumps(seed, rep, k);
        for (int f = 0; f < cfg.fine_substeps; ++f) {
            for (std::size_t i = 0; i < spec.q; ++i) {
                double b = 0.0;
                for (std::size_t j = 0; j < spec.B.cols(); ++j) b += spec.B(i, j) * w[f][j];
                dz[i] = ctx.abar()[i] * dt + b + s[f][i];
            }
            euler_update(spec.sigma, x, dz, buf);
        }
        // big jumps land at the end of the step
        const auto big = ctx.big_jumps(seed, rep, k);
        bool any = false;
        for (double v : big) any = any || v != 0.0;
        if (any) euler_update(spec.sigma, x, big, buf);
        if (small_sums) small_sums->push_back(sum_rows(s, spec.q));
        path.push_back(x);
    }
    return path;
}

}  // namespace

Path euler_path(const SchemeContext& ctx, std::uint64_t seed, std::uint64_t rep) {
    const auto& spec = ctx.spec();
    const auto& cfg = ctx.config();
    Path path{spec.x0};
    std::vector<double> x = spec.x0;
    DenseMatrix<double> buf;
    for (int k = 0; k < ctx.steps(); ++k) {
        const auto w = sum_rows(ctx.brownian(seed, rep, k), spec.B.cols());
        std::vector<double> extra = cfg.mode == SchemeMode::EulerExact ? sum_rows(ctx.small_jumps(seed, rep, k), spec.q)
                                                                       : ctx.surrogate(seed, rep, k);
        const auto big = ctx.big_jumps(seed, rep, k);
        for (std::size_t i = 0; i < spec.q; ++i) extra[i] += big[i];
        euler_update(spec.sigma, x, coarse_increment(ctx, w, extra), buf);
        path.push_back(x);
    }
    return path;
}

double sup_distance(const Path& x, const Path& y) {
    if (x.size() != y.size()) throw std::invalid_argument("sup_distance: path lengths differ");
    double best = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < x[k].size(); ++j) d2 += (x[k][j] - y[k][j]) * (x[k][j] - y[k][j]);
        best = std::max(best, std::sqrt(d2));
    }
    return best;
}

CoupledBatch coupled_paths(const SchemeContext& ctx, std::size_t M, std::uint64_t seed, std::uint64_t rep_offset) {
    const auto& spec = ctx.spec();
    const auto& cfg = ctx.config();
    if (M < 2) throw std::invalid_argument("coupled_paths: batch size must be >= 2");
    if (cfg.mode == SchemeMode::EulerExact) throw std::invalid_argument("coupled_paths: the approximate scheme must not be exact");
    if (M > kMaxAssignmentSize) throw std::invalid_argument("coupled_paths: batch exceeds the assignment cap of 4096");
    const std::size_t q = spec.q;
    const int K = ctx.steps();

    CoupledBatch out;
    out.exact.resize(M);
    out.approx.resize(M);
    out.sup_dist.resize(M);
    out.increment_gap.assign(M, {});
    std::vector<std::vector<std::vector<double>>> small_sums(M);
    parallel_for(M, cfg.threads, [&](std::size_t i) { out.exact[i] = fine_exact_path(ctx, seed, rep_offset + i, &small_sums[i]); });

    std::vector<std::vector<double>> x(M, spec.x0);
    for (auto& p : out.approx) p.push_back(spec.x0);
    DenseMatrix<double> buf;
    std::vector<double> cost(M * M);
    std::vector<std::vector<double>> g(M);
    for (int k = 0; k < K; ++k) {
        for (std::size_t j = 0; j < M; ++j) g[j] = ctx.surrogate(seed, rep_offset + j, k);
        std::vector<int> assign(M);
        if (cfg.coupling) {
            for (std::size_t i = 0; i < M; ++i)
                for (std::size_t j = 0; j < M; ++j) {
                    double d2 = 0.0;
                    for (std::size_t c = 0; c < q; ++c) d2 += (small_sums[i][k][c] - g[j][c]) * (small_sums[i][k][c] - g[j][c]);
                    cost[i * M + j] = d2;
                }
            auto sol = solve_assignment(cost, M);
            out.all_certified = out.all_certified && sol.certified;
            assign = sol.row_to_col;
        } else {
            for (std::size_t i = 0; i < M; ++i) assign[i] = static_cast<int>(i);
        }
        for (std::size_t i = 0; i < M; ++i) {
            const auto w = sum_rows(ctx.brownian(seed, rep_offset + i, k), spec.B.cols());
            const auto big = ctx.big_jumps(seed, rep_offset + i, k);
            std::vector<double> extra = g[static_cast<std::size_t>(assign[i])];
            std::vector<double> gap(q);
            for (std::size_t c = 0; c < q; ++c) {
                gap[c] = small_sums[i][k][c] - extra[c];
                extra[c] += big[c];
            }
            out.increment_gap[i].push_back(std::move(gap));
            euler_update(spec.sigma, x[i], coarse_increment(ctx, w, extra), buf);
            out.approx[i].push_back(x[i]);
        }
    }
    for (std::size_t i = 0; i < M; ++i) out.sup_dist[i] = sup_distance(out.exact[i], out.approx[i]);
    return out;
}

Path continuous_gaussian_limit_path(const SchemeContext& ctx, std::uint64_t seed, std::uint64_t rep) {
    if (ctx.big_jump_mass() > 0.0) throw std::domain_error("continuous_gaussian_limit_path: the measure has jumps beyond eps");
    const auto& spec = ctx.spec();
    const auto& cfg = ctx.config();
    const double dt = cfg.h / cfg.fine_substeps;
    const double sd = std::sqrt(dt);
    Path path{spec.x0};
    std::vector<double> x = spec.x0, dz(spec.q), v(spec.q);
    DenseMatrix<double> buf;
    for (int k = 0; k < ctx.steps(); ++k) {
        const auto w = ctx.brownian(seed, rep, k);
        RngStream rng(seed, derive_stream_id(rep, static_cast<std::uint64_t>(k), kPurposeSurrogate));
        for (int f = 0; f < cfg.fine_substeps; ++f) {
            rng.normals(v);
            for (std::size_t i = 0; i < spec.q; ++i) {
                double b = 0.0;
                for (std::size_t j = 0; j < spec.B.cols(); ++j) b += spec.B(i, j) * w[f][j];
                double s = 0.0;
                for (std::size_t j = 0; j < spec.q; ++j) s += ctx.retained_root()(i, j) * v[j];
                dz[i] = ctx.abar()[i] * dt + b + sd * s;
            }
            euler_update(spec.sigma, x, dz, buf);
        }
        path.push_back(x);
    }
    return path;
}

}  // namespace levyclt
