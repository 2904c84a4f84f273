#include "levyclt/wasserstein/wasserstein.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace levyclt {

EmpiricalDistribution::EmpiricalDistribution(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    if (dim == 0) throw std::invalid_argument("EmpiricalDistribution: dimension must be >= 1");
    if (coords_.empty() || coords_.size() % dim != 0) throw std::invalid_argument("EmpiricalDistribution: need n >= 1 whole points");
    for (double v : coords_)
        if (!std::isfinite(v)) throw std::invalid_argument("EmpiricalDistribution: non-finite coordinate");
}

std::vector<double> EmpiricalDistribution::project(std::span<const double> direction) const {
    if (direction.size() != dim_) throw std::invalid_argument("EmpiricalDistribution::project: dimension mismatch");
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) s += coords_[i * dim_ + j] * direction[j];
        out[i] = s;
    }
    return out;
}

namespace {

void check_p(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("Wasserstein order p must be >= 1");
}

double pow_p(double d, double p) { return p == 2.0 ? d * d : (p == 1.0 ? d : std::pow(d, p)); }
double root_p(double s, double p) { return p == 2.0 ? std::sqrt(s) : (p == 1.0 ? s : std::pow(s, 1.0 / p)); }

}  // namespace

double wp_1d_exact(std::vector<double> x, std::vector<double> y, double p) {
    check_p(p);
    if (x.size() != y.size()) throw std::invalid_argument("wp_1d_exact: sample sizes differ");
    if (x.empty()) throw std::invalid_argument("wp_1d_exact: empty samples");
    std::stable_sort(x.begin(), x.end());
    std::stable_sort(y.begin(), y.end());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += pow_p(std::abs(x[i] - y[i]), p);
    return root_p(s / static_cast<double>(x.size()), p);
}

double wp_1d_quantile(const QuantileFn& f_inv, const QuantileFn& g_inv, double p, double rel_tol) {
    check_p(p);
    boost::math::quadrature::tanh_sinh<double> ts;
    auto integrand = [&](double t) {
        const double d = std::abs(f_inv(t) - g_inv(t));
        return std::isfinite(d) ? pow_p(d, p) : 0.0;
    };
    const double s = ts.integrate(integrand, 0.0, 1.0, rel_tol);
    if (!std::isfinite(s)) throw std::domain_error("wp_1d_quantile: quadrature did not converge");
    return root_p(s, p);
}

WpEmpiricalResult wp_empirical(const EmpiricalDistribution& a, const EmpiricalDistribution& b, double p) {
    check_p(p);
    if (a.dim() != b.dim()) throw std::invalid_argument("wp_empirical: dimension mismatch");
    if (a.size() != b.size()) throw std::invalid_argument("wp_empirical: cloud sizes differ");
    const std::size_t n = a.size(), q = a.dim();
    if (n > kMaxAssignmentSize) throw std::invalid_argument("wp_empirical: size exceeds the cap of 4096");
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = a.point(i);
        for (std::size_t j = 0; j < n; ++j) {
            const auto y = b.point(j);
            double d2 = 0.0;
            for (std::size_t k = 0; k < q; ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
            cost[i * n + j] = p == 2.0 ? d2 : std::pow(std::sqrt(d2), p);
        }
    }
    auto sol = solve_assignment(cost, n);
    // summing matched costs in sorted order makes the value independent of argument order
    std::vector<double> matched(n);
    for (std::size_t i = 0; i < n; ++i) matched[i] = cost[i * n + static_cast<std::size_t>(sol.row_to_col[i])];
    std::sort(matched.begin(), matched.end());
    const double total = std::accumulate(matched.begin(), matched.end(), 0.0);
    WpEmpiricalResult res;
    res.distance = root_p(std::max(total, 0.0) / static_cast<double>(n), p);
    res.certified = sol.certified;
    res.max_violation = sol.max_violation;
    res.matching = std::move(sol.row_to_col);
    return res;
}

double coupling_cost(const EmpiricalDistribution& a, const EmpiricalDistribution& b, const std::vector<int>& pi, double p) {
    check_p(p);
    if (a.size() != b.size() || pi.size() != a.size() || a.dim() != b.dim()) throw std::invalid_argument("coupling_cost: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto x = a.point(i);
        const auto y = b.point(static_cast<std::size_t>(pi[i]));
        double d2 = 0.0;
        for (std::size_t k = 0; k < a.dim(); ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
        s += pow_p(std::sqrt(d2), p);
    }
    return root_p(s / static_cast<double>(a.size()), p);
}

namespace {

// tensor Gauss-Legendre over a box: cells^q cells, 10 nodes per axis per cell
template <class F>
double box_integral(F f, const std::vector<double>& lo, const std::vector<double>& hi, int cells) {
    using GL = boost::math::quadrature::gauss<double, 10>;
    const auto& absc = GL::abscissa();
    const auto& wts = GL::weights();
    // full symmetric node list on [-1, 1]
    std::vector<double> nodes, weights;
    for (std::size_t k = 0; k < absc.size(); ++k) {
        nodes.push_back(absc[k]);
        weights.push_back(wts[k]);
        if (absc[k] != 0.0) {
            nodes.push_back(-absc[k]);
            weights.push_back(wts[k]);
        }
    }
    const std::size_t q = lo.size(), m = nodes.size();
    const std::size_t per_axis = static_cast<std::size_t>(cells) * m;
    std::size_t total = 1;
    for (std::size_t j = 0; j < q; ++j) total *= per_axis;
    std::vector<double> x(q);
    double sum = 0.0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        double w = 1.0;
        for (std::size_t j = 0; j < q; ++j) {
            const std::size_t idx = rest % per_axis;
            rest /= per_axis;
            const std::size_t cell = idx / m, node = idx % m;
            const double h = (hi[j] - lo[j]) / cells;
            const double mid = lo[j] + (static_cast<double>(cell) + 0.5) * h;
            x[j] = mid + 0.5 * h * nodes[node];
            w *= 0.5 * h * weights[node];
        }
        sum += w * f(std::span<const double>(x));
    }
    return sum;
}

}  // namespace

DensityBoundResult wp_density_bound(const DensityFn& f, const DensityFn& g, double p, const std::vector<double>& lo,
                                    const std::vector<double>& hi, int cells, double coverage_tol) {
    check_p(p);
    if (lo.empty() || lo.size() != hi.size()) throw std::invalid_argument("wp_density_bound: box shape mismatch");
    for (std::size_t j = 0; j < lo.size(); ++j)
        if (!(hi[j] > lo[j])) throw std::invalid_argument("wp_density_bound: empty box");
    if (cells < 1) throw std::invalid_argument("wp_density_bound: need at least one cell per axis");
    DensityBoundResult r;
    r.mass_f = box_integral(f, lo, hi, cells);
    r.mass_g = box_integral(g, lo, hi, cells);
    if (std::abs(1.0 - r.mass_f) > coverage_tol || std::abs(1.0 - r.mass_g) > coverage_tol)
        throw std::domain_error("wp_density_bound: box misses more than the allowed mass");
    auto integrand = [&](std::span<const double> x) {
        double n2 = 0.0;
        for (double v : x) n2 += v * v;
        return pow_p(std::sqrt(n2), p) * std::abs(f(x) - g(x));
    };
    r.raw_integral = box_integral(integrand, lo, hi, cells);
    const double coarse = box_integral(integrand, lo, hi, std::max(1, cells / 2));
    r.residual = std::abs(r.raw_integral - coarse);
    r.constant = std::pow(2.0, (p - 1.0) / p);
    r.bound = r.constant * root_p(r.raw_integral, p);
    return r;
}

namespace {

std::pair<double, double> ols(const std::vector<double>& lx, const std::vector<double>& ly) {
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("rate_fit: x values must not all coincide");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

std::vector<double> logs(const std::vector<double>& v, const char* what) {
    std::vector<double> out;
    for (double x : v) {
        if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string("rate_fit: non-positive ") + what);
        out.push_back(std::log(x));
    }
    return out;
}

}  // namespace

RateFit rate_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("rate_fit: size mismatch");
    if (xs.size() < 3) throw std::invalid_argument("rate_fit: need at least 3 points");
    auto [s, c] = ols(logs(xs, "x"), logs(ys, "y"));
    return RateFit{s, c, s, s, static_cast<int>(xs.size())};
}

RateFit rate_fit(const std::vector<double>& xs, const std::vector<std::vector<double>>& replicates, int bootstrap_reps,
                 RngStream& rng, double level) {
    if (xs.size() != replicates.size()) throw std::invalid_argument("rate_fit: size mismatch");
    std::vector<double> means;
    for (const auto& r : replicates) {
        if (r.empty()) throw std::invalid_argument("rate_fit: empty replicate row");
        means.push_back(std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size()));
    }
    RateFit fit = rate_fit(xs, means);
    if (bootstrap_reps < 1) return fit;
    const auto lx = logs(xs, "x");
    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(bootstrap_reps));
    std::vector<double> ly(xs.size());
    for (int b = 0; b < bootstrap_reps; ++b) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const auto& r = replicates[i];
            double s = 0.0;
            for (std::size_t k = 0; k < r.size(); ++k) s += r[static_cast<std::size_t>(rng.uniform() * static_cast<double>(r.size()))];
            const double m = s / static_cast<double>(r.size());
            if (!(m > 0.0)) throw std::invalid_argument("rate_fit: non-positive y");
            ly[i] = std::log(m);
        }
        slopes.push_back(ols(lx, ly).first);
    }
    std::sort(slopes.begin(), slopes.end());
    auto pct = [&](double q) {
        const double pos = q * static_cast<double>(slopes.size() - 1);
        const auto k = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(k);
        return k + 1 < slopes.size() ? slopes[k] * (1 - frac) + slopes[k + 1] * frac : slopes[k];
    };
    fit.ci_lo = pct(0.5 * (1.0 - level));
    fit.ci_hi = pct(1.0 - 0.5 * (1.0 - level));
    return fit;
}

double sliced_wasserstein(const EmpiricalDistribution& a, const EmpiricalDistribution& b, double p, int directions) {
    if (a.dim() != b.dim()) throw std::invalid_argument("sliced_wasserstein: dimension mismatch");
    if (directions < 1) throw std::invalid_argument("sliced_wasserstein: need at least one direction");
    const std::size_t q = a.dim();
    double total = 0.0;
    std::vector<double> dir(q);
    RngStream fixed(0x5eed, 0);
    for (int k = 0; k < directions; ++k) {
        if (q == 1) {
            dir[0] = 1.0;
        } else if (q == 2) {
            const double th = std::numbers::pi * (k + 0.5) / directions;
            dir[0] = std::cos(th);
            dir[1] = std::sin(th);
        } else {
            double n2 = 0.0;
            do {
                n2 = 0.0;
                for (auto& v : dir) {
                    v = fixed.normal();
                    n2 += v * v;
                }
            } while (n2 == 0.0);
            for (auto& v : dir) v /= std::sqrt(n2);
        }
        total += wp_1d_exact(a.project(dir), b.project(dir), p);
    }
    return total / directions;
}

}  // namespace levyclt
