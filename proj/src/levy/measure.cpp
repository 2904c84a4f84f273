#include "levyclt/levy/measure.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace levyclt {

double sphere_surface(std::size_t q) {
    if (q == 0 || q > 10) throw std::invalid_argument("sphere_surface: dimension must be in 1..10");
    const double h = 0.5 * static_cast<double>(q);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double sphere_moment(const MultiIndex& alpha) {
    double prod = 2.0;
    for (int a : alpha.exponents()) {
        if (a % 2 != 0) return 0.0;
        prod *= std::tgamma(0.5 * (a + 1));
    }
    return prod / std::tgamma(0.5 * (alpha.order() + static_cast<double>(alpha.dim())));
}

namespace {

template <class F>
double integrate(F f, double a, double b) {
    if (!(b > a)) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12, &err);
}

}  // namespace

RadialMeasure::RadialMeasure(std::size_t q) : q_(q) {
    if (q == 0 || q > 10) throw std::invalid_argument("RadialMeasure: dimension must be in 1..10");
}

double RadialMeasure::shell_mass(double a, double b) const { return sphere_surface(q_) * radial_integral(a, b, 0.0); }

DenseMatrix<double> RadialMeasure::shell_covariance(double a, double b) const {
    const double v = sphere_surface(q_) / static_cast<double>(q_) * radial_integral(a, b, 2.0);
    DenseMatrix<double> m(q_, q_);
    for (std::size_t i = 0; i < q_; ++i) m(i, i) = v;
    return m;
}

std::vector<double> RadialMeasure::shell_mean(double, double) const { return std::vector<double>(q_, 0.0); }

double RadialMeasure::shell_moment(double a, double b, const MultiIndex& alpha) const {
    if (alpha.dim() != q_) throw std::invalid_argument("shell_moment: index dimension mismatch");
    const double s = sphere_moment(alpha);
    if (s == 0.0) return 0.0;
    return s * radial_integral(a, b, static_cast<double>(alpha.order()));
}

void RadialMeasure::sample_shell(double a, double b, RngStream& rng, std::span<double> out) const {
    if (out.size() != q_) throw std::invalid_argument("sample_shell: output dimension mismatch");
    const double rho = sample_radius(a, b, rng);
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (auto& v : out) {
            v = rng.normal();
            n2 += v * v;
        }
    } while (n2 == 0.0);
    const double scale = rho / std::sqrt(n2);
    for (auto& v : out) v *= scale;
}

std::complex<double> RadialMeasure::shell_char_fn(double a, double b, std::span<const double> s) const {
    if (s.size() != q_) throw std::invalid_argument("shell_char_fn: dimension mismatch");
    const double lo = std::max(a, 0.0);
    const double hi = std::min(b, support_radius());
    const double mass = radial_integral(lo, hi, 0.0);
    if (!(mass > 0.0)) throw std::domain_error("shell_char_fn: shell carries no mass");
    double t2 = 0.0;
    for (double v : s) t2 += v * v;
    const double t = std::sqrt(t2);
    if (t == 0.0) return 1.0;
    const double qm1 = static_cast<double>(q_) - 1.0;

    if (q_ == 2) {
        // periodic trapezoid in theta, composite Gauss-Legendre in rho with panels sized to the oscillation
        const int n_theta = 64 + 2 * static_cast<int>(std::ceil(t * hi));
        const int panels = 4 + static_cast<int>(std::ceil(t * (hi - lo)));
        std::vector<double> ct(n_theta);
        for (int k = 0; k < n_theta; ++k) {
            const double th = 2.0 * std::numbers::pi * k / n_theta;
            ct[k] = s[0] * std::cos(th) + s[1] * std::sin(th);
        }
        const double w = (hi - lo) / panels;
        std::complex<double> acc = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double a0 = lo + p * w;
            auto f = [&](double rho) {
                double re = 0.0, im = 0.0;
                for (int k = 0; k < n_theta; ++k) {
                    const double arg = rho * ct[k];
                    re += std::cos(arg);
                    im += std::sin(arg);
                }
                return std::complex<double>(re, im) * (rho * radial_density(rho) / n_theta);
            };
            acc += boost::math::quadrature::gauss<double, 30>::integrate(f, a0, a0 + w);
        }
        return acc / mass;
    }

    const double nu = 0.5 * static_cast<double>(q_) - 1.0;
    const double pre = std::tgamma(0.5 * static_cast<double>(q_));
    auto kernel = [&](double x) {
        if (q_ == 1) return std::cos(x);
        if (x == 0.0) return 1.0;
        return pre * std::pow(0.5 * x, -nu) * boost::math::cyl_bessel_j(nu, x);
    };
    const double re = integrate([&](double rho) { return std::pow(rho, qm1) * radial_density(rho) * kernel(t * rho); }, lo, hi);
    return {re / mass, 0.0};
}

StableLikeMeasure::StableLikeMeasure(std::size_t q, double alpha, double tau) : RadialMeasure(q), alpha_(alpha), tau_(tau) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("StableLikeMeasure: alpha must lie in (0,2)");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("StableLikeMeasure: tau must be positive and finite");
}

double StableLikeMeasure::radial_integral(double a, double b, double k) const {
    a = std::max(a, 0.0);
    b = std::min(b, tau_);
    if (!(b > a)) return 0.0;
    const double e = k - alpha_;
    if (a == 0.0 && e <= 0.0) return kInfiniteRadius;
    if (e == 0.0) return std::log(b / a);
    return (std::pow(b, e) - (a == 0.0 ? 0.0 : std::pow(a, e))) / e;
}

double StableLikeMeasure::sample_radius(double a, double b, RngStream& rng) const {
    b = std::min(b, tau_);
    if (!(a > 0.0) || !(b > a)) throw std::domain_error("StableLikeMeasure::sample_radius: empty or unbounded shell");
    const double la = std::pow(a, -alpha_);
    const double lb = std::pow(b, -alpha_);
    const double u = rng.uniform();
    return std::clamp(std::pow(la - u * (la - lb), -1.0 / alpha_), a, b);
}

double StableLikeMeasure::radial_density(double rho) const {
    if (!(rho > 0.0) || rho > tau_) return 0.0;
    return std::pow(rho, -static_cast<double>(q_) - alpha_);
}

CustomRadialMeasure::CustomRadialMeasure(std::size_t q, std::vector<double> radii, std::vector<double> density)
    : RadialMeasure(q), radii_(std::move(radii)), density_(std::move(density)) {
    if (radii_.size() < 2 || radii_.size() != density_.size())
        throw std::invalid_argument("CustomRadialMeasure: need at least two (radius, density) pairs");
    if (!(radii_.front() >= 0.0)) throw std::invalid_argument("CustomRadialMeasure: radii must be non-negative");
    for (std::size_t i = 1; i < radii_.size(); ++i)
        if (!(radii_[i] > radii_[i - 1])) throw std::invalid_argument("CustomRadialMeasure: radii must increase strictly");
    for (double d : density_)
        if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("CustomRadialMeasure: density must be finite and non-negative");
}

double CustomRadialMeasure::segment_integral(std::size_t i, double lo, double hi, double k) const {
    const double r0 = radii_[i], r1 = radii_[i + 1];
    const double c1 = (density_[i + 1] - density_[i]) / (r1 - r0);
    const double c0 = density_[i] - c1 * r0;
    const double e = k + static_cast<double>(q_);
    return c0 * (std::pow(hi, e) - std::pow(lo, e)) / e + c1 * (std::pow(hi, e + 1) - std::pow(lo, e + 1)) / (e + 1);
}

double CustomRadialMeasure::radial_integral(double a, double b, double k) const {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < radii_.size(); ++i) {
        const double lo = std::max(a, radii_[i]);
        const double hi = std::min(b, radii_[i + 1]);
        if (hi > lo) sum += segment_integral(i, lo, hi, k);
    }
    return sum;
}

double CustomRadialMeasure::sample_radius(double a, double b, RngStream& rng) const {
    const double total = radial_integral(a, b, 0.0);
    if (!(total > 0.0)) throw std::domain_error("CustomRadialMeasure::sample_radius: shell carries no mass");
    double target = rng.uniform() * total;
    for (std::size_t i = 0; i + 1 < radii_.size(); ++i) {
        const double lo = std::max(a, radii_[i]);
        const double hi = std::min(b, radii_[i + 1]);
        if (!(hi > lo)) continue;
        const double m = segment_integral(i, lo, hi, 0.0);
        if (target > m) {
            target -= m;
            continue;
        }
        double l = lo, h = hi;
        for (int it = 0; it < 80 && h - l > 1e-15 * h; ++it) {
            const double mid = 0.5 * (l + h);
            (segment_integral(i, lo, mid, 0.0) < target ? l : h) = mid;
        }
        return 0.5 * (l + h);
    }
    return std::min(b, radii_.back());
}

double CustomRadialMeasure::radial_density(double rho) const {
    if (rho < radii_.front() || rho > radii_.back()) return 0.0;
    auto it = std::upper_bound(radii_.begin(), radii_.end(), rho);
    if (it == radii_.end()) return density_.back();
    const std::size_t i = static_cast<std::size_t>(it - radii_.begin()) - 1;
    const double w = (rho - radii_[i]) / (radii_[i + 1] - radii_[i]);
    return (1.0 - w) * density_[i] + w * density_[i + 1];
}

PointMassMeasure::PointMassMeasure(std::size_t q, std::vector<std::vector<double>> atoms, std::vector<double> weights)
    : q_(q), atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.size() != weights_.size()) throw std::invalid_argument("PointMassMeasure: atoms and weights differ in length");
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i].size() != q_) throw std::invalid_argument("PointMassMeasure: atom dimension mismatch");
        if (!(weights_[i] > 0.0)) throw std::invalid_argument("PointMassMeasure: weights must be positive");
        double n2 = 0.0;
        for (double v : atoms_[i]) n2 += v * v;
        if (n2 == 0.0) throw std::invalid_argument("PointMassMeasure: atoms at the origin are not allowed");
        norms_.push_back(std::sqrt(n2));
    }
}

double PointMassMeasure::support_radius() const {
    return norms_.empty() ? 0.0 : *std::max_element(norms_.begin(), norms_.end());
}

std::vector<std::size_t> PointMassMeasure::in_shell(double a, double b) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        if (norms_[i] > a && norms_[i] <= b) idx.push_back(i);
    return idx;
}

double PointMassMeasure::shell_mass(double a, double b) const {
    double m = 0.0;
    for (auto i : in_shell(a, b)) m += weights_[i];
    return m;
}

DenseMatrix<double> PointMassMeasure::shell_covariance(double a, double b) const {
    DenseMatrix<double> c(q_, q_);
    for (auto i : in_shell(a, b))
        for (std::size_t r = 0; r < q_; ++r)
            for (std::size_t s = 0; s < q_; ++s) c(r, s) += weights_[i] * atoms_[i][r] * atoms_[i][s];
    return c;
}

std::vector<double> PointMassMeasure::shell_mean(double a, double b) const {
    std::vector<double> m(q_, 0.0);
    for (auto i : in_shell(a, b))
        for (std::size_t r = 0; r < q_; ++r) m[r] += weights_[i] * atoms_[i][r];
    return m;
}

double PointMassMeasure::shell_moment(double a, double b, const MultiIndex& alpha) const {
    double m = 0.0;
    for (auto i : in_shell(a, b)) {
        double t = weights_[i];
        for (std::size_t r = 0; r < q_; ++r) t *= std::pow(atoms_[i][r], alpha[r]);
        m += t;
    }
    return m;
}

void PointMassMeasure::sample_shell(double a, double b, RngStream& rng, std::span<double> out) const {
    const auto idx = in_shell(a, b);
    const double total = shell_mass(a, b);
    if (!(total > 0.0)) throw std::domain_error("PointMassMeasure::sample_shell: shell carries no mass");
    double u = rng.uniform() * total;
    std::size_t pick = idx.back();
    for (auto i : idx) {
        if (u < weights_[i]) {
            pick = i;
            break;
        }
        u -= weights_[i];
    }
    for (std::size_t r = 0; r < q_; ++r) out[r] = atoms_[pick][r];
}

std::complex<double> PointMassMeasure::shell_char_fn(double a, double b, std::span<const double> s) const {
    const double total = shell_mass(a, b);
    if (!(total > 0.0)) throw std::domain_error("PointMassMeasure::shell_char_fn: shell carries no mass");
    std::complex<double> acc = 0.0;
    for (auto i : in_shell(a, b)) {
        double arg = 0.0;
        for (std::size_t r = 0; r < q_; ++r) arg += s[r] * atoms_[i][r];
        acc += weights_[i] * std::exp(std::complex<double>(0.0, arg));
    }
    return acc / total;
}

void ZeroMeasure::sample_shell(double, double, RngStream&, std::span<double>) const {
    throw std::domain_error("ZeroMeasure: nothing to sample");
}

}  // namespace levyclt
