#include <doctest.h>

#include "levyclt/levy/annulus.hpp"
#include "levyclt/levy/cramer.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace levyclt;

namespace {

constexpr double kPi = std::numbers::pi;

// int_a^b f(rho) d rho, independent of the library's closed forms
template <class F>
double quad(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

}  // namespace

TEST_SUITE("levy") {

TEST_CASE("sphere constants") {
    CHECK(sphere_surface(1) == doctest::Approx(2.0));
    CHECK(sphere_surface(2) == doctest::Approx(2 * kPi));
    CHECK(sphere_surface(3) == doctest::Approx(4 * kPi));
    CHECK(sphere_moment(MultiIndex{2, 0}) == doctest::Approx(kPi));
    CHECK(sphere_moment(MultiIndex{1, 1}) == 0.0);
    CHECK(sphere_moment(MultiIndex{2, 0, 0}) == doctest::Approx(4 * kPi / 3));
    CHECK(sphere_moment(MultiIndex{4, 0}) == doctest::Approx(3 * kPi / 4));
}

TEST_CASE("annulus mass example and scaling") {
    StableLikeMeasure nu(2, 1.5);
    const double closed = 2 * kPi * (std::pow(2.0, 1.5) - 1) * std::pow(2.0, 4.5) / 1.5;
    const double oracle = 2 * kPi * quad([](double r) { return r * std::pow(r, -3.5); }, 1.0 / 16, 1.0 / 8);
    CHECK(closed == doctest::Approx(173.30).epsilon(1e-4));
    CHECK(annulus_mass(nu, 3) == doctest::Approx(oracle).epsilon(1e-10));
    for (int r = 0; r < 10; ++r) CHECK(annulus_mass(nu, r + 1) / annulus_mass(nu, r) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-12));
    CHECK(annulus_mass(nu, -1) == 0.0);
    StableLikeMeasure half(2, 1.5, 0.75);
    const double partial = 2 * kPi * quad([](double r) { return std::pow(r, -2.5); }, 0.5, 0.75);
    CHECK(annulus_mass(half, 0) == doctest::Approx(partial).epsilon(1e-10));
}

TEST_CASE("small jump covariance") {
    StableLikeMeasure nu(2, 1.5);
    auto s = small_jump_covariance(nu, 0.25);
    CHECK_FALSE(s.clamped);
    CHECK(s.sigma(0, 0) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(s.sigma(1, 1) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(s.sigma(0, 1) == 0.0);
    CHECK(s.sigma(1, 0) == 0.0);
    // radial quadrature oracle: (1/q) * 2 pi int_0^eps rho^{q+1} rho^{-q-alpha} d rho, with rho = u^2
    const double oracle = 0.5 * 2 * kPi * quad([](double u) { return 2.0 * u * std::pow(u * u, -0.5); }, 0.0, 0.5);
    CHECK(s.sigma(0, 0) == doctest::Approx(oracle).epsilon(1e-9));
    // eps -> 0: closed form pi * (eps / 0.25)^{1/2}
    auto tiny = small_jump_covariance(nu, std::ldexp(1.0, -40));
    CHECK(tiny.sigma(0, 0) == doctest::Approx(kPi * std::ldexp(1.0, -19)).epsilon(1e-12));
    auto clamp = small_jump_covariance(StableLikeMeasure(2, 1.5, 0.5), 0.9);
    CHECK(clamp.clamped);
}

TEST_CASE("covariance additivity and monotonicity") {
    for (double alpha : {1.2, 1.5, 1.8}) {
        StableLikeMeasure nu(2, alpha);
        const int r0 = 2;
        auto whole = small_jump_covariance(nu, std::ldexp(1.0, -r0)).sigma;
        int R = r0;
        DenseMatrix<double> sum(2, 2);
        double tail = 1.0;
        while (tail >= 1e-12) {
            auto c = annulus_covariance(nu, R);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) sum(i, j) += c(i, j);
            tail = small_jump_covariance(nu, std::ldexp(1.0, -R - 1)).sigma(0, 0) / whole(0, 0);
            ++R;
        }
        const double tail_abs = small_jump_covariance(nu, std::ldexp(1.0, -R)).sigma(0, 0);
        CHECK(std::abs(sum(0, 0) + tail_abs - whole(0, 0)) <= 1e-10 * whole(0, 0));
        CHECK(sum(0, 1) == 0.0);
    }
    StableLikeMeasure nu(3, 1.5);
    double prev = 0.0;
    for (double eps = 0.01; eps < 1.0; eps *= 1.7) {
        double v = small_jump_covariance(nu, eps).sigma(0, 0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("nu_r 2^{-r} strictly increasing") {
    for (double alpha : {1.1, 1.5, 1.9}) {
        StableLikeMeasure nu(2, alpha);
        double prev = 0.0;
        for (int r = 5; r <= 20; ++r) {
            double v = annulus_mass(nu, r) * std::ldexp(1.0, -r);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("decomposition") {
    StableLikeMeasure nu(2, 1.5);
    AnnulusDecomposition d(nu, 0.3, 5);
    CHECK(d.r0() == 1);
    CHECK(d.r_max() == 6);
    CHECK(d.shells().front().hi == 0.3);
    CHECK(d.shells().front().lo == 0.25);
    double mass = 0.0;
    for (const auto& s : d.shells()) mass += s.mass;
    CHECK(mass == doctest::Approx(nu.shell_mass(std::ldexp(1.0, -7), 0.3)).epsilon(1e-12));
    CHECK(d.total_intensity() == doctest::Approx(mass));
    const double kept = d.retained_covariance()(0, 0);
    const double all = small_jump_covariance(nu, 0.3).sigma(0, 0);
    CHECK(d.tail_relative_variance() == doctest::Approx((all - kept) / all).epsilon(1e-10));
    auto t = AnnulusDecomposition::with_tolerance(nu, 0.25, 1e-2, 40);
    CHECK(t.tail_relative_variance() < 1e-2);
    CHECK(AnnulusDecomposition::with_tolerance(nu, 0.25, 1e-2, 40).r_max() ==
          AnnulusDecomposition(nu, 0.25, t.r_max() - t.r0()).r_max());
}

TEST_CASE("shell sampler moments") {
    StableLikeMeasure nu(2, 1.5);
    RngStream rng(7, 1);
    const auto [lo, hi] = annulus_bounds(3);
    const int n = 100000;
    double s00 = 0, s11 = 0, s01 = 0;
    std::vector<double> z(2);
    for (int i = 0; i < n; ++i) {
        nu.sample_shell(lo, hi, rng, z);
        const double r = std::hypot(z[0], z[1]);
        REQUIRE(r > lo);
        REQUIRE(r <= hi);
        s00 += z[0] * z[0];
        s11 += z[1] * z[1];
        s01 += z[0] * z[1];
    }
    const auto c = nu.shell_covariance(lo, hi);
    const double m = nu.shell_mass(lo, hi);
    CHECK(s00 / n == doctest::Approx(c(0, 0) / m).epsilon(0.02));
    CHECK(s11 / n == doctest::Approx(c(1, 1) / m).epsilon(0.02));
    CHECK(std::abs(s01 / n) < 0.02 * c(0, 0) / m);
}

TEST_CASE("custom radial against quadrature") {
    std::vector<double> radii{0.0, 0.2, 0.5, 1.0};
    std::vector<double> dens{5.0, 3.0, 1.0, 0.0};
    CustomRadialMeasure nu(2, radii, dens);
    auto g = [&](double r) { return nu.radial_density(r); };
    CHECK(g(0.1) == doctest::Approx(4.0));
    CHECK(g(0.75) == doctest::Approx(0.5));
    CHECK(g(1.5) == 0.0);
    for (auto [a, b] : std::vector<std::pair<double, double>>{{0.05, 0.3}, {0.2, 0.9}, {0.0, 1.0}, {0.4, 2.0}}) {
        const double oracle_mass = 2 * kPi * quad([&](double r) { return r * g(r); }, a, std::min(b, 1.0));
        const double oracle_var = kPi * quad([&](double r) { return r * r * r * g(r); }, a, std::min(b, 1.0));
        CHECK(nu.shell_mass(a, b) == doctest::Approx(oracle_mass).epsilon(1e-8));
        CHECK(nu.shell_covariance(a, b)(0, 0) == doctest::Approx(oracle_var).epsilon(1e-8));
    }
    RngStream rng(3, 3);
    double sum = 0.0;
    const int n = 50000;
    std::vector<double> z(2);
    for (int i = 0; i < n; ++i) {
        nu.sample_shell(0.1, 0.8, rng, z);
        sum += std::hypot(z[0], z[1]);
    }
    const double mean_r = 2 * kPi * quad([&](double r) { return r * r * g(r); }, 0.1, 0.8) / nu.shell_mass(0.1, 0.8);
    CHECK(sum / n == doctest::Approx(mean_r).epsilon(0.01));
    CHECK_THROWS(CustomRadialMeasure(2, {0.0, 0.5}, {1.0}));
    CHECK_THROWS(CustomRadialMeasure(2, {0.5, 0.2}, {1.0, 1.0}));
    CHECK_THROWS(CustomRadialMeasure(2, {0.0, 0.5}, {1.0, -1.0}));
}

TEST_CASE("cramer probe") {
    PointMassMeasure atom(2, {{0.1, 0.0}}, {3.0});
    std::vector<double> grid;
    for (int i = 0; i < 200; ++i) grid.push_back(8.0 + 0.5 * i);
    auto p = cramer_probe(atom, 3, 8.0, grid);
    CHECK(p.ok);
    CHECK(p.sup_abs == doctest::Approx(1.0).epsilon(1e-12));

    StableLikeMeasure nu(2, 1.5);
    auto s = cramer_probe(nu, 4, 8.0, grid, {1.0, 0.0});
    CHECK(s.ok);
    CHECK(s.sup_abs < 0.9);
    auto s2 = cramer_probe(nu, 4, 8.0, grid, {0.6, -0.8});
    CHECK(std::abs(s.sup_abs - s2.sup_abs) < 1e-8);

    // Bessel oracle: E e^{i t.Y} = int rho^{q-1} g J0(t rho) / int rho^{q-1} g on the rescaled shell
    const auto [lo, hi] = annulus_bounds(4);
    for (double t : {8.0, 12.5, 30.0}) {
        const double ts = t * 16.0;
        const double num = quad([&](double r) { return r * std::pow(r, -3.5) * boost::math::cyl_bessel_j(0, ts * r); }, lo, hi);
        const double den = quad([&](double r) { return r * std::pow(r, -3.5); }, lo, hi);
        std::vector<double> sv{ts, 0.0};
        CHECK(std::abs(nu.shell_char_fn(lo, hi, sv) - std::complex<double>(num / den, 0.0)) < 1e-8);
    }
    StableLikeMeasure nu3(3, 1.5);
    auto s3a = cramer_probe(nu3, 2, 4.0, grid, {0.0, 0.0, 1.0});
    auto s3b = cramer_probe(nu3, 2, 4.0, grid, {1.0, 0.0, 0.0});
    CHECK(std::abs(s3a.sup_abs - s3b.sup_abs) < 1e-8);
    CHECK(s3a.sup_abs < 1.0);
}

TEST_CASE("cramer amplification") {
    CHECK(cramer_amplify(1.0, 0.5, 0.5) == doctest::Approx(0.96875).epsilon(1e-15));
    CHECK(cramer_amplify(1.0, 1.0 - 1e-9, 0.5) < 1.0);
    CHECK(cramer_amplify(1.0, 1.0 - 1e-9, 0.5) > 1.0 - 1e-9);
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double rho = 0.05 + 5 * u(gen);
        const double gamma = 0.01 + 0.98 * u(gen);
        const double delta = std::min(rho, 1.0) * (0.01 + 0.98 * u(gen));
        const double g = cramer_amplify(rho, gamma, delta);
        CHECK(g >= gamma);
        CHECK(g < 1.0);
    }
    CHECK_THROWS(cramer_amplify(1.0, 0.5, 1.5));
    CHECK_THROWS(cramer_amplify(1.0, 1.5, 0.5));
}

TEST_CASE("sufficient condition") {
    RngStream rng(5, 5);
    const double a = 0.3;
    CustomRadialMeasure flat(2, {0.0, 1.0}, {1.0, 1.0});
    auto prop = sufficient_condition_check(flat, 2, a, a, 16, 2000, rng);
    CHECK(prop.holds);
    CHECK(prop.min_ratio >= a - 1e-12);
    StableLikeMeasure nu(2, 1.5);
    auto st = sufficient_condition_check(nu, 2, a, std::pow(2.0, -3.5) * a, 16, 2000, rng);
    CHECK(st.holds);
    CHECK(st.unions_tested > 0);
    // b = a is too strong for a decreasing density: outer cells carry less than their area share
    CHECK_FALSE(sufficient_condition_check(nu, 2, a, a, 16, 2000, rng).holds);
    auto full = sufficient_condition_check(nu, 2, 1.0, 0.9, 16, 10, rng);
    CHECK(full.holds);
    CHECK(full.min_ratio == doctest::Approx(1.0));
}

}
