#include <doctest.h>

#include "levyclt/edgeworth/expansion.hpp"
#include "levyclt/sampling/samplers.hpp"

#include <cmath>
#include <numeric>

using namespace levyclt;

namespace {

struct Moments {
    std::vector<double> mean;
    DenseMatrix<double> cov;
};

template <class Draw>
Moments sample_moments(std::size_t q, int n, Draw draw) {
    std::vector<double> x(q), s(q, 0.0);
    DenseMatrix<double> ss(q, q);
    for (int i = 0; i < n; ++i) {
        draw(x);
        for (std::size_t a = 0; a < q; ++a) {
            s[a] += x[a];
            for (std::size_t b = 0; b < q; ++b) ss(a, b) += x[a] * x[b];
        }
    }
    Moments m{std::vector<double>(q), DenseMatrix<double>(q, q)};
    for (std::size_t a = 0; a < q; ++a) m.mean[a] = s[a] / n;
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < q; ++b) m.cov(a, b) = ss(a, b) / n - m.mean[a] * m.mean[b];
    return m;
}

GradientPolyMap<double> map_1d(Rational mu3, Rational mu4, int n) {
    IndexMap<Rational> mu{{MultiIndex{2}, Rational(1)}, {MultiIndex{3}, mu3}};
    if (n >= 4) mu.emplace(MultiIndex{4}, mu4);
    CumulantSet<Rational> c(1, n, mu);
    return invert_S_map(build_Q(c, n - 2), c.covariance()).cast<double>();
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("rng reproducibility and decorrelation") {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(derive_stream_id(1, 2, kPurposeLaw) != derive_stream_id(2, 1, kPurposeLaw));
    CHECK(derive_stream_id(1, 2, kPurposeLaw) != derive_stream_id(1, 2, kPurposeReference));
    RngStream x(42, derive_stream_id(0, 0, 1)), y(42, derive_stream_id(0, 1, 1));
    const int n = 100000;
    std::vector<double> u(n), v(n);
    for (int i = 0; i < n; ++i) {
        u[i] = x.normal();
        v[i] = y.normal();
    }
    double cross0 = 0.0, cross1 = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        cross0 += u[i] * v[i];
        cross1 += u[i] * v[i + 1];
    }
    CHECK(std::abs(cross0 / n) < 0.01);
    CHECK(std::abs(cross1 / n) < 0.01);
}

TEST_CASE("variate generators") {
    RngStream rng(1, 1);
    const int n = 200000;
    double su = 0, se = 0, sg = 0, sg2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        se += rng.exponential();
        const double g = rng.gamma(2.5);
        sg += g;
        sg2 += g * g;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(se / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sg / n == doctest::Approx(2.5).epsilon(0.01));
    CHECK(sg2 / n - (sg / n) * (sg / n) == doctest::Approx(2.5).epsilon(0.03));
    for (double lam : {0.3, 4.0, 29.0, 31.0, 250.0}) {
        double s = 0, s2 = 0;
        const int m = 100000;
        for (int i = 0; i < m; ++i) {
            const double k = static_cast<double>(rng.poisson(lam));
            s += k;
            s2 += k * k;
        }
        const double mean = s / m, var = s2 / m - mean * mean;
        CHECK(std::abs(mean - lam) < 4.0 * std::sqrt(lam / m));
        CHECK(var == doctest::Approx(lam).epsilon(0.04));
    }
    CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("gaussian sampler") {
    RngStream zero(3, 3);
    std::vector<double> x(2);
    for (int i = 0; i < 10; ++i) {
        sample_gaussian(DenseMatrix<double>(2, 2), zero, x);
        CHECK(x[0] == 0.0);
        CHECK(x[1] == 0.0);
    }
    RngStream rng(3, 4);
    GaussianSampler id(DenseMatrix<double>::identity(2));
    const int n = 1000000;
    auto m = sample_moments(2, n, [&](std::span<double> out) { id.sample(rng, out); });
    CHECK(std::abs(m.mean[0]) < 4.0 / std::sqrt(n));
    CHECK(std::abs(m.mean[1]) < 4.0 / std::sqrt(n));
    GaussianSampler d(DenseMatrix<double>{{1.0, 0.0}, {0.0, 4.0}});
    auto md = sample_moments(2, 100000, [&](std::span<double> out) { d.sample(rng, out); });
    CHECK(md.cov(0, 0) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(md.cov(1, 1) == doctest::Approx(4.0).epsilon(0.05));
    CHECK(std::abs(md.cov(0, 1)) < 0.05);
    CHECK_THROWS(GaussianSampler(DenseMatrix<double>{{1.0, 0.0}, {0.0, -1.0}}));
}

TEST_CASE("perturbed normal") {
    // zero potentials reproduce the Gaussian draw bit for bit
    DenseMatrix<double> sig{{2.0, 0.5}, {0.5, 1.0}};
    GradientPolyMap<double> ident(sig, {Polynomial<double>(2)});
    RngStream a(9, 1), b(9, 1);
    std::vector<double> x(2), y(2);
    for (int i = 0; i < 100; ++i) {
        sample_perturbed_normal(ident, 0.3, 1, a, x);
        sample_gaussian(sig, b, y);
        CHECK(x == y);
    }
    // r = 0 is the identity map
    auto m1 = map_1d(Rational(1), Rational(0), 3);
    RngStream c(9, 2), d(9, 2);
    std::vector<double> u(1), v(1);
    for (int i = 0; i < 100; ++i) {
        sample_perturbed_normal(m1, 0.3, 0, c, u);
        sample_gaussian(DenseMatrix<double>::identity(1), d, v);
        CHECK(u == v);
    }
}

TEST_CASE("perturbed normal moments 1d") {
    const int n = 1000000;
    const double eps = 0.05;
    PerturbedNormalSampler s3(map_1d(Rational(1), Rational(0), 3));
    RngStream rng(21, 1);
    double m3 = 0, m6 = 0;
    for (int i = 0; i < n; ++i) {
        double x;
        s3.sample(eps, -1, rng, std::span<double>(&x, 1));
        m3 += x * x * x;
        m6 += x * x * x * x * x * x;
    }
    m3 /= n;
    const double se3 = std::sqrt((m6 / n - m3 * m3) / n);
    CHECK(std::abs(m3 - eps * 1.0) < 3.0 * se3);

    // order 4: third moment eps mu3, fourth 3 + eps^2 mu4
    PerturbedNormalSampler s4(map_1d(Rational(1, 2), Rational(2), 4));
    const double e2 = 0.2;
    double a3 = 0, a4 = 0, a6 = 0, a8 = 0;
    for (int i = 0; i < n; ++i) {
        double x;
        s4.sample(e2, -1, rng, std::span<double>(&x, 1));
        const double x2 = x * x;
        a3 += x2 * x;
        a4 += x2 * x2;
        a6 += x2 * x2 * x2;
        a8 += x2 * x2 * x2 * x2;
    }
    a3 /= n;
    a4 /= n;
    CHECK(std::abs(a3 - e2 * 0.5) < 4.0 * std::sqrt((a6 / n - a3 * a3) / n));
    CHECK(std::abs(a4 - (3.0 + e2 * e2 * 2.0)) < 4.0 * std::sqrt((a8 / n - a4 * a4) / n));
}

TEST_CASE("perturbed normal moments 2d") {
    IndexMap<Rational> mu{{MultiIndex{2, 0}, Rational(1)}, {MultiIndex{0, 2}, Rational(2)}, {MultiIndex{1, 1}, Rational(1, 2)},
                          {MultiIndex{3, 0}, Rational(1)}, {MultiIndex{2, 1}, Rational(-1, 2)},
                          {MultiIndex{1, 2}, Rational(1, 3)}, {MultiIndex{0, 3}, Rational(3, 4)}};
    CumulantSet<Rational> c(2, 3, mu);
    PerturbedNormalSampler s(invert_S_map(build_Q(c, 1), c.covariance()).cast<double>());
    const double eps = 0.1;
    const int n = 1000000;
    RngStream rng(77, 1);
    std::vector<MultiIndex> idx{MultiIndex{3, 0}, MultiIndex{2, 1}, MultiIndex{1, 2}, MultiIndex{0, 3}};
    std::vector<double> sum(4, 0.0), sum2(4, 0.0);
    std::vector<double> x(2);
    for (int i = 0; i < n; ++i) {
        s.sample(eps, -1, rng, x);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const double v = std::pow(x[0], idx[k][0]) * std::pow(x[1], idx[k][1]);
            sum[k] += v;
            sum2[k] += v * v;
        }
    }
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const double m = sum[k] / n;
        const double se = std::sqrt((sum2[k] / n - m * m) / n);
        CHECK(std::abs(m - eps * c.mu(idx[k]).get_d()) < 4.0 * se);
    }
}

TEST_CASE("compound poisson") {
    RngStream rng(5, 5);
    std::vector<double> out(2), mean{0.0, 0.0};
    auto jump = [](RngStream& g, std::span<double> z) {
        z[0] = g.uniform() < 0.5 ? -1.0 : 1.0;
        z[1] = 2.0 * g.normal();
    };
    sample_compound_poisson(0.0, 1.0, jump, mean, rng, out);
    CHECK(out == std::vector<double>{0.0, 0.0});
    sample_compound_poisson(5.0, 0.0, jump, mean, rng, out);
    CHECK(out == std::vector<double>{0.0, 0.0});
    CHECK_THROWS(sample_compound_poisson(-1.0, 1.0, jump, mean, rng, out));
    auto m = sample_moments(2, 100000, [&](std::span<double> o) { sample_compound_poisson(50.0, 2.0, jump, mean, rng, o); });
    CHECK(m.cov(0, 0) == doctest::Approx(100.0).epsilon(0.05));
    CHECK(m.cov(1, 1) == doctest::Approx(400.0).epsilon(0.05));
    // asymmetric jumps: compensation keeps the mean at zero
    std::vector<double> mj{1.0};
    std::vector<double> o1(1);
    const int n = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        sample_compound_poisson(3.0, 1.0, [](RngStream& g, std::span<double> z) { z[0] = g.exponential(); }, mj, rng, o1);
        s += o1[0];
        s2 += o1[0] * o1[0];
    }
    CHECK(std::abs(s / n) < 4.0 * std::sqrt(s2 / n / n));
    CHECK(s2 / n == doctest::Approx(6.0).epsilon(0.05));
}

TEST_CASE("small jumps") {
    StableLikeMeasure nu(2, 1.5, 0.25);
    RngStream rng(8, 8);
    std::vector<double> out(2);
    // cutoff below the support start of a measure living on (0.5, 1]
    CustomRadialMeasure ring(2, {0.5, 1.0}, {1.0, 1.0});
    AnnulusDecomposition empty(ring, 0.25, 4);
    sample_small_jumps(ring, empty, 1.0, rng, out);
    CHECK(out == std::vector<double>{0.0, 0.0});

    AnnulusDecomposition dec(nu, 0.25, 4);
    const int n = 100000;
    const double t = 0.02;
    auto m = sample_moments(2, n, [&](std::span<double> o) { sample_small_jumps(nu, dec, t, rng, o); });
    const auto& s = dec.retained_covariance();
    CHECK(m.cov(0, 0) == doctest::Approx(t * s(0, 0)).epsilon(0.05));
    CHECK(m.cov(1, 1) == doctest::Approx(t * s(1, 1)).epsilon(0.05));
    CHECK(std::abs(m.cov(0, 1)) < 0.05 * t * s(0, 0));
    CHECK(std::abs(m.mean[0]) < 4.0 * std::sqrt(t * s(0, 0) / n));
    CHECK(std::abs(m.mean[1]) < 4.0 * std::sqrt(t * s(1, 1) / n));
}

TEST_CASE("levy increment modes") {
    SUBCASE("all-zero model") {
        LevyIncrementModel::Params p;
        p.a = {0.0, 0.0};
        p.B = DenseMatrix<double>(2, 1);
        p.nu = std::make_shared<ZeroMeasure>(2);
        p.eps = 0.5;
        p.h = 0.1;
        LevyIncrementModel model(p);
        RngStream rng(1, 2);
        std::vector<double> out(2);
        for (auto mode : {IncrementMode::Exact, IncrementMode::Gaussianized, IncrementMode::Perturbed}) {
            model.sample(mode, rng, out);
            CHECK(out == std::vector<double>{0.0, 0.0});
        }
    }
    SUBCASE("moment match without big jumps") {
        LevyIncrementModel::Params p;
        p.a = {0.3, -0.2};
        p.B = DenseMatrix<double>{{1.0}, {0.5}};
        p.nu = std::make_shared<StableLikeMeasure>(2, 1.5, 0.5);
        p.eps = 0.5;
        p.depth = 3;
        p.h = 0.02;
        p.perturbed_order = 4;
        LevyIncrementModel model(p);
        CHECK(model.big_jump_mass() == 0.0);
        CHECK(model.perturbed() != nullptr);
        const int n = 100000;
        std::vector<Moments> ms;
        for (auto mode : {IncrementMode::Exact, IncrementMode::Gaussianized, IncrementMode::Perturbed}) {
            RngStream rng(11, static_cast<std::uint64_t>(mode));
            ms.push_back(sample_moments(2, n, [&](std::span<double> o) { model.sample(mode, rng, o); }));
        }
        DenseMatrix<double> target = p.B * p.B.transpose();
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) target(i, j) = (target(i, j) + model.decomposition().retained_covariance()(i, j)) * p.h;
        for (const auto& m : ms) {
            for (std::size_t i = 0; i < 2; ++i) {
                CHECK(std::abs(m.mean[i] - p.a[i] * p.h) < 4.0 * std::sqrt(target(i, i) / n));
                CHECK(m.cov(i, i) == doctest::Approx(target(i, i)).epsilon(0.03));
            }
            CHECK(m.cov(0, 1) == doctest::Approx(target(0, 1)).epsilon(0.06));
        }
    }
    SUBCASE("big jumps") {
        LevyIncrementModel::Params p;
        p.a = {0.0};
        p.B = DenseMatrix<double>{{0.5}};
        p.nu = std::make_shared<StableLikeMeasure>(1, 1.5, 1.0);
        p.eps = 0.25;
        p.depth = 2;
        p.h = 0.5;
        LevyIncrementModel model(p);
        CHECK(model.big_jump_mass() == doctest::Approx(p.nu->shell_mass(0.25, 1.0)));
        const double var_big = p.nu->shell_covariance(0.25, 1.0)(0, 0) * p.h;
        const double target = (0.25 + model.decomposition().retained_covariance()(0, 0)) * p.h + var_big;
        RngStream rng(4, 4);
        for (auto mode : {IncrementMode::Exact, IncrementMode::Gaussianized}) {
            auto m = sample_moments(1, 100000, [&](std::span<double> o) { model.sample(mode, rng, o); });
            CHECK(m.cov(0, 0) == doctest::Approx(target).epsilon(0.04));
            CHECK(std::abs(m.mean[0]) < 4.0 * std::sqrt(target / 100000));
        }
    }
    CHECK(parse_increment_mode("perturbed") == IncrementMode::Perturbed);
    CHECK_THROWS(parse_increment_mode("bogus"));
}

TEST_CASE("small jump perturbation cumulants") {
    StableLikeMeasure nu(1, 1.5, 0.5);
    AnnulusDecomposition dec(nu, 0.5, 6);
    const double h = 0.1;
    auto map = small_jump_perturbation(nu, dec, h, 4);
    CHECK(map.sigma()(0, 0) == doctest::Approx(dec.retained_covariance()(0, 0)).epsilon(1e-12));
    // symmetric measure: odd cumulants vanish, so p_1 = 0 and p_2 carries the fourth cumulant
    CHECK(map.potentials()[0].is_zero());
    CHECK_FALSE(map.potentials()[1].is_zero());
}

}
