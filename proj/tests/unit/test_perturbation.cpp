#include <doctest.h>

#include "levyclt/edgeworth/expansion.hpp"
#include "levyclt/perturbation/inverse_map.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace levyclt;
using RPoly = Polynomial<Rational>;

namespace {

RPoly H(int i, int j) { return hermite_tensor_exact(MultiIndex{i, j}, {Rational(1), Rational(1)}); }

CumulantSet<Rational> set_2d(Rational m30, Rational m21, Rational m12, Rational m03) {
    IndexMap<Rational> mu{{MultiIndex{2, 0}, Rational(1)}, {MultiIndex{0, 2}, Rational(1)},
                          {MultiIndex{3, 0}, m30}, {MultiIndex{2, 1}, m21},
                          {MultiIndex{1, 2}, m12}, {MultiIndex{0, 3}, m03}};
    return CumulantSet<Rational>(2, 3, mu);
}

RPoly random_poly(std::mt19937_64& gen, std::size_t q, int deg) {
    std::uniform_int_distribution<int> d(-4, 4);
    RPoly p(q);
    for (const auto& a : multi_indices_between(q, 1, deg)) p.add_term(a, Scalar<Rational>::from_ratio(d(gen), 1 + std::abs(d(gen))));
    return p;
}

}  // namespace

TEST_SUITE("perturbation") {

TEST_CASE("apply_L examples") {
    auto one = DenseMatrix<Rational>::identity(1);
    RPoly x = RPoly::variable(1, 0);
    CHECK(apply_L(gradient(RPoly::constant(1, Rational(3))), one).is_zero());
    CHECK(apply_L(gradient(x * x * Rational(1, 2)), one) == hermite_1d<Rational>(2) * Rational(-1));
    CHECK(apply_L(gradient(hermite_1d<Rational>(3) * Rational(1, 3)), one) == hermite_1d<Rational>(3) * Rational(-1));
    DenseMatrix<Rational> sing{{Rational(0)}};
    CHECK_THROWS(apply_L(gradient(x), sing));
}

TEST_CASE("solve_hermite_pde examples") {
    auto I2 = DenseMatrix<Rational>::identity(2);
    CHECK(solve_hermite_pde(H(2, 0), I2) == H(2, 0) * Rational(1, 2) + RPoly::constant(2, Rational(1, 2)));

    std::vector<Rational> lam{Rational(2), Rational(3)};
    auto g = hermite_eigenfunction(MultiIndex{3, 1}, lam);
    RPoly u = solve_hermite_pde(g, DenseMatrix<Rational>::diagonal(lam));
    CHECK(u == g * (Rational(1) / (Rational(3, 2) + Rational(1, 3))));

    CHECK_THROWS_AS(solve_hermite_pde(RPoly::constant(2, Rational(1)), I2), std::domain_error);
    CHECK_THROWS_AS(solve_hermite_pde(RPoly::variable(2, 0) * RPoly::variable(2, 0), I2), std::domain_error);
}

TEST_CASE("exact solver and Hermite eigen route agree; basis order is irrelevant") {
    std::mt19937_64 gen(21);
    std::vector<Rational> lam{Rational(1, 2), Rational(3), Rational(5, 4)};
    auto sigma = DenseMatrix<Rational>::diagonal(lam);
    GaussianMoments<Rational> gm(sigma);
    for (int trial = 0; trial < 5; ++trial) {
        RPoly rhs = random_poly(gen, 3, 4);
        rhs.add_term(MultiIndex(3), Rational(-gm.expectation(rhs)));
        RPoly a = solve_hermite_pde(rhs, sigma);
        RPoly b = solve_hermite_pde(rhs, sigma, BasisOrder::Reversed);
        RPoly c = solve_hermite_pde_diagonal(rhs, lam);
        RPoly d = solve_hermite_pde_diagonal(rhs, lam, BasisOrder::Reversed);
        CHECK(a == b);
        CHECK(a == c);
        CHECK(c == d);
        CHECK(hermite_operator(a, sigma) == rhs);
        CHECK(a.constant_term() == 0);
        CHECK(a.degree() == rhs.degree());
    }
}

TEST_CASE("exact solver handles non-diagonal Sigma") {
    std::mt19937_64 gen(4);
    DenseMatrix<Rational> sigma{{Rational(2), Rational(1, 3)}, {Rational(1, 3), Rational(1)}};
    GaussianMoments<Rational> gm(sigma);
    for (int trial = 0; trial < 5; ++trial) {
        RPoly rhs = random_poly(gen, 2, 5);
        rhs.add_term(MultiIndex(2), Rational(-gm.expectation(rhs)));
        RPoly u = solve_hermite_pde(rhs, sigma);
        CHECK(hermite_operator(u, sigma) == rhs);
    }
}

TEST_CASE("worked 2D example: u_1 solves the PDE with the cubic Hermite part") {
    Rational a(1), b(1, 2), c(1, 3), d(1, 4);
    auto Q = build_Q(set_2d(a, b, c, d), 1);
    auto map = invert_S_map(Q, DenseMatrix<Rational>::identity(2));
    RPoly cubic = H(3, 0) * (a / 18) + H(2, 1) * (b / 6) + H(1, 2) * (c / 6) + H(0, 3) * (d / 18);
    // the potential is fixed up to a constant; compare without it
    RPoly u = map.potentials()[0];
    RPoly cubic0 = cubic;
    cubic0.add_term(MultiIndex(2), Rational(-cubic.constant_term()));
    CHECK(u == cubic0);
    CHECK(map.gradients()[0] == gradient(cubic));
}

TEST_CASE("compute_S_tilde trivial and degree cases") {
    auto I2 = DenseMatrix<Rational>::identity(2);
    std::vector<RPoly> zero_u{RPoly(2), RPoly(2)};
    std::vector<RPoly> zero_S{RPoly(2), RPoly(2)};
    CHECK(compute_S_tilde(zero_u, zero_S, I2).is_zero());

    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 3; ++trial) {
        RPoly u1 = random_poly(gen, 2, 3);
        // S_1 is what u_1 produces at order one
        RPoly S1 = hermite_operator(u1, I2);
        RPoly s2 = compute_S_tilde(std::vector<RPoly>{u1}, std::vector<RPoly>{S1}, I2);
        CHECK(s2.degree() <= 6);
        GaussianMoments<Rational> gm(I2);
        CHECK(gm.expectation(s2) == 0);
        CHECK_THROWS(compute_S_tilde(std::vector<RPoly>{u1}, std::vector<RPoly>{S1 + RPoly::variable(2, 0)}, I2));
    }
}

TEST_CASE("S~_2 matches the push-forward density to second order") {
    auto Q = build_Q(set_2d(Rational(1), Rational(0), Rational(0), Rational(0)), 1);
    auto I2 = DenseMatrix<Rational>::identity(2);
    auto map = invert_S_map(Q, I2);
    RPoly s2 = compute_S_tilde(map.potentials(), Q, I2);
    auto dmap = map.cast<double>();
    auto q1 = Q[0].cast<double>();
    auto s2d = s2.cast<double>();
    GaussianDensity phi(DenseMatrix<double>::identity(2));
    const auto& p = dmap.gradients()[0];

    auto residual = [&](double eps, double y0, double y1) {
        // Newton solve x + eps p(x) = y, then density phi(x)/det(I + eps Dp)
        std::vector<double> x{y0, y1};
        for (int it = 0; it < 50; ++it) {
            double f0 = x[0] + eps * p[0].evaluate(x) - y0;
            double f1 = x[1] + eps * p[1].evaluate(x) - y1;
            double j00 = 1 + eps * p[0].partial(0).evaluate(x), j01 = eps * p[0].partial(1).evaluate(x);
            double j10 = eps * p[1].partial(0).evaluate(x), j11 = 1 + eps * p[1].partial(1).evaluate(x);
            double det = j00 * j11 - j01 * j10;
            x[0] -= (j11 * f0 - j01 * f1) / det;
            x[1] -= (-j10 * f0 + j00 * f1) / det;
        }
        double j00 = 1 + eps * p[0].partial(0).evaluate(x), j01 = eps * p[0].partial(1).evaluate(x);
        double j10 = eps * p[1].partial(0).evaluate(x), j11 = 1 + eps * p[1].partial(1).evaluate(x);
        double dens = phi(x) / std::abs(j00 * j11 - j01 * j10);
        std::vector<double> y{y0, y1};
        return (dens - phi(y) * (1 + eps * q1.evaluate(y))) / (eps * eps) - phi(y) * s2d.evaluate(y);
    };
    double worst1 = 0, worst2 = 0;
    for (double y0 : {-1.5, -0.5, 0.0, 0.7, 1.3})
        for (double y1 : {-1.0, 0.0, 0.9}) {
            worst1 = std::max(worst1, std::abs(residual(2e-3, y0, y1)));
            worst2 = std::max(worst2, std::abs(residual(1e-3, y0, y1)));
        }
    CHECK(worst2 < 0.05);
    CHECK(worst2 < 0.7 * worst1);  // O(eps) remainder
}

TEST_CASE("PDE residuals vanish and gradients are curl-free on random inputs") {
    std::mt19937_64 gen(17);
    for (std::size_t q = 1; q <= 2; ++q) {
        std::uniform_int_distribution<int> d(-3, 3);
        IndexMap<Rational> mu;
        for (const auto& a : multi_indices_between(q, 2, 5)) {
            if (a.order() == 2) mu[a] = (a[0] == 2 ? Rational(3, 2) : (q > 1 && a[1] == 2 ? Rational(2) : Rational(1, 2)));
            else mu[a] = Scalar<Rational>::from_ratio(d(gen), 1 + std::abs(d(gen)));
        }
        CumulantSet<Rational> c(q, 5, mu);
        auto Q = build_Q(c, 2);
        auto map = invert_S_map(Q, c.covariance());
        for (const auto& r : pde_residuals(map, Q)) CHECK(r.is_zero());
        for (const auto& g : map.gradients()) CHECK(is_curl_free(g));
        for (int k = 1; k <= 2; ++k) CHECK(map.potentials()[static_cast<std::size_t>(k - 1)].degree() <= 3 * k);
    }
}

TEST_CASE("zero Edgeworth polynomials give the identity map") {
    std::vector<RPoly> Q{RPoly(2), RPoly(2), RPoly(2)};
    auto map = invert_S_map(Q, DenseMatrix<Rational>::identity(2));
    CHECK(map.is_identity());
}

TEST_CASE("rotation covariance") {
    DenseMatrix<Rational> A{{Rational(3, 5), Rational(-4, 5)}, {Rational(4, 5), Rational(3, 5)}};
    auto I2 = DenseMatrix<Rational>::identity(2);
    CHECK(A.transpose() * A == I2);
    auto c = set_2d(Rational(1, 2), Rational(-1, 3), Rational(2), Rational(1, 5));
    IndexMap<Rational> mu = c.values();
    mu[MultiIndex{4, 0}] = Rational(1, 7);
    mu[MultiIndex{1, 3}] = Rational(-2, 3);
    CumulantSet<Rational> c4(2, 4, mu);
    auto Q = build_Q(c4, 2);
    std::vector<RPoly> Qrot;
    for (const auto& qk : Q) Qrot.push_back(qk.compose_linear(A));
    auto direct = invert_S_map(Qrot, I2);
    auto rotated = rotate_map(invert_S_map(Q, I2), A);
    CHECK(direct.potentials() == rotated.potentials());
    // p'(x) = A^T p(A x)
    for (std::size_t k = 0; k < 2; ++k) {
        auto p = invert_S_map(Q, I2).gradients()[k];
        PolyVector<Rational> pa;
        for (const auto& comp : p) pa.push_back(comp.compose_linear(A));
        CHECK(apply_matrix(A.transpose(), pa) == direct.gradients()[k]);
    }
}

TEST_CASE("1D push-forward density tracks phi(1 + eps Q_1) at second order") {
    CumulantSet<Rational> c(1, 3, IndexMap<Rational>{{MultiIndex{2}, Rational(1)}, {MultiIndex{3}, Rational(1)}});
    auto Q = build_Q(c, 1);
    auto map = invert_S_map(Q, c.covariance()).cast<double>();
    EdgeworthDensity ed(c, 1);
    std::vector<double> errs;
    for (double eps : {0.02, 0.01, 0.005}) {
        double worst = 0;
        for (int i = 0; i <= 600; ++i) {
            double y = -3.0 + 0.01 * i;
            std::vector<double> yv{y};
            worst = std::max(worst, std::abs(pushforward_density_1d(map, eps, y) - ed(eps, yv)));
        }
        errs.push_back(worst);
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.125));
    CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.125));
}

}
