#include "levyclt/harness/laws.hpp"

#include "levyclt/harness/config.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>

namespace levyclt {

namespace {

Rational factorial_q(int n) {
    mpz_class f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return Rational(f);
}

// kappa_n = (n - 1)! for Exp(1); centering only removes the first cumulant
class CenteredExponential final : public TestLaw {
public:
    explicit CenteredExponential(std::size_t dim) : dim_(dim) {}
    std::string name() const override { return dim_ == 1 ? "exponential" : "product-exponential"; }
    std::size_t dim() const override { return dim_; }
    CumulantSet<Rational> cumulants(int order) const override {
        IndexMap<Rational> mu;
        for (int n = 2; n <= order; ++n)
            for (std::size_t j = 0; j < dim_; ++j) {
                MultiIndex a(dim_);
                a.set(j, n);
                mu[a] = factorial_q(n - 1);
            }
        return CumulantSet<Rational>(dim_, order, std::move(mu));
    }
    void sample_sum(long m, RngStream& rng, std::span<double> out) const override {
        const double md = static_cast<double>(m);
        for (std::size_t j = 0; j < dim_; ++j) out[j] = (rng.gamma(md) - md) / std::sqrt(md);
    }
    std::optional<QuantileFn> sum_quantile(long m) const override {
        if (dim_ != 1) return std::nullopt;
        const double md = static_cast<double>(m);
        return QuantileFn([md](double t) {
            boost::math::gamma_distribution<> g(md, 1.0);
            return (boost::math::quantile(g, t) - md) / std::sqrt(md);
        });
    }

private:
    std::size_t dim_;
};

// E x^a y^b = 2/(a+b+2) (a-1)!!(b-1)!!/(a+b)!! for even a, b; zero otherwise
class UniformDisk final : public TestLaw {
public:
    std::string name() const override { return "disk"; }
    std::size_t dim() const override { return 2; }
    CumulantSet<Rational> cumulants(int order) const override {
        auto dfact = [](int n) {
            mpz_class f = 1;
            for (int i = n; i > 1; i -= 2) f *= i;
            return f;
        };
        IndexMap<Rational> mom;
        for (const auto& a : multi_indices_between(2, 1, order)) {
            Rational v = 0;
            if (a[0] % 2 == 0 && a[1] % 2 == 0) {
                v = Rational(2, a.order() + 2) * Rational(dfact(a[0] - 1) * dfact(a[1] - 1)) / Rational(dfact(a.order()));
                v.canonicalize();
            }
            mom[a] = v;
        }
        return moments_to_cumulants(MomentSet<Rational>(2, order, std::move(mom)));
    }
    void sample_sum(long m, RngStream& rng, std::span<double> out) const override {
        double sx = 0.0, sy = 0.0;
        for (long i = 0; i < m; ++i) {
            const double r = std::sqrt(rng.uniform());
            const double th = 2.0 * std::numbers::pi * rng.uniform();
            sx += r * std::cos(th);
            sy += r * std::sin(th);
        }
        const double s = std::sqrt(static_cast<double>(m));
        out[0] = sx / s;
        out[1] = sy / s;
    }
};

class StandardGaussian final : public TestLaw {
public:
    explicit StandardGaussian(std::size_t dim) : dim_(dim) {}
    std::string name() const override { return "gaussian"; }
    std::size_t dim() const override { return dim_; }
    CumulantSet<Rational> cumulants(int order) const override {
        IndexMap<Rational> mu;
        for (std::size_t j = 0; j < dim_; ++j) mu[MultiIndex::unit(dim_, j).incremented(j)] = 1;
        return CumulantSet<Rational>(dim_, order, std::move(mu));
    }
    void sample_sum(long, RngStream& rng, std::span<double> out) const override { rng.normals(out); }
    std::optional<QuantileFn> sum_quantile(long) const override {
        if (dim_ != 1) return std::nullopt;
        return QuantileFn([](double t) { return boost::math::quantile(boost::math::normal_distribution<>(), t); });
    }
    bool is_gaussian() const override { return true; }

private:
    std::size_t dim_;
};

}  // namespace

std::unique_ptr<TestLaw> make_law(const std::string& name, std::size_t dim) {
    if (name == "exponential") {
        if (dim != 1) throw ConfigError("law 'exponential' is one-dimensional; use 'product-exponential' for q = 2");
        return std::make_unique<CenteredExponential>(1);
    }
    if (name == "product-exponential") {
        if (dim != 1 && dim != 2) throw ConfigError("law 'product-exponential' is two-dimensional");
        return std::make_unique<CenteredExponential>(2);
    }
    if (name == "disk") {
        if (dim != 1 && dim != 2) throw ConfigError("law 'disk' is two-dimensional");
        return std::make_unique<UniformDisk>();
    }
    if (name == "gaussian") {
        if (dim < 1 || dim > 10) throw ConfigError("law 'gaussian': dimension must be in 1..10");
        return std::make_unique<StandardGaussian>(dim);
    }
    if (name == "rademacher" || name == "bernoulli" || name == "binomial" || name == "poisson" || name == "lattice")
        throw ConfigError("law '" + name +
                          "' is a lattice law: it violates Cramer's condition (limsup |chi(s)| = 1 as |s| -> inf), "
                          "so the Edgeworth expansion does not apply");
    throw ConfigError("unknown law '" + name + "' (expected exponential, product-exponential, disk or gaussian)");
}

}  // namespace levyclt
