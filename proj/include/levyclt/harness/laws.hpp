#pragma once

// Built-in test laws for the CLT experiments. All are absolutely continuous, so they
// satisfy Cramer's condition; lattice laws are rejected by name.

#include "levyclt/edgeworth/cumulants.hpp"
#include "levyclt/sampling/rng.hpp"
#include "levyclt/wasserstein/wasserstein.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>

namespace levyclt {

class TestLaw {
public:
    virtual ~TestLaw() = default;
    virtual std::string name() const = 0;
    virtual std::size_t dim() const = 0;
    /// Exact cumulants of one summand up to `order`.
    virtual CumulantSet<Rational> cumulants(int order) const = 0;
    /// One draw of Y_m = m^{-1/2} (X_1 + ... + X_m).
    virtual void sample_sum(long m, RngStream& rng, std::span<double> out) const = 0;
    /// Quantile function of Y_m when known in closed form (1D only).
    virtual std::optional<QuantileFn> sum_quantile(long m) const { (void)m; return std::nullopt; }
    /// True when Y_m is exactly N(0, Sigma) for every m.
    virtual bool is_gaussian() const { return false; }
};

/// "exponential" (Exp(1) - 1), "product-exponential" (two independent copies),
/// "disk" (uniform on the unit disk), "gaussian" (N(0, I_dim)).
std::unique_ptr<TestLaw> make_law(const std::string& name, std::size_t dim = 1);

}  // namespace levyclt
