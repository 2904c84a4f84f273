#include "levyclt/polycore/hermite.hpp"

#include <cmath>

namespace levyclt {

std::vector<mpz_class> hermite_coefficients(int a) {
    if (a < 0) throw std::invalid_argument("hermite_coefficients: negative degree");
    const Polynomial<Rational> h = hermite_1d<Rational>(a);
    std::vector<mpz_class> c;
    for (int i = 0; 2 * i <= a; ++i) c.push_back(h.coefficient(MultiIndex{a - 2 * i}).get_num());
    return c;
}

namespace {

// prod_j sum_i c_i lambda_j^{s(a_j, i)} x_j^{a_j - 2i}
template <class Power>
Polynomial<Rational> scaled_tensor(const MultiIndex& alpha, const std::vector<Rational>& lambdas, Power power) {
    const std::size_t q = alpha.dim();
    if (lambdas.size() != q) throw std::invalid_argument("hermite tensor: lambda count mismatch");
    for (const auto& l : lambdas)
        if (sgn(l) <= 0) throw std::domain_error("hermite tensor: lambdas must be positive");
    Polynomial<Rational> out = Polynomial<Rational>::constant(q, Rational(1));
    for (std::size_t j = 0; j < q; ++j) {
        const int a = alpha[j];
        if (a == 0) continue;
        const auto c = hermite_coefficients(a);
        Polynomial<Rational> factor(q);
        for (int i = 0; 2 * i <= a; ++i) {
            const int e = power(a, i);
            Rational scale(1);
            Rational base = e >= 0 ? lambdas[j] : Rational(1) / lambdas[j];
            for (int t = 0; t < std::abs(e); ++t) scale *= base;
            factor.add_term(MultiIndex::unit(q, j).incremented(j, a - 2 * i - 1), Rational(c[static_cast<std::size_t>(i)]) * scale);
        }
        out = out * factor;
    }
    return out;
}

}  // namespace

Polynomial<Rational> hermite_tensor_exact(const MultiIndex& alpha, const std::vector<Rational>& lambdas) {
    return scaled_tensor(alpha, lambdas, [](int a, int i) { return -(a - i); });
}

Polynomial<Rational> hermite_eigenfunction(const MultiIndex& alpha, const std::vector<Rational>& lambdas) {
    return scaled_tensor(alpha, lambdas, [](int, int i) { return i; });
}

Polynomial<double> hermite_tensor(const MultiIndex& alpha, const std::vector<double>& lambdas, HermiteConvention convention) {
    const std::size_t q = alpha.dim();
    if (lambdas.size() != q) throw std::invalid_argument("hermite_tensor: lambda count mismatch");
    for (double l : lambdas)
        if (!(l > 0.0)) throw std::domain_error("hermite_tensor: lambdas must be positive");
    Polynomial<double> out = Polynomial<double>::constant(q, 1.0);
    for (std::size_t j = 0; j < q; ++j) {
        const int a = alpha[j];
        if (a == 0) continue;
        const auto c = hermite_coefficients(a);
        const double s = 1.0 / std::sqrt(lambdas[j]);
        const double pre = convention == HermiteConvention::Edgeworth ? std::pow(s, a) : 1.0;
        Polynomial<double> factor(q);
        for (int i = 0; 2 * i <= a; ++i)
            factor.add_term(MultiIndex::unit(q, j).incremented(j, a - 2 * i - 1),
                            pre * c[static_cast<std::size_t>(i)].get_d() * std::pow(s, a - 2 * i));
        out = out * factor;
    }
    if (convention == HermiteConvention::Normalized) out *= 1.0 / std::sqrt(factorial(alpha).get_d());
    return out;
}

}  // namespace levyclt
