#include "levyclt/perturbation/hermite_pde.hpp"

namespace levyclt {

Polynomial<Rational> solve_hermite_pde_diagonal(const Polynomial<Rational>& rhs, const std::vector<Rational>& lambdas,
                                                BasisOrder order) {
    const std::size_t q = rhs.dim();
    if (lambdas.size() != q) throw std::invalid_argument("solve_hermite_pde_diagonal: lambda count mismatch");
    const DenseMatrix<Rational> sigma = DenseMatrix<Rational>::diagonal(lambdas);
    if (!is_positive_definite(sigma)) throw std::domain_error("solve_hermite_pde_diagonal: lambdas must be positive");
    detail::require_orthogonal(rhs, sigma);

    GaussianMoments<Rational> gm(sigma);
    auto basis = multi_indices_between(q, 1, std::max(rhs.degree(), 0));
    if (order == BasisOrder::Reversed) std::reverse(basis.begin(), basis.end());
    Polynomial<Rational> u(q);
    for (const auto& a : basis) {
        const Polynomial<Rational> g = hermite_eigenfunction(a, lambdas);
        Rational norm2 = Rational(factorial(a));
        Rational nu = 0;
        for (std::size_t j = 0; j < q; ++j) {
            for (int t = 0; t < a[j]; ++t) norm2 *= lambdas[j];
            nu += Rational(a[j]) / lambdas[j];
        }
        const Rational c = gm.inner(rhs, g) / norm2;
        if (sgn(c) == 0) continue;
        u += g * Rational(c / nu);
    }
    // g_alpha carries constants for even alpha; the solution is normalized to zero constant term
    u.add_term(MultiIndex(q), Rational(-u.constant_term()));
    return u;
}

}  // namespace levyclt
