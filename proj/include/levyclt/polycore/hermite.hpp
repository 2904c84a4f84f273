#pragma once

// Probabilists' Hermite polynomials and their tensor products.

#include "levyclt/polycore/polynomial.hpp"

#include <vector>

namespace levyclt {

/// Two normalizations in use:
///  Edgeworth  : prod_j lambda_j^{-a_j/2} H_{a_j}(lambda_j^{-1/2} x_j)
///  Normalized : (alpha!)^{-1/2} prod_j H_{a_j}(lambda_j^{-1/2} x_j)  (orthonormal under phi_Sigma)
enum class HermiteConvention { Edgeworth, Normalized };

/// H_0 = 1, H_1 = x, H_{j+1} = x H_j - j H_{j-1}.
template <Coefficient T>
Polynomial<T> hermite_1d(int j) {
    if (j < 0) throw std::invalid_argument("hermite_1d: negative degree");
    Polynomial<T> prev = Polynomial<T>::constant(1, Scalar<T>::one());
    if (j == 0) return prev;
    const Polynomial<T> x = Polynomial<T>::variable(1, 0);
    Polynomial<T> cur = x;
    for (int k = 1; k < j; ++k) {
        Polynomial<T> next = x * cur - prev * Scalar<T>::from_int(k);
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// Coefficients c_i of H_a(y) = sum_i c_i y^{a-2i}, i = 0..a/2.
std::vector<mpz_class> hermite_coefficients(int a);

/// Edgeworth-convention tensor Hermite with rational lambdas; exact, since
/// lambda^{-a/2} H_a(lambda^{-1/2} x) = sum_i c_i lambda^{-(a-i)} x^{a-2i}.
Polynomial<Rational> hermite_tensor_exact(const MultiIndex& alpha, const std::vector<Rational>& lambdas);

/// g_alpha = prod_j lambda_j^{a_j/2} H_{a_j}(lambda_j^{-1/2} x_j) = prod_j sum_i c_i lambda_j^i x_j^{a_j-2i}.
/// Orthogonal under N(0, diag(lambda)) with squared norm alpha! prod_j lambda_j^{a_j}; exact.
Polynomial<Rational> hermite_eigenfunction(const MultiIndex& alpha, const std::vector<Rational>& lambdas);

/// Floating tensor Hermite in either convention. Throws on non-positive lambda.
Polynomial<double> hermite_tensor(const MultiIndex& alpha, const std::vector<double>& lambdas,
                                  HermiteConvention convention);

}  // namespace levyclt
