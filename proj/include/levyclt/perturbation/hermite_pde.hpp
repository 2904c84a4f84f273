#pragma once

// The operator -Lap + x.Sigma^{-1} grad and its inverse on polynomials orthogonal to phi_Sigma.

#include "levyclt/polycore/gaussian_moment.hpp"
#include "levyclt/polycore/hermite.hpp"
#include "levyclt/polycore/polynomial.hpp"

#include <algorithm>
#include <vector>

namespace levyclt {

/// L_Sigma U = div U - x . Sigma^{-1} U.
template <Coefficient T>
Polynomial<T> apply_L(const PolyVector<T>& U, const DenseMatrix<T>& sigma) {
    if (U.size() != sigma.rows()) throw std::invalid_argument("apply_L: field arity does not match Sigma");
    const DenseMatrix<T> inv = sigma.inverse();
    const std::size_t q = U.size();
    return divergence(U) - dot(coordinate_field<T>(q), apply_matrix(inv, U));
}

/// -Lap u + x . Sigma^{-1} grad u, i.e. -L_Sigma(grad u).
template <Coefficient T>
Polynomial<T> hermite_operator(const Polynomial<T>& u, const DenseMatrix<T>& sigma) {
    return -apply_L(gradient(u), sigma);
}

namespace detail {

template <Coefficient T>
void require_orthogonal(const Polynomial<T>& rhs, const DenseMatrix<T>& sigma) {
    GaussianMoments<T> gm(sigma);
    const T mean = gm.expectation(rhs);
    bool ok;
    if constexpr (Scalar<T>::exact) {
        ok = Scalar<T>::is_zero(mean);
    } else {
        double scale = 1.0;
        for (const auto& [a, c] : rhs.terms()) scale = std::max(scale, std::abs(c));
        ok = std::abs(mean) <= 1e-10 * scale;
    }
    if (!ok) throw std::domain_error("solve_hermite_pde: right-hand side is not orthogonal to phi_Sigma");
}

}  // namespace detail

enum class BasisOrder { GradedLex, Reversed };

/// Solves -Lap u + x . Sigma^{-1} grad u = rhs for any SPD Sigma, exactly in rational mode.
/// Splitting u by homogeneous degree gives A_k u_k = rhs_k + Lap u_{k+2}, with A_k the
/// Euler-type operator x . Sigma^{-1} grad on degree-k forms (positive spectrum for k >= 1),
/// solved from the top degree down. The constant term of u is zero.
template <Coefficient T>
Polynomial<T> solve_hermite_pde(const Polynomial<T>& rhs, const DenseMatrix<T>& sigma, BasisOrder order = BasisOrder::GradedLex) {
    const std::size_t q = rhs.dim();
    if (sigma.rows() != q || !sigma.is_square()) throw std::invalid_argument("solve_hermite_pde: Sigma shape mismatch");
    if (!is_positive_definite(sigma)) throw std::domain_error("solve_hermite_pde: Sigma must be positive definite");
    detail::require_orthogonal(rhs, sigma);
    const DenseMatrix<T> inv = sigma.inverse();

    Polynomial<T> u(q);
    Polynomial<T> carry(q);  // sum of Lap u_j so far; its degree-k part is Lap u_{k+2}
    for (int k = rhs.degree(); k >= 1; --k) {
        auto basis = multi_indices_of_degree(q, k);
        if (order == BasisOrder::Reversed) std::reverse(basis.begin(), basis.end());
        std::map<MultiIndex, std::size_t, GradedLexLess> pos;
        for (std::size_t i = 0; i < basis.size(); ++i) pos.emplace(basis[i], i);

        std::vector<T> b(basis.size(), Scalar<T>::zero());
        const Polynomial<T> target = rhs.homogeneous_part(k) + carry.homogeneous_part(k);
        for (const auto& [a, c] : target.terms()) b[pos.at(a)] = c;

        // column for x^beta: sum_{i,j} S_ij beta_j x^{beta - e_j + e_i}
        DenseMatrix<T> A(basis.size(), basis.size());
        for (std::size_t col = 0; col < basis.size(); ++col) {
            const MultiIndex& beta = basis[col];
            for (std::size_t j = 0; j < q; ++j) {
                if (beta[j] == 0) continue;
                const MultiIndex lowered = beta.incremented(j, -1);
                for (std::size_t i = 0; i < q; ++i) {
                    if (Scalar<T>::is_zero(inv(i, j))) continue;
                    A(pos.at(lowered.incremented(i, 1)), col) += inv(i, j) * Scalar<T>::from_int(beta[j]);
                }
            }
        }
        const std::vector<T> sol = A.solve(b);
        Polynomial<T> uk(q);
        for (std::size_t i = 0; i < basis.size(); ++i) uk.add_term(basis[i], sol[i]);
        u += uk;
        carry += laplacian(uk);
    }
    return u;
}

/// Hermite eigen-expansion route for diagonal Sigma = diag(lambdas):
/// u = sum_alpha c_alpha / nu_alpha g_alpha, c_alpha = <rhs, g_alpha> / |g_alpha|^2, nu_alpha = sum_j alpha_j / lambda_j.
Polynomial<Rational> solve_hermite_pde_diagonal(const Polynomial<Rational>& rhs, const std::vector<Rational>& lambdas,
                                                BasisOrder order = BasisOrder::GradedLex);

}  // namespace levyclt
