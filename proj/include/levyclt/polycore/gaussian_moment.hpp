#pragma once

#include "levyclt/polycore/dense_matrix.hpp"
#include "levyclt/polycore/multi_index.hpp"
#include "levyclt/polycore/polynomial.hpp"

#include <map>
#include <stdexcept>

namespace levyclt {

/// E[x^alpha] for x ~ N(0, Sigma), memoized per covariance. Uses the pairing
/// recursion E[x_i x^beta] = sum_j Sigma_ij beta_j E[x^{beta - e_j}].
template <Coefficient T>
class GaussianMoments {
public:
    explicit GaussianMoments(DenseMatrix<T> sigma) : sigma_(std::move(sigma)) {
        if (!sigma_.is_square() || sigma_.rows() == 0) throw std::invalid_argument("GaussianMoments: bad covariance shape");
        if (!is_positive_semidefinite(sigma_)) throw std::domain_error("GaussianMoments: covariance is not positive semidefinite");
    }

    std::size_t dim() const { return sigma_.rows(); }
    const DenseMatrix<T>& sigma() const { return sigma_; }

    T moment(const MultiIndex& alpha) {
        if (alpha.dim() != dim()) throw std::invalid_argument("GaussianMoments: dimension mismatch");
        const int ord = alpha.order();
        if (ord == 0) return Scalar<T>::one();
        if (ord % 2 == 1) return Scalar<T>::zero();
        if (auto it = memo_.find(alpha); it != memo_.end()) return it->second;

        std::size_t i = 0;
        while (alpha[i] == 0) ++i;
        const MultiIndex beta = alpha.incremented(i, -1);
        T sum = Scalar<T>::zero();
        for (std::size_t j = 0; j < dim(); ++j) {
            if (beta[j] == 0 || Scalar<T>::is_zero(sigma_(i, j))) continue;
            sum += sigma_(i, j) * Scalar<T>::from_int(beta[j]) * moment(beta.incremented(j, -1));
        }
        memo_.emplace(alpha, sum);
        return sum;
    }

    /// Integral of p against phi_Sigma.
    T expectation(const Polynomial<T>& p) {
        T sum = Scalar<T>::zero();
        for (const auto& [a, c] : p.terms()) sum += c * moment(a);
        return sum;
    }

    /// Integral of p * q against phi_Sigma.
    T inner(const Polynomial<T>& p, const Polynomial<T>& q) { return expectation(p * q); }

private:
    DenseMatrix<T> sigma_;
    std::map<MultiIndex, T, GradedLexLess> memo_;
};

template <Coefficient T>
T gaussian_moment(const MultiIndex& alpha, const DenseMatrix<T>& sigma) {
    return GaussianMoments<T>(sigma).moment(alpha);
}

}  // namespace levyclt
