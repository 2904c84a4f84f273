#include "levyclt/edgeworth/expansion.hpp"

namespace levyclt {

GaussianDensity::GaussianDensity(const DenseMatrix<double>& sigma) : inv_(sigma.inverse()) {
    const double det = sigma.determinant();
    if (!(det > 0.0)) throw std::domain_error("GaussianDensity: covariance must be positive definite");
    norm_ = 1.0 / std::sqrt(std::pow(2.0 * std::numbers::pi, static_cast<double>(sigma.rows())) * det);
}

double GaussianDensity::operator()(std::span<const double> x) const {
    const std::size_t q = inv_.rows();
    if (x.size() != q) throw std::invalid_argument("GaussianDensity: dimension mismatch");
    double quad = 0.0;
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) quad += x[i] * inv_(i, j) * x[j];
    return norm_ * std::exp(-0.5 * quad);
}

}  // namespace levyclt
