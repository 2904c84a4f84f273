#include "levyclt/polycore/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levyclt {

SymmetricEigen symmetric_eigen(const DenseMatrix<double>& m) {
    if (!m.is_square()) throw std::invalid_argument("symmetric_eigen: matrix must be square");
    const auto n = static_cast<Eigen::Index>(m.rows());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw std::runtime_error("symmetric_eigen: solver failed");

    SymmetricEigen out;
    out.values.resize(m.rows());
    out.vectors = DenseMatrix<double>(m.rows(), m.rows());
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values[k] = es.eigenvalues()(k);
        Eigen::VectorXd v = es.eigenvectors().col(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(v(i)) > 1e-14) {
                if (v(i) < 0) v = -v;
                break;
            }
        }
        for (Eigen::Index i = 0; i < n; ++i) out.vectors(i, k) = v(i);
    }
    return out;
}

DenseMatrix<double> symmetric_sqrt(const DenseMatrix<double>& m, double tol) {
    const SymmetricEigen es = symmetric_eigen(m);
    const std::size_t n = m.rows();
    double scale = 1.0;
    for (double v : es.values) scale = std::max(scale, std::abs(v));
    DenseMatrix<double> out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        double l = es.values[k];
        if (l < -tol * scale) throw std::domain_error("symmetric_sqrt: matrix is not positive semidefinite");
        const double s = std::sqrt(std::max(l, 0.0));
        if (s == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out(i, j) += s * es.vectors(i, k) * es.vectors(j, k);
    }
    return out;
}

bool is_numerically_singular(const DenseMatrix<double>& m, double rel_tol) {
    const SymmetricEigen es = symmetric_eigen(m);
    const double lmax = es.values.back();
    return !(lmax > 0.0) || es.values.front() < rel_tol * lmax;
}

}  // namespace levyclt
