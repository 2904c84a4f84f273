#pragma once

// Floating symmetric eigen-decomposition with a fixed sign convention, and the
// matrix square root built from it.

#include "levyclt/polycore/dense_matrix.hpp"

#include <vector>

namespace levyclt {

struct SymmetricEigen {
    std::vector<double> values;    // ascending
    DenseMatrix<double> vectors;   // column k pairs with values[k]; first nonzero entry positive
};

SymmetricEigen symmetric_eigen(const DenseMatrix<double>& m);

/// Symmetric square root A^{1/2} = V diag(sqrt(max(l, 0))) V^T. Throws std::domain_error
/// when an eigenvalue is below -tol * max(1, |largest|).
DenseMatrix<double> symmetric_sqrt(const DenseMatrix<double>& m, double tol = 1e-12);

/// True when lambda_min < rel_tol * lambda_max (or lambda_max <= 0).
bool is_numerically_singular(const DenseMatrix<double>& m, double rel_tol = 1e-10);

}  // namespace levyclt
