#pragma once

#include "levyclt/edgeworth/cumulants.hpp"

#include <span>
#include <vector>

namespace levyclt {

/// kappa_M = max(1, E|X|^M) from a known absolute moment.
double kappa(double abs_moment);
/// kappa_M from equal-weight samples (row-major, `dim` coordinates per point).
double kappa_from_samples(std::span<const double> points, std::size_t dim, double M);
/// kappa_M of N(0, Sigma) for even integer M, exact Gaussian moments.
double kappa_gaussian(const DenseMatrix<Rational>& sigma, int M);

struct MinMResult {
    long m = 0;
    long kappa_bound = 0;   // smallest m with m > kappa^{max(4, 12/n)}
    long char_bound = 0;    // smallest m beyond which the characteristic-function inequality holds
};

/// Smallest m such that m > kappa_{n+tau}^{max(4, 12/n)} (beta = 1/6, tau = 1/2) and
/// gamma_bar^m m^{(q+1)(n+1)/2} <= det(Sigma)^{-1/2} lambda_1^{-3(n-1)/2} kappa_{n+tau}^{n-2}
/// for every m' >= m. `kappa_n_tau` is kappa_{n+1/2}, at least 1.
MinMResult min_m_heuristic(const CumulantSet<double>& c, int n, double gamma_bar, double kappa_n_tau = 1.0);

}  // namespace levyclt
