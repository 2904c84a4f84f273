#pragma once

#include "levyclt/levy/measure.hpp"

#include <vector>

namespace levyclt {

struct CramerProbeResult {
    double sup_abs = 0.0;     // sup over the grid of |xi_r(s)|
    double argmax = 0.0;      // |s| attaining it
    bool ok = true;           // false when an evaluation was not finite
    std::string message;
};

/// xi_r(s) = E exp(i s . 2^r Z), Z from nu restricted to Omega_r; sup of |xi_r| over
/// s = t * direction, t in `grid` (values below rho are skipped).
CramerProbeResult cramer_probe(const LevyMeasure& nu, int r, double rho, const std::vector<double>& grid,
                               std::vector<double> direction = {});

/// gamma_bar = 1 - (1 - gamma) delta^2 / (rho + 1)^2 for delta in (0, min(rho, 1)), gamma in (0, 1).
double cramer_amplify(double rho, double gamma, double delta);

struct SufficientCheckResult {
    bool holds = true;
    double min_ratio = 1.0;   // smallest nu-fraction seen among unions with Lebesgue fraction >= a
    int unions_tested = 0;
};

/// Monte Carlo falsification of: Lambda(Gamma)/Lambda(Omega_r) >= a implies nu(Gamma)/nu(Omega_r) >= b,
/// with Gamma ranging over random unions of polar cells of Omega_r (q <= 2).
SufficientCheckResult sufficient_condition_check(const RadialMeasure& nu, int r, double a, double b, int n_cells,
                                                 int trials, RngStream& rng);

}  // namespace levyclt
