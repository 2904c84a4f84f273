#pragma once

// Dense linear assignment (Jonker-Volgenant shortest augmenting paths) with a
// complementary-slackness optimality certificate.

#include <cstddef>
#include <vector>

namespace levyclt {

inline constexpr std::size_t kMaxAssignmentSize = 4096;

struct AssignmentResult {
    std::vector<int> row_to_col;
    double cost = 0.0;
    /// Dual potentials: u_i + v_j <= c_ij everywhere, equality on the matching.
    std::vector<double> u;
    std::vector<double> v;
    bool certified = false;
    /// Largest dual-feasibility or slackness violation, relative to max |c_ij|.
    double max_violation = 0.0;
};

/// Minimum-cost perfect matching for the n x n row-major cost matrix.
AssignmentResult solve_assignment(const std::vector<double>& cost, std::size_t n, double certificate_tol = 1e-9);

}  // namespace levyclt
