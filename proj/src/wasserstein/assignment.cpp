#include "levyclt/wasserstein/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace levyclt {

namespace {

constexpr double kBig = std::numeric_limits<double>::max();

}  // namespace

AssignmentResult solve_assignment(const std::vector<double>& cost, std::size_t n, double certificate_tol) {
    if (n == 0) throw std::invalid_argument("solve_assignment: empty problem");
    if (n > kMaxAssignmentSize) throw std::invalid_argument("solve_assignment: size exceeds the cap of 4096");
    if (cost.size() != n * n) throw std::invalid_argument("solve_assignment: cost matrix must be n x n");
    for (double c : cost)
        if (!std::isfinite(c)) throw std::invalid_argument("solve_assignment: non-finite cost");
    const int N = static_cast<int>(n);
    auto c = [&](int i, int j) { return cost[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)]; };

    std::vector<int> rowsol(n, -1), colsol(n, -1), matches(n, 0), freeq(n), collist(n), pred(n);
    std::vector<double> v(n), d(n);

    // column reduction
    for (int j = N - 1; j >= 0; --j) {
        double mn = c(0, j);
        int imin = 0;
        for (int i = 1; i < N; ++i)
            if (c(i, j) < mn) {
                mn = c(i, j);
                imin = i;
            }
        v[j] = mn;
        if (++matches[imin] == 1) {
            rowsol[imin] = j;
            colsol[j] = imin;
        } else if (v[j] < v[rowsol[imin]]) {
            const int j1 = rowsol[imin];
            rowsol[imin] = j;
            colsol[j] = imin;
            colsol[j1] = -1;
        } else {
            colsol[j] = -1;
        }
    }

    // reduction transfer
    int numfree = 0;
    for (int i = 0; i < N; ++i) {
        if (matches[i] == 0) {
            freeq[numfree++] = i;
        } else if (matches[i] == 1) {
            const int j1 = rowsol[i];
            double mn = kBig;
            for (int j = 0; j < N; ++j)
                if (j != j1) mn = std::min(mn, c(i, j) - v[j]);
            if (mn < kBig) v[j1] -= mn;
        }
    }
    // rows that lost their column during reduction are free as well
    for (int i = 0; i < N; ++i)
        if (matches[i] > 1 && colsol[rowsol[i]] != i) {
            rowsol[i] = -1;
            freeq[numfree++] = i;
        }

    // augmenting row reduction, two passes; a step cap guards against slow float cycling
    const long step_cap = 64L * N;
    for (int loop = 0; loop < 2 && N > 1; ++loop) {
        int k = 0;
        const int prvnumfree = numfree;
        numfree = 0;
        long steps = 0;
        while (k < prvnumfree) {
            const int i = freeq[k++];
            double umin = c(i, 0) - v[0], usubmin = kBig;
            int j1 = 0, j2 = 0;
            for (int j = 1; j < N; ++j) {
                const double h = c(i, j) - v[j];
                if (h < usubmin) {
                    if (h >= umin) {
                        usubmin = h;
                        j2 = j;
                    } else {
                        usubmin = umin;
                        umin = h;
                        j2 = j1;
                        j1 = j;
                    }
                }
            }
            int i0 = colsol[j1];
            const bool strict = umin < usubmin;
            if (strict) {
                v[j1] -= usubmin - umin;
            } else if (i0 > -1) {
                j1 = j2;
                i0 = colsol[j2];
            }
            rowsol[i] = j1;
            colsol[j1] = i;
            if (i0 > -1) {
                rowsol[i0] = -1;
                if (strict && ++steps < step_cap)
                    freeq[--k] = i0;
                else
                    freeq[numfree++] = i0;
            }
        }
    }

    // augmentation by shortest paths (Dijkstra-like on reduced costs)
    for (int f = 0; f < numfree; ++f) {
        const int freerow = freeq[f];
        for (int j = 0; j < N; ++j) {
            d[j] = c(freerow, j) - v[j];
            pred[j] = freerow;
            collist[j] = j;
        }
        int low = 0, up = 0, last = 0, endofpath = -1;
        double mn = 0.0;
        bool found = false;
        do {
            if (up == low) {
                last = low - 1;
                mn = d[collist[up++]];
                for (int k = up; k < N; ++k) {
                    const int j = collist[k];
                    const double h = d[j];
                    if (h <= mn) {
                        if (h < mn) {
                            up = low;
                            mn = h;
                        }
                        collist[k] = collist[up];
                        collist[up++] = j;
                    }
                }
                for (int k = low; k < up; ++k)
                    if (colsol[collist[k]] < 0) {
                        endofpath = collist[k];
                        found = true;
                        break;
                    }
            }
            if (!found) {
                const int j1 = collist[low++];
                const int i = colsol[j1];
                const double h = c(i, j1) - v[j1] - mn;
                for (int k = up; k < N; ++k) {
                    const int j = collist[k];
                    const double v2 = c(i, j) - v[j] - h;
                    if (v2 < d[j]) {
                        pred[j] = i;
                        if (v2 == mn) {
                            if (colsol[j] < 0) {
                                endofpath = j;
                                found = true;
                                break;
                            }
                            collist[k] = collist[up];
                            collist[up++] = j;
                        }
                        d[j] = v2;
                    }
                }
            }
        } while (!found);
        for (int k = 0; k <= last; ++k) {
            const int j1 = collist[k];
            v[j1] += d[j1] - mn;
        }
        int i;
        do {
            i = pred[endofpath];
            colsol[endofpath] = i;
            const int j1 = endofpath;
            endofpath = rowsol[i];
            rowsol[i] = j1;
        } while (i != freerow);
    }

    AssignmentResult res;
    res.row_to_col = rowsol;
    res.v = v;
    res.u.resize(n);
    double scale = 0.0;
    for (double x : cost) scale = std::max(scale, std::abs(x));
    scale = std::max(scale, 1e-300);
    std::vector<char> used(n, 0);
    bool perm = true;
    for (int i = 0; i < N; ++i) {
        const int j = rowsol[i];
        if (j < 0 || used[j]) {
            perm = false;
            break;
        }
        used[j] = 1;
        res.u[i] = c(i, j) - v[j];
        res.cost += c(i, j);
    }
    if (!perm) throw std::logic_error("solve_assignment: solver produced no perfect matching");
    double viol = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) viol = std::max(viol, res.u[i] + v[j] - c(i, j));
    res.max_violation = viol / scale;
    res.certified = res.max_violation <= certificate_tol;
    return res;
}

}  // namespace levyclt
