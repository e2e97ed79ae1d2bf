#include "market/linprog.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

namespace market {

namespace {

constexpr double kTol = 1e-9;

// Tableau rows: m constraint rows + 1 objective row (reduced costs, negated
// objective value in the last column). Basis tracks the basic column of each
// row. Bland's rule prevents cycling.
struct Tableau {
    std::vector<std::vector<double>> t;  // (m+1) x (ncols+1)
    std::vector<int> basis;
    int m, n;

    void pivot(int row, int col) {
        double p = t[row][col];
        for (double& v : t[row]) v /= p;
        for (int r = 0; r <= m; ++r) {
            if (r == row) continue;
            double f = t[r][col];
            if (f == 0.0) continue;
            for (int cidx = 0; cidx <= n; ++cidx) t[r][cidx] -= f * t[row][cidx];
        }
        basis[row] = col;
    }

    // Returns false if unbounded.
    bool run() {
        while (true) {
            int col = -1;
            for (int c = 0; c < n; ++c)
                if (t[m][c] < -kTol) {
                    col = c;
                    break;
                }
            if (col < 0) return true;
            int row = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m; ++r) {
                if (t[r][col] <= kTol) continue;
                double ratio = t[r][n] / t[r][col];
                if (ratio < best - kTol ||
                    (ratio < best + kTol && (row < 0 || basis[r] < basis[row]))) {
                    best = ratio;
                    row = r;
                }
            }
            if (row < 0) return false;
            pivot(row, col);
        }
    }
};

}  // namespace

LpResult solve_lp_equality(const std::vector<std::vector<double>>& A,
                           const std::vector<double>& b, const std::vector<double>& c) {
    int m = static_cast<int>(A.size());
    int n = static_cast<int>(c.size());

    // Phase 1 tableau: columns [x (n), artificials (m)].
    Tableau tab;
    tab.m = m;
    tab.n = n + m;
    tab.t.assign(m + 1, std::vector<double>(tab.n + 1, 0.0));
    tab.basis.resize(m);
    for (int r = 0; r < m; ++r) {
        double sign = b[r] < 0.0 ? -1.0 : 1.0;
        for (int cidx = 0; cidx < n; ++cidx) tab.t[r][cidx] = sign * A[r][cidx];
        tab.t[r][n + r] = 1.0;
        tab.t[r][tab.n] = sign * b[r];
        tab.basis[r] = n + r;
    }
    // Objective: sum of artificials; express in terms of nonbasic columns.
    for (int r = 0; r < m; ++r)
        for (int cidx = 0; cidx <= tab.n; ++cidx)
            if (cidx < n || cidx == tab.n) tab.t[m][cidx] -= tab.t[r][cidx];

    LpResult result;
    if (!tab.run()) return result;
    if (-tab.t[m][tab.n] > 1e-7) return result;  // infeasible

    // Drive remaining artificials out of the basis.
    for (int r = 0; r < m; ++r) {
        if (tab.basis[r] < n) continue;
        int col = -1;
        for (int cidx = 0; cidx < n; ++cidx)
            if (std::abs(tab.t[r][cidx]) > kTol) {
                col = cidx;
                break;
            }
        if (col >= 0) tab.pivot(r, col);
        // Otherwise the row is redundant; the artificial stays basic at zero.
    }

    // Phase 2: replace the objective row, forbid artificial columns.
    for (int cidx = 0; cidx <= tab.n; ++cidx) tab.t[m][cidx] = 0.0;
    for (int cidx = 0; cidx < n; ++cidx) tab.t[m][cidx] = c[cidx];
    for (int r = 0; r < m; ++r) {
        if (tab.basis[r] >= n) continue;
        double f = tab.t[m][tab.basis[r]];
        if (f == 0.0) continue;
        for (int cidx = 0; cidx <= tab.n; ++cidx) tab.t[m][cidx] -= f * tab.t[r][cidx];
    }
    // Zero out artificial columns so they are never re-entered.
    for (int r = 0; r <= m; ++r)
        for (int cidx = n; cidx < tab.n; ++cidx)
            if (r == m || tab.basis[r] != cidx) tab.t[r][cidx] = 0.0;
    for (int cidx = n; cidx < tab.n; ++cidx) tab.t[m][cidx] = 1.0;  // positive reduced cost

    if (!tab.run()) return result;  // unbounded

    result.feasible = true;
    result.x.assign(n, 0.0);
    for (int r = 0; r < m; ++r)
        if (tab.basis[r] < n) result.x[tab.basis[r]] = tab.t[r][tab.n];
    result.objective = 0.0;
    for (int cidx = 0; cidx < n; ++cidx) result.objective += c[cidx] * result.x[cidx];
    return result;
}

}  // namespace market
