#pragma once

#include <vector>

namespace market {

struct LpResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> x;
};

// min c'x s.t. Ax = b, x >= 0. Dense two-phase simplex with Bland's rule.
// A is row-major, rows x cols.
LpResult solve_lp_equality(const std::vector<std::vector<double>>& A,
                           const std::vector<double>& b, const std::vector<double>& c);

}  // namespace market
