#pragma once

#include <Eigen/Dense>
#include <vector>

#include "market/errors.hpp"

namespace market {

struct NnlsOptions {
    bool fit_intercept = true;
    // Per-column nonnegativity mask; empty means every weight is constrained.
    std::vector<bool> nonneg;
    int max_outer = 0;  // 0: 3 * columns
    double tol = 1e-10;
};

struct NnlsResult {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    double objective = 0.0;      // 0.5 * ||A w + c - b||^2
    double kkt_violation = 0.0;  // max stationarity/complementarity violation of the gradient
    bool degenerate = false;     // rank-deficient passive set encountered
    int iterations = 0;
};

// min_w 0.5 * ||A w + c 1 - b||^2 with w_j >= 0 on masked columns and a free
// intercept c (handled by centering). Lawson-Hanson active set.
NnlsResult solve_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                      const NnlsOptions& opts = {});

}  // namespace market
