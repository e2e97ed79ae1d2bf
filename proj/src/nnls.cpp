#include "market/nnls.hpp"

#include <algorithm>
#include <cmath>

namespace market {

namespace {

// Least squares restricted to the passive columns. Sets degenerate when the
// restricted design loses rank.
Eigen::VectorXd restricted_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                 const std::vector<int>& passive, bool& degenerate) {
    Eigen::MatrixXd Ap(A.rows(), passive.size());
    for (std::size_t c = 0; c < passive.size(); ++c) Ap.col(c) = A.col(passive[c]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Ap);
    if (qr.rank() < static_cast<Eigen::Index>(passive.size())) degenerate = true;
    return qr.solve(b);
}

}  // namespace

NnlsResult solve_nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                      const NnlsOptions& opts) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if (b.size() != m) throw DimensionMismatch("nnls: rows of A and b differ");
    if (!A.allFinite() || !b.allFinite()) throw NonFiniteInput("nnls: non-finite input");
    std::vector<bool> nonneg = opts.nonneg;
    if (nonneg.empty()) nonneg.assign(n, true);
    if (static_cast<Eigen::Index>(nonneg.size()) != n)
        throw DimensionMismatch("nnls: mask size mismatch");

    Eigen::MatrixXd Ac = A;
    Eigen::VectorXd bc = b;
    Eigen::RowVectorXd col_mean = Eigen::RowVectorXd::Zero(n);
    double b_mean = 0.0;
    if (opts.fit_intercept && m > 0) {
        col_mean = A.colwise().mean();
        b_mean = b.mean();
        Ac.rowwise() -= col_mean;
        bc.array() -= b_mean;
    }

    NnlsResult result;
    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Ac);
        result.degenerate = qr.rank() < std::min(m, n);
    }
    result.weights = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd& w = result.weights;

    std::vector<bool> in_passive(n, false);
    std::vector<int> passive;
    for (Eigen::Index j = 0; j < n; ++j)
        if (!nonneg[j]) {
            in_passive[j] = true;
            passive.push_back(static_cast<int>(j));
        }

    int max_outer = opts.max_outer > 0 ? opts.max_outer : 3 * std::max<int>(1, n);
    double scale = std::max(1.0, (Ac.transpose() * bc).cwiseAbs().maxCoeff());
    auto resolve_passive = [&]() {
        // Inner loop: keep the iterate feasible while the restricted solution
        // has nonpositive constrained coordinates.
        while (!passive.empty()) {
            Eigen::VectorXd z = restricted_solve(Ac, bc, passive, result.degenerate);
            double alpha = 1.0;
            int drop = -1;
            for (std::size_t c = 0; c < passive.size(); ++c) {
                int j = passive[c];
                if (!nonneg[j] || z[c] > opts.tol) continue;
                double step = w[j] / (w[j] - z[c]);
                if (step < alpha) {
                    alpha = step;
                    drop = j;
                }
            }
            if (drop < 0) {
                for (std::size_t c = 0; c < passive.size(); ++c) w[passive[c]] = z[c];
                return;
            }
            for (std::size_t c = 0; c < passive.size(); ++c)
                w[passive[c]] += alpha * (z[c] - w[passive[c]]);
            w[drop] = 0.0;
            in_passive[drop] = false;
            passive.erase(std::find(passive.begin(), passive.end(), drop));
        }
    };

    if (!passive.empty()) resolve_passive();
    for (int outer = 0; outer < max_outer; ++outer) {
        Eigen::VectorXd grad = Ac.transpose() * (Ac * w - bc);
        int enter = -1;
        double best = -opts.tol * scale;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!in_passive[j] && -grad[j] > -best) {
                best = grad[j];
                enter = static_cast<int>(j);
            }
        if (enter < 0) break;
        in_passive[enter] = true;
        passive.push_back(enter);
        resolve_passive();
        ++result.iterations;
    }

    result.intercept = opts.fit_intercept ? b_mean - col_mean * w : 0.0;
    Eigen::VectorXd resid = Ac * w - bc;
    result.objective = 0.5 * resid.squaredNorm();
    Eigen::VectorXd grad = Ac.transpose() * resid;
    double kkt = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!nonneg[j] || w[j] > 0.0)
            kkt = std::max(kkt, std::abs(grad[j]));
        else
            kkt = std::max(kkt, std::max(0.0, -grad[j]));
    }
    result.kkt_violation = kkt;
    return result;
}

}  // namespace market
