#pragma once

#include <utility>
#include <vector>

#include "market/game.hpp"

namespace market {

// Certificate for approximately separable provider utilities whose per-user
// components span each user's utility nonnegatively.
struct WeakAlignmentCert {
    std::vector<int> providers;  // T, instance provider indices
    // components[t][i][a][y] for the t-th provider in T
    std::vector<std::vector<std::vector<std::vector<double>>>> components;
    std::vector<std::vector<double>> provider_weights;  // lambda[t][i]
    std::vector<double> provider_intercepts;            // c_j per t
    std::vector<std::vector<double>> user_weights;      // w[t][i]
    std::vector<double> user_intercepts;                // c_i per user
    double eps_provider = 0.0;
    double eps_user = 0.0;

    void validate(const GameInstance& g) const;  // nonnegativity, coverage, w>0 => lambda>0
};

// Certificate writing provider utilities as nonnegative combinations of user
// utilities.
struct StrongAlignmentCert {
    std::vector<int> providers;                 // T
    std::vector<std::vector<double>> weights;   // lambda[t][i]
    std::vector<double> intercepts;             // c_j per t
    double eps = 0.0;

    void validate(const GameInstance& g) const;  // nonnegativity, coverage
};

// Achieved worst-case residuals (eps_P, eps_U) of a weak certificate by exact
// enumeration of action profiles and states.
std::pair<double, double> check_weak(const GameInstance& g, const WeakAlignmentCert& cert,
                                     std::uint64_t cap = 10'000'000);

double check_strong(const GameInstance& g, const StrongAlignmentCert& cert,
                    std::uint64_t cap = 10'000'000);

// Chebyshev (minimax) fit of one provider's utility as a nonnegative
// combination of the given users' utilities plus a free intercept; solved as
// a linear program.
StrongAlignmentCert fit_strong_exact(const GameInstance& g, int provider,
                                     const std::vector<int>& user_subset,
                                     std::uint64_t cap = 10'000'000);

// F := u^U, uniform user weights over covering providers; yields residuals
// (eps, 0).
WeakAlignmentCert strong_implies_weak(const GameInstance& g, const StrongAlignmentCert& cert);

}  // namespace market
