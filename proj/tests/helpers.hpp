#pragma once

#include <random>
#include <vector>

#include "market/game.hpp"

namespace testutil {

inline double urand(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Two users, two providers, trivial user features; both providers observe the
// same binary garbled feature z with random Pr(z|y). Utilities left empty.
inline market::GameInstance shared_feature_skeleton(std::mt19937_64& rng, int Y, int A, int M) {
    market::GameInstance g;
    for (int y = 0; y < Y; ++y) g.states.push_back("y" + std::to_string(y));
    g.user_features = {{"x"}, {"x"}};
    g.provider_features = {{"z0", "z1"}, {"z0", "z1"}};
    g.prior.assign(static_cast<std::size_t>(Y) * 2 * 2, 0.0);
    for (int y = 0; y < Y; ++y) {
        double pz1 = 0.1 + 0.8 * urand(rng);
        g.prior[g.prior_index(y, {0, 0}, {0, 0})] = (1.0 - pz1) / Y;
        g.prior[g.prior_index(y, {0, 0}, {1, 1})] = pz1 / Y;
    }
    std::vector<std::string> acts;
    for (int a = 0; a < A; ++a) acts.push_back("a" + std::to_string(a));
    g.action_sets = {acts, acts};
    for (int m = 0; m < M; ++m) g.messages.push_back("m" + std::to_string(m));
    g.rounds = 1;
    g.user_utils.assign(2, std::vector<std::vector<double>>(A, std::vector<double>(Y, 0.0)));
    g.provider_utils.assign(2, std::vector<double>(static_cast<std::size_t>(A) * A * Y, 0.0));
    g.provider_utils_sep.assign(2, std::nullopt);
    return g;
}

// Exact weak alignment: random components F[j][i], weights in [0.5, 1.5].
inline market::GameInstance random_exact_weak_instance(std::mt19937_64& rng, int Y, int A,
                                                       int M) {
    market::GameInstance g = shared_feature_skeleton(rng, Y, A, M);
    std::vector<std::vector<std::vector<std::vector<double>>>> F(
        2, std::vector<std::vector<std::vector<double>>>(
               2, std::vector<std::vector<double>>(A, std::vector<double>(Y))));
    double lam[2][2], w[2][2];
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
            lam[j][i] = 0.5 + urand(rng);
            w[j][i] = 0.5 + urand(rng);
            for (int a = 0; a < A; ++a)
                for (int y = 0; y < Y; ++y) F[j][i][a][y] = urand(rng);
        }
    // divide by the weight sums so every utility stays inside [0, 1]; exact
    // alignment survives the per-table rescale
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < A; ++a)
            for (int y = 0; y < Y; ++y)
                g.user_utils[i][a][y] =
                    (w[0][i] * F[0][i][a][y] + w[1][i] * F[1][i][a][y]) / (w[0][i] + w[1][i]);
    std::vector<int> acts(2);
    for (acts[0] = 0; acts[0] < A; ++acts[0])
        for (acts[1] = 0; acts[1] < A; ++acts[1])
            for (int y = 0; y < Y; ++y)
                for (int j = 0; j < 2; ++j)
                    g.provider_utils[j][g.joint_index(acts, y)] =
                        (lam[j][0] * F[j][0][acts[0]][y] + lam[j][1] * F[j][1][acts[1]][y]) /
                        (lam[j][0] + lam[j][1]);
    g.validate();
    return g;
}

// Exact strong alignment: u^P_j = sum_i lambda_{j,i} u^U_i, lambda in [0.5, 1.5].
inline market::GameInstance random_exact_strong_instance(std::mt19937_64& rng, int Y, int A,
                                                         int M) {
    market::GameInstance g = shared_feature_skeleton(rng, Y, A, M);
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < A; ++a)
            for (int y = 0; y < Y; ++y) g.user_utils[i][a][y] = urand(rng);
    double lam[2][2];
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) lam[j][i] = 0.5 + urand(rng);
    std::vector<int> acts(2);
    for (acts[0] = 0; acts[0] < A; ++acts[0])
        for (acts[1] = 0; acts[1] < A; ++acts[1])
            for (int y = 0; y < Y; ++y)
                for (int j = 0; j < 2; ++j)
                    g.provider_utils[j][g.joint_index(acts, y)] =
                        (lam[j][0] * g.user_utils[0][acts[0]][y] +
                         lam[j][1] * g.user_utils[1][acts[1]][y]) /
                        (lam[j][0] + lam[j][1]);
    g.validate();
    return g;
}

// Fully random utilities (no alignment structure).
inline market::GameInstance random_instance(std::mt19937_64& rng, int Y, int A, int M) {
    market::GameInstance g = shared_feature_skeleton(rng, Y, A, M);
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < A; ++a)
            for (int y = 0; y < Y; ++y) g.user_utils[i][a][y] = urand(rng);
    for (int j = 0; j < 2; ++j)
        for (double& v : g.provider_utils[j]) v = urand(rng);
    g.validate();
    return g;
}

}  // namespace testutil
