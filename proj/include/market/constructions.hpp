#pragma once

#include "market/equilibrium.hpp"
#include "market/game.hpp"

namespace market {

// Two providers, two users, uniform state on {1..M} observed by both
// providers, actions {1..M, abstain}. Each provider is paid for matching by
// one user and for abstention by the other.
GameInstance make_public_example(double eps, double c, int M, int D);

// Two users/two providers, two states; provider utilities are exactly weakly
// aligned but no strong certificate achieves a residual below 1/2.
GameInstance make_strict_separation();

// One provider, two users; the provider prefers keeping user 2 uninformed,
// which drags user 1 below her benchmark.
GameInstance make_public_adding_users();

struct AugmentedGameSpec {
    std::vector<std::string> actions;               // new user's action labels
    std::vector<std::vector<double>> utility;       // u^U_{n+1}[a][y]
    std::vector<std::string> features;              // new user's feature labels
    std::vector<double> feature_dist;               // independent marginal
    std::vector<double> betas;                      // beta_j in (0,1), per provider
    std::vector<std::vector<double>> perturbation;  // f[a][y] in [0,1]
};

// Appends a user; provider utilities become
// (1-beta_j) * u^P_j(a_1..n, y) + beta_j * f(a_{n+1}, y).
GameInstance augment(const GameInstance& base, const AugmentedGameSpec& spec);

// The user's first message selects a branch i in {0..n-1}; later provider
// turns reveal the garbling label optimally for user i. Earlier provider
// turns send message 0.
ProviderRule make_identity_elicitation_rule(const GameInstance& g, int provider,
                                            const GarblingSpec& garbling,
                                            std::uint64_t cap = 10'000'000);

// Deterministic rule emitting x^P_j verbatim at the first provider turn,
// message 0 on any later provider turn.
ProviderRule make_full_revelation_rule(const GameInstance& g, int provider);

}  // namespace market
