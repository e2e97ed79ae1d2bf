#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "market/errors.hpp"

namespace market {

using Dist = std::vector<double>;  // probability vector

// Provider utilities in separable form: sum_i weights[i] * F[i](a_i, y) + intercept.
struct SeparableProviderUtility {
    std::vector<std::vector<std::vector<double>>> components;  // F[i][a][y]
    std::vector<double> weights;                               // lambda_i
    double intercept = 0.0;
};

// Finite description of the conversation game. The prior is a dense joint
// table over (y, x^U_1..n, x^P_1..k) in row-major order, y slowest.
struct GameInstance {
    std::vector<std::string> states;
    std::vector<std::vector<std::string>> user_features;      // per user
    std::vector<std::vector<std::string>> provider_features;  // per provider
    std::vector<double> prior;
    std::vector<std::vector<std::string>> action_sets;             // per user
    std::vector<std::vector<std::vector<double>>> user_utils;      // [i][a][y]
    std::vector<std::vector<double>> provider_utils;               // [j][flat(a_1..a_n, y)], may be empty per j
    std::vector<std::optional<SeparableProviderUtility>> provider_utils_sep;
    std::vector<std::string> messages;
    int rounds = 1;
    // Tie-break orders: preference order of indices, most preferred first.
    // Empty means identity (lexicographic by index).
    std::vector<std::vector<int>> action_order;  // per user
    std::vector<int> provider_order;

    int num_states() const { return static_cast<int>(states.size()); }
    int num_users() const { return static_cast<int>(user_features.size()); }
    int num_providers() const { return static_cast<int>(provider_features.size()); }
    int num_messages() const { return static_cast<int>(messages.size()); }

    std::vector<int> prior_dims() const;
    std::size_t prior_index(int y, const std::vector<int>& xu, const std::vector<int>& xp) const;

    // Dense joint-action utility for provider j; expands the separable form
    // when no dense table is stored.
    double provider_util(int j, const std::vector<int>& actions, int y) const;

    // Joint flat index over (a_1..a_n, y), a_1 slowest.
    std::size_t joint_index(const std::vector<int>& actions, int y) const;
    std::size_t joint_size() const;

    // Marginals derived from the prior.
    std::vector<double> prior_state_marginal() const;
    // table[(y, xu, xp)] flattened with y slowest
    std::vector<double> triple_marginal(int user, int provider) const;
    std::vector<double> user_marginal(int user) const;  // [(y, xu)]

    // True when the speaker at 1-based round r is the provider. The provider
    // sends the final message, so R=1 is a single provider message and at
    // R=2 the user opens the conversation.
    bool provider_speaks(int round) const { return (rounds - round) % 2 == 0; }

    void validate(double tol = 1e-12) const;
};

// Tabular conversation rule for one provider: (feature, transcript prefix at a
// provider turn) -> distribution over messages.
struct ProviderRule {
    std::map<std::pair<int, std::vector<int>>, Dist> rows;
    bool deterministic = false;

    const Dist& row(int feature, const std::vector<int>& prefix) const;
    void set_row(int feature, std::vector<int> prefix, Dist probs);
};

// Tabular user strategy: conversation rows at user turns plus a decision table
// on full transcripts.
struct UserStrategy {
    std::map<std::pair<int, std::vector<int>>, Dist> talk;
    std::map<std::pair<int, std::vector<int>>, Dist> decide;

    const Dist& talk_row(int feature, const std::vector<int>& prefix) const;
    const Dist& decide_row(int feature, const std::vector<int>& transcript) const;
};

// Exact probability table over (a_i, y) (single user) or (a_1..a_n, y) (joint).
struct InducedDistribution {
    std::vector<double> table;       // row-major, y fastest
    std::vector<int> action_counts;  // one entry (single) or n entries (joint)
    int num_states = 0;

    double at(const std::vector<int>& actions, int y) const;
    std::vector<double> state_marginal() const;
    void validate(const std::vector<double>& prior_y, double tol = 1e-10) const;
};

struct AnonymousProfile {
    std::vector<ProviderRule> rules;  // one per provider
};
struct PersonalizedProfile {
    std::vector<std::vector<ProviderRule>> rules;  // [provider][user]
};

// Exact induced distribution over (a_i, y) of one conversation, summing over
// the prior and every randomization branch.
InducedDistribution simulate_interaction(const GameInstance& g, const ProviderRule& rule,
                                         int provider, const UserStrategy& strat, int user);

// argmax_a E_posterior[u_i(a, y)] with instance tie-breaking.
int best_response_decision(const GameInstance& g, int user, const Dist& posterior_over_y,
                           int feature);

// Exact optimal user strategy against a fixed provider rule (backward
// induction over the belief tree; deterministic, tie-broken by message order).
std::pair<UserStrategy, double> optimal_user_strategy(const GameInstance& g, int user,
                                                      const ProviderRule& rule, int provider);

double user_utility_against(const GameInstance& g, int user, const ProviderRule& rule,
                            int provider);

int select_provider(const GameInstance& g, int user, const std::vector<ProviderRule>& rules);

InducedDistribution induced_joint(const GameInstance& g, const AnonymousProfile& profile);
InducedDistribution induced_joint(const GameInstance& g, const PersonalizedProfile& profile);

// Expected provider utilities under an exact joint distribution.
std::vector<double> expected_provider_utilities(const GameInstance& g,
                                                const InducedDistribution& joint);
double expected_user_utility(const GameInstance& g, int user, const InducedDistribution& joint);

// Action kernel of a best-responding user: k[(xu, xp, a)] = P(a | xu, xp),
// flattened with xu slowest. Summed over conversation randomness.
std::vector<double> user_action_kernel(const GameInstance& g, int user, const ProviderRule& rule,
                                       int provider, const UserStrategy& strat);

// All deterministic rules for provider j (message choice for every
// (feature, provider-turn prefix) pair). Throws SearchSpaceTooLarge.
std::vector<ProviderRule> enumerate_deterministic_rules(const GameInstance& g, int provider,
                                                        std::uint64_t cap = 10'000'000);

// All deterministic user strategies for the enumeration oracle used in tests.
std::vector<UserStrategy> enumerate_deterministic_user_strategies(const GameInstance& g, int user,
                                                                  std::uint64_t cap = 10'000'000);

ProviderRule constant_rule(const GameInstance& g, int provider, int message);

namespace detail {
// Iterate all index tuples for the given dimensions; f(tuple).
void for_each_tuple(const std::vector<int>& dims,
                    const std::function<void(const std::vector<int>&)>& f);
std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap);
}  // namespace detail

}  // namespace market
