#include "market/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace market {

namespace {

std::vector<std::string> numbered(const std::string& stem, int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
    return out;
}

}  // namespace

GameInstance make_public_example(double eps, double c, int M, int D) {
    if (!(eps > 0.0) || !(eps < c) || !(c <= 1.0))
        throw ParameterViolation("need 0 < eps < c <= 1");
    if (!(static_cast<double>(M) > c / eps)) throw ParameterViolation("need M > c / eps");
    if (D <= 1) throw ParameterViolation("need D > 1");

    GameInstance g;
    g.states = numbered("y", M);
    g.user_features = {{"x"}, {"x"}};
    g.provider_features = {g.states, g.states};
    g.prior.assign(static_cast<std::size_t>(M) * M * M, 0.0);
    for (int y = 0; y < M; ++y) g.prior[g.prior_index(y, {0, 0}, {y, y})] = 1.0 / M;

    std::vector<std::string> actions = numbered("a", M);
    actions.push_back("abstain");
    int bot = M;
    g.action_sets = {actions, actions};
    g.user_utils.assign(2, std::vector<std::vector<double>>(
                               M + 1, std::vector<double>(M, 0.0)));
    for (int i = 0; i < 2; ++i)
        for (int y = 0; y < M; ++y) {
            g.user_utils[i][y][y] = c;
            g.user_utils[i][bot][y] = eps;
        }

    double match = 1.0 / (D + 1.0);
    double absent = static_cast<double>(D) / (D + 1.0);
    g.provider_utils.assign(2, std::vector<double>(g.joint_size(), 0.0));
    g.provider_utils_sep.assign(2, std::nullopt);
    std::vector<int> a(2);
    for (a[0] = 0; a[0] <= M; ++a[0])
        for (a[1] = 0; a[1] <= M; ++a[1])
            for (int y = 0; y < M; ++y) {
                std::size_t idx = g.joint_index(a, y);
                g.provider_utils[0][idx] =
                    match * (a[0] == y) + absent * (a[1] == bot);
                g.provider_utils[1][idx] =
                    match * (a[1] == y) + absent * (a[0] == bot);
            }
    g.messages = numbered("m", M);
    g.rounds = 1;
    g.validate();
    return g;
}

GameInstance make_strict_separation() {
    GameInstance g;
    g.states = {"e1", "e2"};  // (1,0) and (0,1)
    g.user_features = {{"x"}, {"x"}};
    g.provider_features = {{"x"}, {"x"}};
    g.prior = {0.5, 0.5};
    g.action_sets = {{"a0", "a1"}, {"a0", "a1"}};
    // u^U_i(a, y) = a_i * (y_1 + y_2) / 4 = a_i / 4.
    g.user_utils.assign(2, {{0.0, 0.0}, {0.25, 0.25}});
    // F_{1,i} = a_i y_1 / 2, F_{2,i} = a_i y_2 / 2, u^P_j = F_{j,1} + F_{j,2}.
    g.provider_utils.assign(2, std::vector<double>(g.joint_size(), 0.0));
    g.provider_utils_sep.assign(2, std::nullopt);
    std::vector<int> a(2);
    for (a[0] = 0; a[0] < 2; ++a[0])
        for (a[1] = 0; a[1] < 2; ++a[1])
            for (int y = 0; y < 2; ++y) {
                double y1 = y == 0 ? 1.0 : 0.0;
                g.provider_utils[0][g.joint_index(a, y)] = (a[0] + a[1]) * y1 / 2.0;
                g.provider_utils[1][g.joint_index(a, y)] = (a[0] + a[1]) * (1.0 - y1) / 2.0;
            }
    g.messages = {"m0"};
    g.rounds = 1;
    g.validate();
    return g;
}

GameInstance make_public_adding_users() {
    GameInstance g;
    g.states = {"y0", "y1"};
    g.user_features = {{"x"}, {"x"}};
    g.provider_features = {g.states};
    g.prior.assign(4, 0.0);
    for (int y = 0; y < 2; ++y) g.prior[g.prior_index(y, {0, 0}, {y})] = 0.5;
    g.action_sets = {{"y0", "y1", "abstain"}, {"y0", "y1", "abstain"}};
    g.user_utils.assign(2, std::vector<std::vector<double>>(3, std::vector<double>(2, 0.0)));
    for (int i = 0; i < 2; ++i)
        for (int y = 0; y < 2; ++y) {
            g.user_utils[i][y][y] = 1.0;
            g.user_utils[i][2][y] = 2.0 / 3.0;
        }
    g.provider_utils.assign(1, std::vector<double>(g.joint_size(), 0.0));
    g.provider_utils_sep.assign(1, std::nullopt);
    std::vector<int> a(2);
    for (a[0] = 0; a[0] < 3; ++a[0])
        for (a[1] = 0; a[1] < 3; ++a[1])
            for (int y = 0; y < 2; ++y)
                g.provider_utils[0][g.joint_index(a, y)] =
                    0.25 * (a[0] == y) + (a[0] == 2) / 6.0 + 0.5 * (a[1] == 2);
    g.messages = {"m0", "m1"};
    g.rounds = 1;
    g.validate();
    return g;
}

GameInstance augment(const GameInstance& base, const AugmentedGameSpec& spec) {
    base.validate();
    int Y = base.num_states();
    int n = base.num_users();
    int k = base.num_providers();
    if (spec.actions.empty()) throw EmptyActionSet("augmented user needs actions");
    if (spec.utility.size() != spec.actions.size() ||
        spec.perturbation.size() != spec.actions.size())
        throw DimensionMismatch("utility/perturbation must have one row per action");
    for (const auto& row : spec.utility)
        if (static_cast<int>(row.size()) != Y) throw DimensionMismatch("utility columns != |Y|");
    for (const auto& row : spec.perturbation) {
        if (static_cast<int>(row.size()) != Y)
            throw DimensionMismatch("perturbation columns != |Y|");
        for (double v : row)
            if (!(v >= 0.0 && v <= 1.0)) throw ParameterViolation("f must lie in [0, 1]");
    }
    if (static_cast<int>(spec.betas.size()) != k)
        throw DimensionMismatch("one beta per provider required");
    for (double b : spec.betas)
        if (!(b > 0.0 && b < 1.0)) throw ParameterViolation("beta must lie in (0, 1)");
    if (spec.features.empty() || spec.feature_dist.size() != spec.features.size())
        throw DimensionMismatch("feature distribution size mismatch");
    double mass = 0.0;
    for (double p : spec.feature_dist) {
        if (!(p >= 0.0)) throw ParameterViolation("feature distribution must be nonnegative");
        mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-9)
        throw ParameterViolation("feature distribution must sum to 1");

    GameInstance g;
    g.states = base.states;
    g.user_features = base.user_features;
    g.user_features.push_back(spec.features);
    g.provider_features = base.provider_features;
    g.messages = base.messages;
    g.rounds = base.rounds;
    g.action_sets = base.action_sets;
    g.action_sets.push_back(spec.actions);
    g.user_utils = base.user_utils;
    g.user_utils.push_back(spec.utility);
    g.action_order = base.action_order;
    if (!g.action_order.empty()) g.action_order.push_back({});
    g.provider_order = base.provider_order;

    // Insert the new user's independent feature after the base users'.
    std::vector<int> base_dims = base.prior_dims();
    g.prior.assign(base.prior.size() * spec.features.size(), 0.0);
    std::size_t bidx = 0;
    detail::for_each_tuple(base_dims, [&](const std::vector<int>& t) {
        double p = base.prior[bidx++];
        if (p == 0.0) return;
        std::vector<int> xu(t.begin() + 1, t.begin() + 1 + n);
        std::vector<int> xp(t.begin() + 1 + n, t.begin() + 1 + n + k);
        for (std::size_t xnew = 0; xnew < spec.features.size(); ++xnew) {
            std::vector<int> xu2 = xu;
            xu2.push_back(static_cast<int>(xnew));
            g.prior[g.prior_index(t[0], xu2, xp)] += p * spec.feature_dist[xnew];
        }
    });

    g.provider_utils.assign(k, std::vector<double>(g.joint_size(), 0.0));
    g.provider_utils_sep.assign(k, std::nullopt);
    std::vector<int> dims;
    for (const auto& acts : g.action_sets) dims.push_back(static_cast<int>(acts.size()));
    detail::for_each_tuple(dims, [&](const std::vector<int>& a) {
        std::vector<int> abase(a.begin(), a.begin() + n);
        for (int y = 0; y < Y; ++y) {
            std::size_t idx = g.joint_index(a, y);
            for (int j = 0; j < k; ++j)
                g.provider_utils[j][idx] =
                    (1.0 - spec.betas[j]) * base.provider_util(j, abase, y) +
                    spec.betas[j] * spec.perturbation[a[n]][y];
        }
    });
    g.validate();
    return g;
}

ProviderRule make_identity_elicitation_rule(const GameInstance& g, int provider,
                                            const GarblingSpec& garbling, std::uint64_t cap) {
    if (g.rounds < 2) throw NotApplicable("identity elicitation needs at least two rounds");
    int n = g.num_users();
    int M = g.num_messages();
    if (M < n) throw MessageSpaceTooSmall("identity elicitation needs |M| >= n");
    auto it = std::find(garbling.providers.begin(), garbling.providers.end(), provider);
    if (it == garbling.providers.end())
        throw ParameterViolation("provider not covered by the garbling");
    std::size_t t = it - garbling.providers.begin();
    int Z = garbling.num_labels();
    std::size_t np = g.provider_features[provider].size();

    // First user turn; there is always a later provider turn when R >= 2.
    int first_user_turn = g.provider_speaks(1) ? 2 : 1;
    std::vector<int> reveal_turns;
    for (int r = first_user_turn + 1; r <= g.rounds; ++r)
        if (g.provider_speaks(r)) reveal_turns.push_back(r);
    int cnt = static_cast<int>(reveal_turns.size());
    std::uint64_t signals = detail::checked_pow(M, cnt, cap);

    bool f_deterministic = true;
    std::vector<int> zmap(np, 0);
    for (std::size_t xp = 0; xp < np; ++xp) {
        int hit = -1;
        for (int z = 0; z < Z; ++z) {
            double v = garbling.maps[t][xp][z];
            if (v > 0.0 && v < 1.0) f_deterministic = false;
            if (v == 1.0) hit = z;
        }
        zmap[xp] = hit;
    }
    if (!f_deterministic && cnt > 1)
        throw NotApplicable(
            "randomized garbling maps need a single revealing provider turn");

    // Per-branch deterministic map z -> signal, optimal for that user.
    std::vector<std::vector<int>> branch_map(n, std::vector<int>(Z));
    if (signals >= static_cast<std::uint64_t>(Z)) {
        for (int b = 0; b < n; ++b)
            for (int z = 0; z < Z; ++z) branch_map[b][z] = z;
    } else {
        detail::checked_pow(signals, Z, cap);
        for (int b = 0; b < n; ++b) {
            std::vector<double> um = g.user_marginal(b);
            std::size_t nu = g.user_features[b].size();
            int A = static_cast<int>(g.action_sets[b].size());
            double best_total = -1.0;
            std::vector<int> map(Z, 0);
            while (true) {
                double total = 0.0;
                for (std::size_t xu = 0; xu < nu; ++xu)
                    for (std::uint64_t s = 0; s < signals; ++s) {
                        double best_a = -std::numeric_limits<double>::infinity();
                        bool any = false;
                        for (int aa = 0; aa < A; ++aa) {
                            double v = 0.0;
                            for (int z = 0; z < Z; ++z) {
                                if (map[z] != static_cast<int>(s)) continue;
                                for (int y = 0; y < g.num_states(); ++y)
                                    v += um[static_cast<std::size_t>(y) * nu + xu] *
                                         garbling.conditional[y][z] * g.user_utils[b][aa][y];
                                any = true;
                            }
                            best_a = std::max(best_a, v);
                        }
                        if (any) total += best_a;
                    }
                if (total > best_total) {
                    best_total = total;
                    branch_map[b] = map;
                }
                int pos = Z - 1;
                while (pos >= 0) {
                    if (++map[pos] < static_cast<int>(signals)) break;
                    map[pos] = 0;
                    --pos;
                }
                if (pos < 0) break;
            }
        }
    }

    ProviderRule rule;
    rule.deterministic = f_deterministic;
    for (int r = 1; r <= g.rounds; ++r) {
        if (!g.provider_speaks(r)) continue;
        std::vector<int> dims(r - 1, M);
        bool before_branch = r < first_user_turn;
        int pos = -1;
        if (!before_branch)
            pos = static_cast<int>(std::find(reveal_turns.begin(), reveal_turns.end(), r) -
                                   reveal_turns.begin());
        detail::for_each_tuple(dims, [&](const std::vector<int>& prefix) {
            for (std::size_t xp = 0; xp < np; ++xp) {
                Dist d(M, 0.0);
                if (before_branch) {
                    d[0] = 1.0;
                } else {
                    int branch = std::min(prefix[first_user_turn - 1], n - 1);
                    std::uint64_t shift = 1;
                    for (int q = pos + 1; q < cnt; ++q) shift *= M;
                    if (f_deterministic) {
                        int s = branch_map[branch][zmap[xp]];
                        d[(s / shift) % M] = 1.0;
                    } else {
                        for (int z = 0; z < Z; ++z)
                            d[(branch_map[branch][z] / shift) % M] +=
                                garbling.maps[t][xp][z];
                    }
                }
                rule.set_row(static_cast<int>(xp), prefix, std::move(d));
            }
        });
    }
    return rule;
}

ProviderRule make_full_revelation_rule(const GameInstance& g, int provider) {
    std::size_t np = g.provider_features[provider].size();
    int M = g.num_messages();
    if (static_cast<std::size_t>(M) < np)
        throw MessageSpaceTooSmall("revelation needs |M| >= |X_P|");
    ProviderRule rule;
    rule.deterministic = true;
    bool first = true;
    for (int r = 1; r <= g.rounds; ++r) {
        if (!g.provider_speaks(r)) continue;
        std::vector<int> dims(r - 1, M);
        bool emit = first;
        first = false;
        detail::for_each_tuple(dims, [&](const std::vector<int>& prefix) {
            for (std::size_t xp = 0; xp < np; ++xp) {
                Dist d(M, 0.0);
                d[emit ? static_cast<int>(xp) : 0] = 1.0;
                rule.set_row(static_cast<int>(xp), prefix, std::move(d));
            }
        });
    }
    return rule;
}

}  // namespace market
