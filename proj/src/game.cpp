#include "market/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace market {

namespace detail {

void for_each_tuple(const std::vector<int>& dims,
                    const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> idx(dims.size(), 0);
    if (dims.empty()) {
        f(idx);
        return;
    }
    for (int d : dims)
        if (d <= 0) return;
    while (true) {
        f(idx);
        int pos = static_cast<int>(dims.size()) - 1;
        while (pos >= 0) {
            if (++idx[pos] < dims[pos]) break;
            idx[pos] = 0;
            --pos;
        }
        if (pos < 0) return;
    }
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (std::uint64_t e = 0; e < exp; ++e) {
        if (base != 0 && r > cap / base) throw SearchSpaceTooLarge(cap);
        r *= base;
        if (r > cap) throw SearchSpaceTooLarge(cap);
    }
    return r;
}

}  // namespace detail

namespace {

std::vector<int> identity_order(int n) {
    std::vector<int> o(n);
    std::iota(o.begin(), o.end(), 0);
    return o;
}

// argmax over values following a preference order; strict improvement wins.
int argmax_ordered(const std::vector<double>& values, const std::vector<int>& order) {
    int best = -1;
    double best_v = 0;
    const std::vector<int>& ord = order.empty() ? identity_order(static_cast<int>(values.size()))
                                                : order;
    for (int idx : ord) {
        if (best < 0 || values[idx] > best_v) {
            best = idx;
            best_v = values[idx];
        }
    }
    return best;
}

}  // namespace

std::vector<int> GameInstance::prior_dims() const {
    std::vector<int> dims;
    dims.push_back(num_states());
    for (const auto& f : user_features) dims.push_back(static_cast<int>(f.size()));
    for (const auto& f : provider_features) dims.push_back(static_cast<int>(f.size()));
    return dims;
}

std::size_t GameInstance::prior_index(int y, const std::vector<int>& xu,
                                      const std::vector<int>& xp) const {
    std::size_t idx = static_cast<std::size_t>(y);
    for (int i = 0; i < num_users(); ++i) idx = idx * user_features[i].size() + xu[i];
    for (int j = 0; j < num_providers(); ++j) idx = idx * provider_features[j].size() + xp[j];
    return idx;
}

std::size_t GameInstance::joint_index(const std::vector<int>& actions, int y) const {
    std::size_t idx = 0;
    for (int i = 0; i < num_users(); ++i) idx = idx * action_sets[i].size() + actions[i];
    return idx * num_states() + y;
}

std::size_t GameInstance::joint_size() const {
    std::size_t s = num_states();
    for (const auto& a : action_sets) s *= a.size();
    return s;
}

double GameInstance::provider_util(int j, const std::vector<int>& actions, int y) const {
    if (j < static_cast<int>(provider_utils.size()) && !provider_utils[j].empty())
        return provider_utils[j][joint_index(actions, y)];
    const auto& sep = provider_utils_sep.at(j);
    if (!sep) throw DimensionMismatch("provider " + std::to_string(j) + " has no utility table");
    double v = sep->intercept;
    for (int i = 0; i < num_users(); ++i) v += sep->weights[i] * sep->components[i][actions[i]][y];
    return v;
}

std::vector<double> GameInstance::prior_state_marginal() const {
    std::vector<double> m(num_states(), 0.0);
    std::size_t block = prior.size() / num_states();
    for (int y = 0; y < num_states(); ++y)
        for (std::size_t r = 0; r < block; ++r) m[y] += prior[y * block + r];
    return m;
}

std::vector<double> GameInstance::triple_marginal(int user, int provider) const {
    std::size_t nu = user_features[user].size();
    std::size_t np = provider_features[provider].size();
    std::vector<double> m(num_states() * nu * np, 0.0);
    std::vector<int> dims = prior_dims();
    std::size_t idx = 0;
    detail::for_each_tuple(dims, [&](const std::vector<int>& t) {
        double p = prior[idx++];
        if (p == 0.0) return;
        int y = t[0];
        int xu = t[1 + user];
        int xp = t[1 + num_users() + provider];
        m[(static_cast<std::size_t>(y) * nu + xu) * np + xp] += p;
    });
    return m;
}

std::vector<double> GameInstance::user_marginal(int user) const {
    std::size_t nu = user_features[user].size();
    std::vector<double> m(num_states() * nu, 0.0);
    std::vector<int> dims = prior_dims();
    std::size_t idx = 0;
    detail::for_each_tuple(dims, [&](const std::vector<int>& t) {
        double p = prior[idx++];
        if (p == 0.0) return;
        m[static_cast<std::size_t>(t[0]) * nu + t[1 + user]] += p;
    });
    return m;
}

void GameInstance::validate(double tol) const {
    if (states.empty()) throw DimensionMismatch("empty state space");
    if (messages.empty()) throw DimensionMismatch("empty message space");
    if (rounds < 1) throw DimensionMismatch("rounds must be >= 1");
    if (user_utils.size() != user_features.size() || action_sets.size() != user_features.size())
        throw DimensionMismatch("per-user table count mismatch");
    std::size_t expect = 1;
    for (int d : prior_dims()) expect *= d;
    if (prior.size() != expect) throw DimensionMismatch("prior table size mismatch");
    double sum = 0.0;
    for (double p : prior) {
        if (!std::isfinite(p)) throw NonFiniteInput("non-finite prior entry");
        if (!(p >= 0.0) || p > 1.0 + tol) throw ParameterViolation("prior entry out of [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol) throw ParameterViolation("prior does not sum to 1");
    for (int i = 0; i < num_users(); ++i) {
        if (action_sets[i].empty()) throw EmptyActionSet("user " + std::to_string(i));
        if (user_utils[i].size() != action_sets[i].size())
            throw DimensionMismatch("user utility rows mismatch");
        for (const auto& row : user_utils[i]) {
            if (row.size() != states.size()) throw DimensionMismatch("user utility cols mismatch");
            for (double v : row) {
                if (!std::isfinite(v)) throw NonFiniteInput("non-finite user utility");
                if (v < -tol || v > 1.0 + tol)
                    throw ParameterViolation("user utility outside [0,1]");
            }
        }
    }
    std::vector<int> acts(num_users(), 0);
    for (int j = 0; j < num_providers(); ++j) {
        bool dense = j < static_cast<int>(provider_utils.size()) && !provider_utils[j].empty();
        bool sep = j < static_cast<int>(provider_utils_sep.size()) && provider_utils_sep[j];
        if (!dense && !sep)
            throw DimensionMismatch("provider " + std::to_string(j) + " has no utility table");
        if (dense && provider_utils[j].size() != joint_size())
            throw DimensionMismatch("dense provider utility size mismatch");
        std::vector<int> dims;
        for (const auto& a : action_sets) dims.push_back(static_cast<int>(a.size()));
        dims.push_back(num_states());
        detail::for_each_tuple(dims, [&](const std::vector<int>& t) {
            std::vector<int> a(t.begin(), t.end() - 1);
            int y = t.back();
            double v = provider_util(j, a, y);
            if (!std::isfinite(v)) throw NonFiniteInput("non-finite provider utility");
            if (v < -tol || v > 1.0 + tol)
                throw ParameterViolation("provider utility outside [0,1]");
            if (dense && sep) {
                const auto& s = *provider_utils_sep[j];
                double vs = s.intercept;
                for (int i = 0; i < num_users(); ++i)
                    vs += s.weights[i] * s.components[i][a[i]][y];
                if (std::abs(vs - provider_utils[j][joint_index(a, y)]) > tol)
                    throw DimensionMismatch("separable/dense provider utility disagreement");
            }
        });
    }
}

const Dist& ProviderRule::row(int feature, const std::vector<int>& prefix) const {
    auto it = rows.find({feature, prefix});
    if (it == rows.end())
        throw UndefinedRuleRow("provider rule row missing for feature " + std::to_string(feature));
    return it->second;
}

void ProviderRule::set_row(int feature, std::vector<int> prefix, Dist probs) {
    rows[{feature, std::move(prefix)}] = std::move(probs);
}

const Dist& UserStrategy::talk_row(int feature, const std::vector<int>& prefix) const {
    auto it = talk.find({feature, prefix});
    if (it == talk.end())
        throw UndefinedRuleRow("user talk row missing for feature " + std::to_string(feature));
    return it->second;
}

const Dist& UserStrategy::decide_row(int feature, const std::vector<int>& transcript) const {
    auto it = decide.find({feature, transcript});
    if (it == decide.end())
        throw UndefinedRuleRow("user decision row missing for feature " + std::to_string(feature));
    return it->second;
}

double InducedDistribution::at(const std::vector<int>& actions, int y) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < action_counts.size(); ++i)
        idx = idx * action_counts[i] + actions[i];
    return table[idx * num_states + y];
}

std::vector<double> InducedDistribution::state_marginal() const {
    std::vector<double> m(num_states, 0.0);
    for (std::size_t i = 0; i < table.size(); ++i) m[i % num_states] += table[i];
    return m;
}

void InducedDistribution::validate(const std::vector<double>& prior_y, double tol) const {
    double sum = 0.0;
    for (double p : table) {
        if (p < -tol) throw DimensionMismatch("negative induced probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol) throw DimensionMismatch("induced distribution not normalized");
    std::vector<double> m = state_marginal();
    for (int y = 0; y < num_states; ++y)
        if (std::abs(m[y] - prior_y[y]) > tol)
            throw DimensionMismatch("state marginal not preserved");
}

InducedDistribution simulate_interaction(const GameInstance& g, const ProviderRule& rule,
                                         int provider, const UserStrategy& strat, int user) {
    int Y = g.num_states();
    int M = g.num_messages();
    std::size_t nu = g.user_features[user].size();
    std::size_t np = g.provider_features[provider].size();
    int A = static_cast<int>(g.action_sets[user].size());
    std::vector<double> marg = g.triple_marginal(user, provider);

    InducedDistribution out;
    out.num_states = Y;
    out.action_counts = {A};
    out.table.assign(static_cast<std::size_t>(A) * Y, 0.0);

    std::vector<int> prefix;
    // weights: joint mass over (y, xp) carried down the transcript tree
    std::function<void(int, std::vector<double>&)> walk = [&](int xu, std::vector<double>& w) {
        if (static_cast<int>(prefix.size()) == g.rounds) {
            const Dist& d = strat.decide_row(xu, prefix);
            if (static_cast<int>(d.size()) != A)
                throw DimensionMismatch("decision row has wrong action count");
            std::vector<double> wy(Y, 0.0);
            for (int y = 0; y < Y; ++y)
                for (std::size_t xp = 0; xp < np; ++xp) wy[y] += w[y * np + xp];
            for (int a = 0; a < A; ++a)
                for (int y = 0; y < Y; ++y)
                    out.table[static_cast<std::size_t>(a) * Y + y] += d[a] * wy[y];
            return;
        }
        int round = static_cast<int>(prefix.size()) + 1;
        if (g.provider_speaks(round)) {
            for (int m = 0; m < M; ++m) {
                std::vector<double> w2(w.size(), 0.0);
                double mass = 0.0;
                for (std::size_t xp = 0; xp < np; ++xp) {
                    const Dist& r = rule.row(static_cast<int>(xp), prefix);
                    if (static_cast<int>(r.size()) != M)
                        throw DimensionMismatch("provider rule row has wrong message count");
                    for (int y = 0; y < Y; ++y) {
                        double v = w[y * np + xp] * r[m];
                        w2[y * np + xp] = v;
                        mass += v;
                    }
                }
                if (mass == 0.0) continue;
                prefix.push_back(m);
                walk(xu, w2);
                prefix.pop_back();
            }
        } else {
            const Dist& t = strat.talk_row(xu, prefix);
            if (static_cast<int>(t.size()) != M)
                throw DimensionMismatch("user talk row has wrong message count");
            for (int m = 0; m < M; ++m) {
                if (t[m] == 0.0) continue;
                std::vector<double> w2(w.size());
                for (std::size_t s = 0; s < w.size(); ++s) w2[s] = w[s] * t[m];
                prefix.push_back(m);
                walk(xu, w2);
                prefix.pop_back();
            }
        }
    };

    for (std::size_t xu = 0; xu < nu; ++xu) {
        std::vector<double> w(static_cast<std::size_t>(Y) * np);
        double mass = 0.0;
        for (int y = 0; y < Y; ++y)
            for (std::size_t xp = 0; xp < np; ++xp) {
                w[y * np + xp] = marg[(static_cast<std::size_t>(y) * nu + xu) * np + xp];
                mass += w[y * np + xp];
            }
        if (mass == 0.0) continue;
        walk(static_cast<int>(xu), w);
    }
    return out;
}

int best_response_decision(const GameInstance& g, int user, const Dist& posterior_over_y,
                           int /*feature*/) {
    int A = static_cast<int>(g.action_sets[user].size());
    if (A == 0) throw EmptyActionSet("user " + std::to_string(user));
    std::vector<double> vals(A, 0.0);
    for (int a = 0; a < A; ++a)
        for (int y = 0; y < g.num_states(); ++y)
            vals[a] += posterior_over_y[y] * g.user_utils[user][a][y];
    return argmax_ordered(vals, user < static_cast<int>(g.action_order.size())
                                    ? g.action_order[user]
                                    : std::vector<int>{});
}

std::pair<UserStrategy, double> optimal_user_strategy(const GameInstance& g, int user,
                                                      const ProviderRule& rule, int provider) {
    int Y = g.num_states();
    int M = g.num_messages();
    std::size_t nu = g.user_features[user].size();
    std::size_t np = g.provider_features[provider].size();
    int A = static_cast<int>(g.action_sets[user].size());
    if (A == 0) throw EmptyActionSet("user " + std::to_string(user));
    std::vector<double> marg = g.triple_marginal(user, provider);
    const std::vector<int>& aorder = user < static_cast<int>(g.action_order.size())
                                         ? g.action_order[user]
                                         : std::vector<int>{};

    UserStrategy strat;
    std::vector<int> prefix;
    // Returns the unnormalized optimal continuation value; weights carry the
    // joint mass over (y, xp) at this node.
    std::function<double(int, const std::vector<double>&)> solve =
        [&](int xu, const std::vector<double>& w) -> double {
        if (static_cast<int>(prefix.size()) == g.rounds) {
            std::vector<double> wy(Y, 0.0);
            for (int y = 0; y < Y; ++y)
                for (std::size_t xp = 0; xp < np; ++xp) wy[y] += w[y * np + xp];
            std::vector<double> vals(A, 0.0);
            for (int a = 0; a < A; ++a)
                for (int y = 0; y < Y; ++y) vals[a] += wy[y] * g.user_utils[user][a][y];
            int best = argmax_ordered(vals, aorder);
            Dist d(A, 0.0);
            d[best] = 1.0;
            strat.decide[{xu, prefix}] = std::move(d);
            return vals[best];
        }
        int round = static_cast<int>(prefix.size()) + 1;
        if (g.provider_speaks(round)) {
            double total = 0.0;
            for (int m = 0; m < M; ++m) {
                std::vector<double> w2(w.size(), 0.0);
                double mass = 0.0;
                for (std::size_t xp = 0; xp < np; ++xp) {
                    const Dist& r = rule.row(static_cast<int>(xp), prefix);
                    for (int y = 0; y < Y; ++y) {
                        double v = w[y * np + xp] * r[m];
                        w2[y * np + xp] = v;
                        mass += v;
                    }
                }
                if (mass == 0.0) continue;
                prefix.push_back(m);
                total += solve(xu, w2);
                prefix.pop_back();
            }
            return total;
        }
        double best_v = 0.0;
        int best_m = -1;
        for (int m = 0; m < M; ++m) {
            prefix.push_back(m);
            double v = solve(xu, w);
            prefix.pop_back();
            if (best_m < 0 || v > best_v) {
                best_v = v;
                best_m = m;
            }
        }
        Dist t(M, 0.0);
        t[best_m] = 1.0;
        strat.talk[{xu, prefix}] = std::move(t);
        return best_v;
    };

    double utility = 0.0;
    for (std::size_t xu = 0; xu < nu; ++xu) {
        std::vector<double> w(static_cast<std::size_t>(Y) * np);
        double mass = 0.0;
        for (int y = 0; y < Y; ++y)
            for (std::size_t xp = 0; xp < np; ++xp) {
                w[y * np + xp] = marg[(static_cast<std::size_t>(y) * nu + xu) * np + xp];
                mass += w[y * np + xp];
            }
        if (mass == 0.0) continue;
        utility += solve(static_cast<int>(xu), w);
    }
    return {std::move(strat), utility};
}

double user_utility_against(const GameInstance& g, int user, const ProviderRule& rule,
                            int provider) {
    return optimal_user_strategy(g, user, rule, provider).second;
}

int select_provider(const GameInstance& g, int user, const std::vector<ProviderRule>& rules) {
    if (static_cast<int>(rules.size()) != g.num_providers())
        throw DimensionMismatch("one rule per provider required");
    std::vector<double> utils(rules.size());
    for (int j = 0; j < g.num_providers(); ++j)
        utils[j] = user_utility_against(g, user, rules[j], j);
    return argmax_ordered(utils, g.provider_order);
}

std::vector<double> user_action_kernel(const GameInstance& g, int user, const ProviderRule& rule,
                                       int provider, const UserStrategy& strat) {
    int Y = g.num_states();
    int M = g.num_messages();
    std::size_t nu = g.user_features[user].size();
    std::size_t np = g.provider_features[provider].size();
    int A = static_cast<int>(g.action_sets[user].size());
    (void)Y;
    std::vector<double> kernel(nu * np * A, 0.0);
    std::vector<int> prefix;
    std::function<void(int, int, double)> walk = [&](int xu, int xp, double p) {
        if (p == 0.0) return;
        if (static_cast<int>(prefix.size()) == g.rounds) {
            const Dist& d = strat.decide_row(xu, prefix);
            for (int a = 0; a < A; ++a)
                kernel[(static_cast<std::size_t>(xu) * np + xp) * A + a] += p * d[a];
            return;
        }
        int round = static_cast<int>(prefix.size()) + 1;
        const Dist& dist = g.provider_speaks(round) ? rule.row(xp, prefix)
                                                    : strat.talk_row(xu, prefix);
        for (int m = 0; m < M; ++m) {
            if (dist[m] == 0.0) continue;
            prefix.push_back(m);
            walk(xu, xp, p * dist[m]);
            prefix.pop_back();
        }
    };
    for (std::size_t xu = 0; xu < nu; ++xu)
        for (std::size_t xp = 0; xp < np; ++xp)
            walk(static_cast<int>(xu), static_cast<int>(xp), 1.0);
    return kernel;
}

namespace {

InducedDistribution joint_from_kernels(const GameInstance& g, const std::vector<int>& chosen,
                                       const std::vector<std::vector<double>>& kernels) {
    int n = g.num_users();
    int Y = g.num_states();
    InducedDistribution out;
    out.num_states = Y;
    for (int i = 0; i < n; ++i)
        out.action_counts.push_back(static_cast<int>(g.action_sets[i].size()));
    out.table.assign(g.joint_size(), 0.0);

    std::vector<int> acts(out.action_counts.begin(), out.action_counts.end());
    std::vector<int> dims = g.prior_dims();
    std::size_t idx = 0;
    detail::for_each_tuple(dims, [&](const std::vector<int>& t) {
        double p = g.prior[idx++];
        if (p == 0.0) return;
        int y = t[0];
        detail::for_each_tuple(acts, [&](const std::vector<int>& a) {
            double q = p;
            for (int i = 0; i < n; ++i) {
                int j = chosen[i];
                std::size_t np = g.provider_features[j].size();
                int A = static_cast<int>(g.action_sets[i].size());
                int xu = t[1 + i];
                int xp = t[1 + n + j];
                q *= kernels[i][(static_cast<std::size_t>(xu) * np + xp) * A + a[i]];
                if (q == 0.0) break;
            }
            if (q != 0.0) out.table[g.joint_index(a, y)] += q;
        });
    });
    return out;
}

}  // namespace

InducedDistribution induced_joint(const GameInstance& g, const AnonymousProfile& profile) {
    if (static_cast<int>(profile.rules.size()) != g.num_providers())
        throw DimensionMismatch("anonymous profile needs one rule per provider");
    int n = g.num_users();
    std::vector<int> chosen(n);
    std::vector<std::vector<double>> kernels(n);
    for (int i = 0; i < n; ++i) {
        chosen[i] = select_provider(g, i, profile.rules);
        auto [strat, util] = optimal_user_strategy(g, i, profile.rules[chosen[i]], chosen[i]);
        (void)util;
        kernels[i] = user_action_kernel(g, i, profile.rules[chosen[i]], chosen[i], strat);
    }
    return joint_from_kernels(g, chosen, kernels);
}

InducedDistribution induced_joint(const GameInstance& g, const PersonalizedProfile& profile) {
    if (static_cast<int>(profile.rules.size()) != g.num_providers())
        throw DimensionMismatch("personalized profile needs rules for every provider");
    int n = g.num_users();
    std::vector<int> chosen(n);
    std::vector<std::vector<double>> kernels(n);
    for (int i = 0; i < n; ++i) {
        std::vector<ProviderRule> mine;
        for (int j = 0; j < g.num_providers(); ++j) {
            if (static_cast<int>(profile.rules[j].size()) != n)
                throw DimensionMismatch("personalized profile needs one rule per user");
            mine.push_back(profile.rules[j][i]);
        }
        chosen[i] = select_provider(g, i, mine);
        auto [strat, util] = optimal_user_strategy(g, i, mine[chosen[i]], chosen[i]);
        (void)util;
        kernels[i] = user_action_kernel(g, i, mine[chosen[i]], chosen[i], strat);
    }
    return joint_from_kernels(g, chosen, kernels);
}

std::vector<double> expected_provider_utilities(const GameInstance& g,
                                                const InducedDistribution& joint) {
    std::vector<double> out(g.num_providers(), 0.0);
    std::vector<int> dims;
    for (const auto& a : g.action_sets) dims.push_back(static_cast<int>(a.size()));
    dims.push_back(g.num_states());
    std::size_t idx = 0;
    detail::for_each_tuple(dims, [&](const std::vector<int>& t) {
        double p = joint.table[idx++];
        if (p == 0.0) return;
        std::vector<int> a(t.begin(), t.end() - 1);
        int y = t.back();
        for (int j = 0; j < g.num_providers(); ++j) out[j] += p * g.provider_util(j, a, y);
    });
    return out;
}

double expected_user_utility(const GameInstance& g, int user, const InducedDistribution& joint) {
    double out = 0.0;
    std::vector<int> dims;
    for (const auto& a : g.action_sets) dims.push_back(static_cast<int>(a.size()));
    dims.push_back(g.num_states());
    std::size_t idx = 0;
    detail::for_each_tuple(dims, [&](const std::vector<int>& t) {
        double p = joint.table[idx++];
        if (p == 0.0) return;
        out += p * g.user_utils[user][t[user]][t.back()];
    });
    return out;
}

namespace {

// Provider-turn transcript prefixes, shortest first.
std::vector<std::vector<int>> provider_turn_prefixes(const GameInstance& g) {
    std::vector<std::vector<int>> out;
    for (int r = 1; r <= g.rounds; ++r) {
        if (!g.provider_speaks(r)) continue;
        std::vector<int> dims(r - 1, g.num_messages());
        detail::for_each_tuple(dims, [&](const std::vector<int>& t) { out.push_back(t); });
    }
    return out;
}

}  // namespace

std::vector<ProviderRule> enumerate_deterministic_rules(const GameInstance& g, int provider,
                                                        std::uint64_t cap) {
    auto prefixes = provider_turn_prefixes(g);
    std::size_t nf = g.provider_features[provider].size();
    std::size_t points = prefixes.size() * nf;
    std::uint64_t count = detail::checked_pow(g.num_messages(), points, cap);
    std::vector<ProviderRule> out;
    out.reserve(count);
    std::vector<int> choice(points, 0);
    while (true) {
        ProviderRule rule;
        rule.deterministic = true;
        std::size_t c = 0;
        for (const auto& pre : prefixes)
            for (std::size_t f = 0; f < nf; ++f) {
                Dist d(g.num_messages(), 0.0);
                d[choice[c++]] = 1.0;
                rule.set_row(static_cast<int>(f), pre, std::move(d));
            }
        out.push_back(std::move(rule));
        std::size_t pos = points;
        while (pos > 0) {
            if (++choice[pos - 1] < g.num_messages()) break;
            choice[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
    }
    return out;
}

std::vector<UserStrategy> enumerate_deterministic_user_strategies(const GameInstance& g, int user,
                                                                  std::uint64_t cap) {
    int M = g.num_messages();
    int A = static_cast<int>(g.action_sets[user].size());
    std::size_t nf = g.user_features[user].size();
    std::vector<std::vector<int>> talk_prefixes;
    for (int r = 1; r <= g.rounds; ++r) {
        if (g.provider_speaks(r)) continue;
        std::vector<int> dims(r - 1, M);
        detail::for_each_tuple(dims, [&](const std::vector<int>& t) { talk_prefixes.push_back(t); });
    }
    std::vector<std::vector<int>> transcripts;
    {
        std::vector<int> dims(g.rounds, M);
        detail::for_each_tuple(dims, [&](const std::vector<int>& t) { transcripts.push_back(t); });
    }
    std::vector<int> radices;
    for (std::size_t p = 0; p < talk_prefixes.size() * nf; ++p) radices.push_back(M);
    for (std::size_t p = 0; p < transcripts.size() * nf; ++p) radices.push_back(A);
    std::uint64_t count = 1;
    for (int r : radices) {
        count = detail::checked_pow(count, 1, cap);
        if (count > cap / r) throw SearchSpaceTooLarge(cap);
        count *= r;
    }
    std::vector<UserStrategy> out;
    out.reserve(count);
    std::vector<int> choice(radices.size(), 0);
    while (true) {
        UserStrategy s;
        std::size_t c = 0;
        for (const auto& pre : talk_prefixes)
            for (std::size_t f = 0; f < nf; ++f) {
                Dist d(M, 0.0);
                d[choice[c++]] = 1.0;
                s.talk[{static_cast<int>(f), pre}] = std::move(d);
            }
        for (const auto& tr : transcripts)
            for (std::size_t f = 0; f < nf; ++f) {
                Dist d(A, 0.0);
                d[choice[c++]] = 1.0;
                s.decide[{static_cast<int>(f), tr}] = std::move(d);
            }
        out.push_back(std::move(s));
        std::size_t pos = radices.size();
        while (pos > 0) {
            if (++choice[pos - 1] < radices[pos - 1]) break;
            choice[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
    }
    return out;
}

ProviderRule constant_rule(const GameInstance& g, int provider, int message) {
    ProviderRule rule;
    rule.deterministic = true;
    for (const auto& pre : provider_turn_prefixes(g))
        for (std::size_t f = 0; f < g.provider_features[provider].size(); ++f) {
            Dist d(g.num_messages(), 0.0);
            d[message] = 1.0;
            rule.set_row(static_cast<int>(f), pre, std::move(d));
        }
    return rule;
}

}  // namespace market
