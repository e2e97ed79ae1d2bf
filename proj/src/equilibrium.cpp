#include "market/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "market/alignment.hpp"

namespace market {

namespace {

std::vector<int> identity_order(int n) {
    std::vector<int> o(n);
    std::iota(o.begin(), o.end(), 0);
    return o;
}

int argmax_ordered(const std::vector<double>& values, const std::vector<int>& order) {
    int best = -1;
    double best_v = 0;
    std::vector<int> ident;
    const std::vector<int>* ord = &order;
    if (order.empty()) {
        ident = identity_order(static_cast<int>(values.size()));
        ord = &ident;
    }
    for (int idx : *ord) {
        if (best < 0 || values[idx] > best_v) {
            best = idx;
            best_v = values[idx];
        }
    }
    return best;
}

int provider_turn_count(const GameInstance&, int rounds) {
    int c = 0;
    for (int r = 1; r <= rounds; ++r)
        if ((rounds - r) % 2 == 0) ++c;
    return c;
}

struct SupportEntry {
    double p;
    int y;
    std::vector<int> xu;
    std::vector<int> xp;
};

std::vector<SupportEntry> prior_support(const GameInstance& g) {
    std::vector<SupportEntry> out;
    std::vector<int> dims = g.prior_dims();
    int n = g.num_users();
    int k = g.num_providers();
    std::size_t idx = 0;
    detail::for_each_tuple(dims, [&](const std::vector<int>& t) {
        double p = g.prior[idx++];
        if (p == 0.0) return;
        SupportEntry e;
        e.p = p;
        e.y = t[0];
        e.xu.assign(t.begin() + 1, t.begin() + 1 + n);
        e.xp.assign(t.begin() + 1 + n, t.begin() + 1 + n + k);
        out.push_back(std::move(e));
    });
    return out;
}

struct UserRuleEval {
    double value = 0.0;
    std::vector<double> kernel;  // [(xu, xp, a)]
};

UserRuleEval eval_user_rule(const GameInstance& g, int user, const ProviderRule& rule,
                            int provider) {
    auto [strat, value] = optimal_user_strategy(g, user, rule, provider);
    UserRuleEval e;
    e.value = value;
    e.kernel = user_action_kernel(g, user, rule, provider, strat);
    return e;
}

// Expected utility of one provider when each user i consults provider
// chosen[i] and acts through the given kernel.
double provider_value(const GameInstance& g, const std::vector<SupportEntry>& support, int j,
                      const std::vector<int>& chosen,
                      const std::vector<const std::vector<double>*>& kernels) {
    int n = g.num_users();
    std::vector<int> acts(n);
    for (int i = 0; i < n; ++i) acts[i] = static_cast<int>(g.action_sets[i].size());
    double out = 0.0;
    std::vector<int> a(n, 0);
    for (const SupportEntry& e : support) {
        while (true) {
            double q = e.p;
            for (int i = 0; i < n && q != 0.0; ++i) {
                int ji = chosen[i];
                std::size_t np = g.provider_features[ji].size();
                q *= (*kernels[i])[(static_cast<std::size_t>(e.xu[i]) * np + e.xp[ji]) * acts[i] +
                                   a[i]];
            }
            if (q != 0.0) out += q * g.provider_util(j, a, e.y);
            int pos = n - 1;
            while (pos >= 0) {
                if (++a[pos] < acts[pos]) break;
                a[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }
    return out;
}

}  // namespace

GarblingSpec garbling_identical_features(const GameInstance& g,
                                         const std::vector<int>& providers) {
    if (providers.empty()) throw ParameterViolation("empty provider set");
    const auto& feats = g.provider_features[providers.front()];
    for (int j : providers)
        if (g.provider_features[j] != feats)
            throw ParameterViolation("providers do not share an identical feature space");
    GarblingSpec spec;
    spec.labels = feats;
    spec.providers = providers;
    int Z = static_cast<int>(feats.size());
    for (std::size_t t = 0; t < providers.size(); ++t) {
        std::vector<std::vector<double>> f(Z, std::vector<double>(Z, 0.0));
        for (int x = 0; x < Z; ++x) f[x][x] = 1.0;
        spec.maps.push_back(std::move(f));
    }
    // Pr(z|y) equals the shared feature's conditional under the prior.
    std::vector<double> py = g.prior_state_marginal();
    spec.conditional.assign(g.num_states(), std::vector<double>(Z, 0.0));
    for (const SupportEntry& e : prior_support(g))
        spec.conditional[e.y][e.xp[providers.front()]] += e.p;
    for (int y = 0; y < g.num_states(); ++y)
        if (py[y] > 0)
            for (int z = 0; z < Z; ++z) spec.conditional[y][z] /= py[y];
    return spec;
}

GarblingSpec garbling_trivial(const GameInstance& g, const std::vector<int>& providers) {
    GarblingSpec spec;
    spec.labels = {"z0"};
    spec.providers = providers;
    for (int j : providers)
        spec.maps.push_back(std::vector<std::vector<double>>(g.provider_features[j].size(),
                                                             std::vector<double>{1.0}));
    spec.conditional.assign(g.num_states(), {1.0});
    return spec;
}

GarblingCheck validate_garbling(const GameInstance& g, const GarblingSpec& garbling, double tol) {
    int Z = garbling.num_labels();
    std::vector<double> py = g.prior_state_marginal();
    GarblingCheck check;
    for (std::size_t t = 0; t < garbling.providers.size(); ++t) {
        int j = garbling.providers[t];
        std::size_t np = g.provider_features[j].size();
        if (garbling.maps[t].size() != np)
            throw DimensionMismatch("garbling map shape mismatch for provider " +
                                    std::to_string(j));
        // P(xp_j, y)
        std::vector<double> joint(np * g.num_states(), 0.0);
        for (const SupportEntry& e : prior_support(g))
            joint[static_cast<std::size_t>(e.xp[j]) * g.num_states() + e.y] += e.p;
        for (int y = 0; y < g.num_states(); ++y) {
            if (py[y] == 0.0) continue;
            for (int z = 0; z < Z; ++z) {
                double lhs = garbling.conditional[y][z];
                double rhs = 0.0;
                for (std::size_t xp = 0; xp < np; ++xp)
                    rhs += joint[xp * g.num_states() + y] / py[y] * garbling.maps[t][xp][z];
                check.max_violation = std::max(check.max_violation, std::abs(lhs - rhs));
            }
        }
    }
    check.pass = check.max_violation <= tol;
    return check;
}

double benchmark_shared(const GameInstance& g, int user, const GarblingSpec& garbling, int rounds,
                        std::uint64_t cap) {
    int Y = g.num_states();
    int A = static_cast<int>(g.action_sets[user].size());
    std::size_t nu = g.user_features[user].size();
    std::vector<double> um = g.user_marginal(user);  // P(y, xu)

    // Value of acting on posterior weights over y (unnormalized).
    auto best_action_value = [&](const std::vector<double>& wy) {
        double best = -1.0;
        for (int a = 0; a < A; ++a) {
            double v = 0.0;
            for (int y = 0; y < Y; ++y) v += wy[y] * g.user_utils[user][a][y];
            best = std::max(best, v);
        }
        return best;
    };

    if (rounds == 0) {
        double total = 0.0;
        for (std::size_t xu = 0; xu < nu; ++xu) {
            std::vector<double> wy(Y);
            for (int y = 0; y < Y; ++y) wy[y] = um[static_cast<std::size_t>(y) * nu + xu];
            total += best_action_value(wy);
        }
        return total;
    }

    int Z = garbling.num_labels();
    int turns = provider_turn_count(g, rounds);
    // Effective signal alphabet over the provider's turns.
    double log_signals = turns * std::log(static_cast<double>(g.num_messages()));
    bool revelation = log_signals >= std::log(static_cast<double>(Z)) - 1e-12;

    if (revelation) {
        double total = 0.0;
        for (std::size_t xu = 0; xu < nu; ++xu)
            for (int z = 0; z < Z; ++z) {
                std::vector<double> wy(Y);
                for (int y = 0; y < Y; ++y)
                    wy[y] = um[static_cast<std::size_t>(y) * nu + xu] *
                            garbling.conditional[y][z];
                total += best_action_value(wy);
            }
        return total;
    }

    // Enumerate deterministic maps z -> signal tuple.
    std::uint64_t signals = detail::checked_pow(g.num_messages(), turns, cap);
    detail::checked_pow(signals, Z, cap);
    double best_total = -1.0;
    std::vector<int> map(Z, 0);
    while (true) {
        double total = 0.0;
        for (std::size_t xu = 0; xu < nu; ++xu)
            for (std::uint64_t s = 0; s < signals; ++s) {
                std::vector<double> wy(Y, 0.0);
                double mass = 0.0;
                for (int z = 0; z < Z; ++z) {
                    if (map[z] != static_cast<int>(s)) continue;
                    for (int y = 0; y < Y; ++y) {
                        double v = um[static_cast<std::size_t>(y) * nu + xu] *
                                   garbling.conditional[y][z];
                        wy[y] += v;
                        mass += v;
                    }
                }
                if (mass > 0.0) total += best_action_value(wy);
            }
        best_total = std::max(best_total, total);
        int pos = Z - 1;
        while (pos >= 0) {
            if (++map[pos] < static_cast<int>(signals)) break;
            map[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return best_total;
}

std::string DeviationClass::label() const {
    switch (kind) {
        case Kind::DeterministicExhaustive: return "deterministic-exhaustive";
        case Kind::SharedRulesOnly: return "shared-rules-only";
        case Kind::Custom: return "custom";
    }
    return "unknown";
}

std::vector<ProviderRule> deviation_rules(const GameInstance& g, int provider,
                                          const DeviationClass& cls) {
    switch (cls.kind) {
        case DeviationClass::Kind::DeterministicExhaustive:
            return enumerate_deterministic_rules(g, provider, cls.cap);
        case DeviationClass::Kind::Custom:
            return cls.custom;
        case DeviationClass::Kind::SharedRulesOnly: {
            if (!cls.garbling) throw ParameterViolation("shared-rules-only needs a garbling");
            if (provider_turn_count(g, g.rounds) != 1)
                throw NotApplicable(
                    "shared-rule deviation enumeration supports a single provider turn");
            const GarblingSpec& gs = *cls.garbling;
            auto it = std::find(gs.providers.begin(), gs.providers.end(), provider);
            if (it == gs.providers.end())
                throw ParameterViolation("provider not covered by the garbling");
            std::size_t t = it - gs.providers.begin();
            int Z = gs.num_labels();
            int M = g.num_messages();
            // Prefixes at the provider's turn.
            std::vector<std::vector<int>> prefixes;
            for (int r = 1; r <= g.rounds; ++r) {
                if (!g.provider_speaks(r)) continue;
                std::vector<int> dims(r - 1, M);
                detail::for_each_tuple(dims,
                                       [&](const std::vector<int>& p) { prefixes.push_back(p); });
            }
            std::size_t points = prefixes.size() * Z;
            detail::checked_pow(M, points, cls.cap);
            std::vector<ProviderRule> out;
            std::vector<int> choice(points, 0);
            std::size_t np = g.provider_features[provider].size();
            while (true) {
                ProviderRule rule;
                std::size_t c = 0;
                for (const auto& pre : prefixes) {
                    // map z -> message for this prefix
                    std::vector<int> zmap(Z);
                    for (int z = 0; z < Z; ++z) zmap[z] = choice[c++];
                    for (std::size_t xp = 0; xp < np; ++xp) {
                        Dist d(M, 0.0);
                        for (int z = 0; z < Z; ++z) d[zmap[z]] += gs.maps[t][xp][z];
                        rule.set_row(static_cast<int>(xp), pre, std::move(d));
                    }
                }
                out.push_back(std::move(rule));
                std::size_t pos = points;
                while (pos > 0) {
                    if (++choice[pos - 1] < M) break;
                    choice[pos - 1] = 0;
                    --pos;
                }
                if (pos == 0) break;
            }
            return out;
        }
    }
    throw ParameterViolation("unknown deviation class");
}

EquilibriumReport verify_anonymous_NE(const GameInstance& g, const AnonymousProfile& profile,
                                      const DeviationClass& cls, double eps) {
    int n = g.num_users();
    int k = g.num_providers();
    if (static_cast<int>(profile.rules.size()) != k)
        throw DimensionMismatch("anonymous profile needs one rule per provider");
    std::vector<SupportEntry> support = prior_support(g);

    std::vector<std::vector<UserRuleEval>> base(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) base[i].push_back(eval_user_rule(g, i, profile.rules[j], j));

    std::vector<int> chosen(n);
    std::vector<const std::vector<double>*> kernels(n);
    EquilibriumReport report;
    report.deviation_class = cls.label();
    report.eps = eps;
    for (int i = 0; i < n; ++i) {
        std::vector<double> vals(k);
        for (int j = 0; j < k; ++j) vals[j] = base[i][j].value;
        chosen[i] = argmax_ordered(vals, g.provider_order);
        kernels[i] = &base[i][chosen[i]].kernel;
        report.user_utilities.push_back(base[i][chosen[i]].value);
    }
    for (int j = 0; j < k; ++j)
        report.provider_utilities.push_back(provider_value(g, support, j, chosen, kernels));

    report.provider_max_gain.assign(k, 0.0);
    double max_gain = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
        std::vector<ProviderRule> devs = deviation_rules(g, j, cls);
        double jmax = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < devs.size(); ++r) {
            std::vector<int> dchosen(n);
            std::vector<const std::vector<double>*> dkernels(n);
            std::vector<UserRuleEval> deveval(n);
            for (int i = 0; i < n; ++i) {
                deveval[i] = eval_user_rule(g, i, devs[r], j);
                std::vector<double> vals(k);
                for (int jj = 0; jj < k; ++jj)
                    vals[jj] = jj == j ? deveval[i].value : base[i][jj].value;
                dchosen[i] = argmax_ordered(vals, g.provider_order);
                dkernels[i] = dchosen[i] == j ? &deveval[i].kernel : &base[i][dchosen[i]].kernel;
            }
            double gain = provider_value(g, support, j, dchosen, dkernels) -
                          report.provider_utilities[j];
            if (gain > jmax) jmax = gain;
            if (gain > max_gain) {
                max_gain = gain;
                if (gain > eps)
                    report.witness = DeviationWitness{j, -1, r, gain};
            }
        }
        report.provider_max_gain[j] = jmax;
    }
    report.max_gain = max_gain;
    report.pass = max_gain <= eps;
    if (report.pass) report.witness.reset();
    return report;
}

EquilibriumReport verify_personalized_NE(const GameInstance& g,
                                         const PersonalizedProfile& profile,
                                         const DeviationClass& cls, double eps) {
    int n = g.num_users();
    int k = g.num_providers();
    if (static_cast<int>(profile.rules.size()) != k)
        throw DimensionMismatch("personalized profile needs rules for every provider");
    std::vector<SupportEntry> support = prior_support(g);

    std::vector<std::vector<UserRuleEval>> base(n);  // [i][j]
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) base[i].push_back(eval_user_rule(g, i, profile.rules[j][i], j));

    std::vector<int> chosen(n);
    std::vector<const std::vector<double>*> kernels(n);
    EquilibriumReport report;
    report.deviation_class = cls.label();
    report.eps = eps;
    for (int i = 0; i < n; ++i) {
        std::vector<double> vals(k);
        for (int j = 0; j < k; ++j) vals[j] = base[i][j].value;
        chosen[i] = argmax_ordered(vals, g.provider_order);
        kernels[i] = &base[i][chosen[i]].kernel;
        report.user_utilities.push_back(base[i][chosen[i]].value);
    }
    for (int j = 0; j < k; ++j)
        report.provider_utilities.push_back(provider_value(g, support, j, chosen, kernels));

    report.provider_max_gain.assign(k, 0.0);
    double max_gain = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
        std::vector<ProviderRule> devs = deviation_rules(g, j, cls);
        double jmax = -std::numeric_limits<double>::infinity();
        for (int target = 0; target < n; ++target) {
            for (std::size_t r = 0; r < devs.size(); ++r) {
                UserRuleEval dev = eval_user_rule(g, target, devs[r], j);
                std::vector<double> vals(k);
                for (int jj = 0; jj < k; ++jj)
                    vals[jj] = jj == j ? dev.value : base[target][jj].value;
                int dsel = argmax_ordered(vals, g.provider_order);
                std::vector<int> dchosen = chosen;
                std::vector<const std::vector<double>*> dkernels = kernels;
                dchosen[target] = dsel;
                dkernels[target] = dsel == j ? &dev.kernel : &base[target][dsel].kernel;
                double gain = provider_value(g, support, j, dchosen, dkernels) -
                              report.provider_utilities[j];
                if (gain > jmax) jmax = gain;
                if (gain > max_gain) {
                    max_gain = gain;
                    if (gain > eps) report.witness = DeviationWitness{j, target, r, gain};
                }
            }
        }
        report.provider_max_gain[j] = jmax;
    }
    report.max_gain = max_gain;
    report.pass = max_gain <= eps;
    if (report.pass) report.witness.reset();
    return report;
}

std::vector<EnumeratedEquilibrium> enumerate_pure_equilibria(
    const GameInstance& g, const std::vector<std::vector<ProviderRule>>& rule_spaces,
    GameMode mode, double eps, std::uint64_t cap) {
    int n = g.num_users();
    int k = g.num_providers();
    if (static_cast<int>(rule_spaces.size()) != k)
        throw DimensionMismatch("one rule space per provider required");
    std::vector<SupportEntry> support = prior_support(g);

    // eval[j][r][i]
    std::vector<std::vector<std::vector<UserRuleEval>>> eval(k);
    for (int j = 0; j < k; ++j) {
        eval[j].resize(rule_spaces[j].size());
        for (std::size_t r = 0; r < rule_spaces[j].size(); ++r)
            for (int i = 0; i < n; ++i)
                eval[j][r].push_back(eval_user_rule(g, i, rule_spaces[j][r], j));
    }

    int slots = mode == GameMode::Personalized ? k * n : k;
    auto space_of_slot = [&](int s) { return mode == GameMode::Personalized ? s / n : s; };
    std::uint64_t total = 1;
    for (int s = 0; s < slots; ++s) {
        std::size_t sz = rule_spaces[space_of_slot(s)].size();
        if (sz == 0) throw ParameterViolation("empty rule space");
        if (total > cap / sz) throw SearchSpaceTooLarge(cap);
        total *= sz;
    }

    std::vector<EnumeratedEquilibrium> found;
    std::vector<std::size_t> assign(slots, 0);
    std::vector<int> chosen(n);
    std::vector<const std::vector<double>*> kernels(n);
    std::vector<double> uvals(n);
    while (true) {
        // Users best-respond to the assigned rules.
        for (int i = 0; i < n; ++i) {
            std::vector<double> vals(k);
            for (int j = 0; j < k; ++j) {
                std::size_t slot = mode == GameMode::Personalized ? j * n + i : j;
                vals[j] = eval[j][assign[slot]][i].value;
            }
            chosen[i] = argmax_ordered(vals, g.provider_order);
            std::size_t slot = mode == GameMode::Personalized ? chosen[i] * n + i : chosen[i];
            kernels[i] = &eval[chosen[i]][assign[slot]][i].kernel;
            uvals[i] = eval[chosen[i]][assign[slot]][i].value;
        }
        std::vector<double> pvals(k);
        for (int j = 0; j < k; ++j) pvals[j] = provider_value(g, support, j, chosen, kernels);

        bool is_ne = true;
        double max_gain = -std::numeric_limits<double>::infinity();
        std::vector<double> per_provider_gain(k, -std::numeric_limits<double>::infinity());
        for (int j = 0; j < k && is_ne; ++j) {
            int tmax = mode == GameMode::Personalized ? n : 1;
            for (int target = 0; target < tmax && is_ne; ++target) {
                for (std::size_t r = 0; r < rule_spaces[j].size(); ++r) {
                    std::vector<int> dchosen = chosen;
                    std::vector<const std::vector<double>*> dkernels = kernels;
                    if (mode == GameMode::Personalized) {
                        std::vector<double> vals(k);
                        for (int jj = 0; jj < k; ++jj) {
                            std::size_t slot = jj * n + target;
                            vals[jj] = jj == j ? eval[j][r][target].value
                                              : eval[jj][assign[slot]][target].value;
                        }
                        int dsel = argmax_ordered(vals, g.provider_order);
                        dchosen[target] = dsel;
                        dkernels[target] = dsel == j
                                               ? &eval[j][r][target].kernel
                                               : &eval[dsel][assign[dsel * n + target]][target]
                                                      .kernel;
                    } else {
                        for (int i = 0; i < n; ++i) {
                            std::vector<double> vals(k);
                            for (int jj = 0; jj < k; ++jj)
                                vals[jj] = jj == j ? eval[j][r][i].value
                                                   : eval[jj][assign[jj]][i].value;
                            int dsel = argmax_ordered(vals, g.provider_order);
                            dchosen[i] = dsel;
                            dkernels[i] = dsel == j ? &eval[j][r][i].kernel
                                                    : &eval[dsel][assign[dsel]][i].kernel;
                        }
                    }
                    double gain = provider_value(g, support, j, dchosen, dkernels) - pvals[j];
                    if (gain > per_provider_gain[j]) per_provider_gain[j] = gain;
                    if (gain > max_gain) max_gain = gain;
                    if (gain > eps) {
                        is_ne = false;
                        break;
                    }
                }
            }
        }
        if (is_ne) {
            EnumeratedEquilibrium e;
            e.assignment = assign;
            e.report.provider_max_gain = per_provider_gain;
            e.report.max_gain = max_gain;
            e.report.user_utilities = uvals;
            e.report.provider_utilities = pvals;
            e.report.eps = eps;
            e.report.pass = true;
            e.report.deviation_class = "rule-space-exhaustive";
            found.push_back(std::move(e));
        }
        int pos = slots - 1;
        while (pos >= 0) {
            if (++assign[pos] < rule_spaces[space_of_slot(pos)].size()) break;
            assign[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return found;
}

double delta_R(const GameInstance& g, int provider, const GarblingSpec& garbling,
               const std::vector<ProviderRule>& rule_space, std::uint64_t cap) {
    if (rule_space.size() > cap) throw SearchSpaceTooLarge(cap);
    double delta = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.num_users(); ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (const ProviderRule& rule : rule_space)
            best = std::max(best, user_utility_against(g, i, rule, provider));
        double bench = benchmark_shared(g, i, garbling, g.rounds - 1, cap);
        delta = std::max(delta, best - bench);
    }
    return delta;
}

std::vector<double> bounds_personalized(const GameInstance& g, const WeakAlignmentCert& cert,
                                        const GarblingSpec& garbling) {
    cert.validate(g);
    int n = g.num_users();
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double mu = 0.0;
        for (std::size_t t = 0; t < cert.providers.size(); ++t) {
            if (cert.user_weights[t][i] > 0.0) {
                if (cert.provider_weights[t][i] <= 0.0)
                    throw CoverageViolation("w > 0 requires lambda > 0");
                mu += cert.user_weights[t][i] / cert.provider_weights[t][i];
            }
        }
        double bench = benchmark_shared(g, i, garbling, g.rounds);
        out[i] = bench - 2.0 * cert.eps_user - 2.0 * cert.eps_provider * mu;
    }
    return out;
}

std::vector<double> bounds_anonymous_dominant(const GameInstance& g,
                                              const StrongAlignmentCert& cert,
                                              const GarblingSpec& garbling) {
    cert.validate(g);
    int n = g.num_users();
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double lam_star = 0.0;
        for (std::size_t t = 0; t < cert.providers.size(); ++t)
            lam_star = std::max(lam_star, cert.weights[t][i]);
        if (lam_star <= 0.0)
            throw CoverageViolation("no provider covers user " + std::to_string(i));
        out[i] = benchmark_shared(g, i, garbling, g.rounds) - 2.0 * cert.eps / lam_star;
    }
    return out;
}

std::vector<double> bounds_anonymous_general(const GameInstance& g,
                                             const StrongAlignmentCert& cert,
                                             const GarblingSpec& garbling,
                                             const std::vector<double>& delta_by_provider) {
    cert.validate(g);
    if (g.rounds < 2)
        throw NotApplicable("identity-elicitation bound needs at least two rounds");
    if (g.num_messages() < g.num_users())
        throw MessageSpaceTooSmall("identity elicitation needs |M| >= N");
    if (delta_by_provider.size() != cert.providers.size())
        throw DimensionMismatch("one Delta_R value per certified provider required");
    int n = g.num_users();
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double delta_i = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < cert.providers.size(); ++t) {
            double lam = cert.weights[t][i];
            if (lam <= 0.0) continue;
            double others = 0.0;
            for (int i2 = 0; i2 < n; ++i2)
                if (i2 != i) others += cert.weights[t][i2];
            delta_i = std::min(delta_i,
                               delta_by_provider[t] * others / lam + 2.0 * cert.eps / lam);
        }
        if (!std::isfinite(delta_i))
            throw CoverageViolation("no provider covers user " + std::to_string(i));
        out[i] = benchmark_shared(g, i, garbling, g.rounds - 1) - delta_i;
    }
    return out;
}

}  // namespace market
