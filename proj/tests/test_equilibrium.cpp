#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "market/alignment.hpp"
#include "market/equilibrium.hpp"

using namespace market;

namespace {

// Gain oracle via the plain induced_joint path, no caching.
double anonymous_gain_oracle(const GameInstance& g, const AnonymousProfile& base, int j,
                             const ProviderRule& dev) {
    std::vector<double> u0 = expected_provider_utilities(g, induced_joint(g, base));
    AnonymousProfile alt = base;
    alt.rules[j] = dev;
    std::vector<double> u1 = expected_provider_utilities(g, induced_joint(g, alt));
    return u1[j] - u0[j];
}

GameInstance single_user_state_feature_instance(std::mt19937_64& rng, int Y, int A, int M) {
    GameInstance g;
    for (int y = 0; y < Y; ++y) g.states.push_back("y" + std::to_string(y));
    g.user_features = {{"x"}};
    g.provider_features = {g.states};
    g.prior.assign(static_cast<std::size_t>(Y) * Y, 0.0);
    for (int y = 0; y < Y; ++y) g.prior[g.prior_index(y, {0}, {y})] = 1.0 / Y;
    std::vector<std::string> acts;
    for (int a = 0; a < A; ++a) acts.push_back("a" + std::to_string(a));
    g.action_sets = {acts};
    for (int m = 0; m < M; ++m) g.messages.push_back("m" + std::to_string(m));
    g.rounds = 1;
    g.user_utils.assign(1, std::vector<std::vector<double>>(A, std::vector<double>(Y)));
    for (int a = 0; a < A; ++a)
        for (int y = 0; y < Y; ++y) g.user_utils[0][a][y] = testutil::urand(rng);
    g.provider_utils.assign(1, std::vector<double>(static_cast<std::size_t>(A) * Y));
    for (double& v : g.provider_utils[0]) v = testutil::urand(rng);
    g.provider_utils_sep.assign(1, std::nullopt);
    g.validate();
    return g;
}

}  // namespace

TEST_CASE("garbling construction and validation") {
    std::mt19937_64 rng(3);
    GameInstance g = testutil::random_instance(rng, 2, 2, 2);
    GarblingSpec z = garbling_identical_features(g, {0, 1});
    CHECK(validate_garbling(g, z).pass);
    GarblingSpec t = garbling_trivial(g, {0, 1});
    CHECK(validate_garbling(g, t).pass);
    z.conditional[0][0] += 0.1;
    z.conditional[0][1] -= 0.1;
    CHECK_FALSE(validate_garbling(g, z).pass);
}

TEST_CASE("benchmark equals the best deterministic rule over the shared feature") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        GameInstance g = testutil::random_instance(rng, 3, 3, 2);
        GarblingSpec z = garbling_identical_features(g, {0, 1});
        for (int user = 0; user < 2; ++user) {
            double best = -1.0;
            for (const ProviderRule& rule : enumerate_deterministic_rules(g, 0))
                best = std::max(best, user_utility_against(g, user, rule, 0));
            CHECK(benchmark_shared(g, user, z, g.rounds) == doctest::Approx(best).epsilon(1e-10));
            // trivial garbling carries no information
            CHECK(benchmark_shared(g, user, garbling_trivial(g, {0, 1}), g.rounds) ==
                  doctest::Approx(benchmark_shared(g, user, z, 0)).epsilon(1e-10));
            CHECK(benchmark_shared(g, user, z, g.rounds) >=
                  benchmark_shared(g, user, z, 0) - 1e-12);
        }
    }
}

TEST_CASE("benchmark enumeration fallback when signals cannot encode z") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        GameInstance g = single_user_state_feature_instance(rng, 3, 2, 2);  // |Z|=3 > M=2
        GarblingSpec z = garbling_identical_features(g, {0});
        double best = -1.0;
        for (const ProviderRule& rule : enumerate_deterministic_rules(g, 0))
            best = std::max(best, user_utility_against(g, 0, rule, 0));
        CHECK(benchmark_shared(g, 0, z, 1) == doctest::Approx(best).epsilon(1e-10));
    }
}

TEST_CASE("shared-rules-only deviations compose the garbling maps") {
    std::mt19937_64 rng(11);
    GameInstance g = testutil::random_instance(rng, 2, 2, 2);
    GarblingSpec z = garbling_identical_features(g, {0, 1});
    DeviationClass cls;
    cls.kind = DeviationClass::Kind::SharedRulesOnly;
    cls.garbling = &z;
    std::vector<ProviderRule> shared = deviation_rules(g, 0, cls);
    CHECK(shared.size() == 4);  // maps {z0,z1} -> {m0,m1}
    // identity feature maps: shared rules coincide with deterministic rules
    std::vector<ProviderRule> det = enumerate_deterministic_rules(g, 0);
    for (const ProviderRule& s : shared) {
        bool found = false;
        for (const ProviderRule& d : det) found = found || d.rows == s.rows;
        CHECK(found);
    }
    g.rounds = 3;
    CHECK_THROWS_AS(deviation_rules(g, 0, cls), NotApplicable);
}

TEST_CASE("anonymous verification agrees with the uncached joint oracle") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        GameInstance g = testutil::random_instance(rng, 2, 2, 2);
        AnonymousProfile prof{{constant_rule(g, 0, 0), constant_rule(g, 1, 0)}};
        DeviationClass cls;
        EquilibriumReport rep = verify_anonymous_NE(g, prof, cls);
        double oracle = -1e9;
        for (int j = 0; j < 2; ++j)
            for (const ProviderRule& dev : enumerate_deterministic_rules(g, j))
                oracle = std::max(oracle, anonymous_gain_oracle(g, prof, j, dev));
        CHECK(rep.max_gain == doctest::Approx(oracle).epsilon(1e-9));
        CHECK(rep.pass == (oracle <= 1e-9));
        if (!rep.pass) {
            REQUIRE(rep.witness.has_value());
            ProviderRule dev =
                enumerate_deterministic_rules(g, rep.witness->provider)[rep.witness
                                                                            ->deviation_index];
            CHECK(anonymous_gain_oracle(g, prof, rep.witness->provider, dev) ==
                  doctest::Approx(rep.witness->gain).epsilon(1e-9));
        }
    }
}

TEST_CASE("personalized verification agrees with the uncached joint oracle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 3; ++trial) {
        GameInstance g = testutil::random_instance(rng, 2, 2, 2);
        PersonalizedProfile prof;
        prof.rules = {{constant_rule(g, 0, 0), constant_rule(g, 0, 1)},
                      {constant_rule(g, 1, 1), constant_rule(g, 1, 0)}};
        DeviationClass cls;
        EquilibriumReport rep = verify_personalized_NE(g, prof, cls);
        std::vector<double> u0 = expected_provider_utilities(g, induced_joint(g, prof));
        double oracle = -1e9;
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i)
                for (const ProviderRule& dev : enumerate_deterministic_rules(g, j)) {
                    PersonalizedProfile alt = prof;
                    alt.rules[j][i] = dev;
                    std::vector<double> u1 =
                        expected_provider_utilities(g, induced_joint(g, alt));
                    oracle = std::max(oracle, u1[j] - u0[j]);
                }
        CHECK(rep.max_gain == doctest::Approx(oracle).epsilon(1e-9));
        for (int j = 0; j < 2; ++j) CHECK(rep.provider_utilities[j] == doctest::Approx(u0[j]));
    }
}

TEST_CASE("equilibrium enumeration matches per-assignment verification") {
    std::mt19937_64 rng(19);
    GameInstance g = testutil::random_instance(rng, 2, 2, 2);
    std::vector<std::vector<ProviderRule>> spaces = {enumerate_deterministic_rules(g, 0),
                                                     enumerate_deterministic_rules(g, 1)};
    auto found = enumerate_pure_equilibria(g, spaces, GameMode::Anonymous);
    int count = 0;
    for (std::size_t r0 = 0; r0 < spaces[0].size(); ++r0)
        for (std::size_t r1 = 0; r1 < spaces[1].size(); ++r1) {
            AnonymousProfile prof{{spaces[0][r0], spaces[1][r1]}};
            DeviationClass cls;  // deterministic-exhaustive = the same spaces
            EquilibriumReport rep = verify_anonymous_NE(g, prof, cls);
            bool listed = false;
            for (const auto& e : found)
                listed = listed || (e.assignment == std::vector<std::size_t>{r0, r1});
            CHECK(listed == rep.pass);
            if (rep.pass) ++count;
        }
    CHECK(count == static_cast<int>(found.size()));
}

TEST_CASE("bound functions enforce coverage and applicability") {
    std::mt19937_64 rng(23);
    GameInstance g = testutil::random_exact_strong_instance(rng, 2, 2, 2);
    GarblingSpec z = garbling_identical_features(g, {0, 1});
    StrongAlignmentCert cert;
    cert.providers = {0, 1};
    cert.weights = {{0.5, 0.5}, {0.25, 0.75}};
    cert.intercepts = {0.0, 0.0};
    cert.eps = 0.25;

    std::vector<double> b = bounds_anonymous_dominant(g, cert, z);
    CHECK(b[0] == doctest::Approx(benchmark_shared(g, 0, z, g.rounds) - 2.0 * 0.25 / 0.5));
    CHECK(b[1] == doctest::Approx(benchmark_shared(g, 1, z, g.rounds) - 2.0 * 0.25 / 0.75));

    StrongAlignmentCert uncovered = cert;
    uncovered.weights = {{0.5, 0.0}, {0.25, 0.0}};
    CHECK_THROWS_AS(bounds_anonymous_dominant(g, uncovered, z), CoverageViolation);
    CHECK_THROWS_AS(bounds_anonymous_general(g, cert, z, {0.1, 0.1}), NotApplicable);  // R=1

    g.rounds = 2;
    std::vector<double> gen = bounds_anonymous_general(g, cert, z, {0.1, 0.2});
    // delta_i = min_j (Delta_j * sum_{i'!=i} lambda_{j,i'} / lambda_{j,i} + 2 eps / lambda_{j,i})
    double d0 = std::min(0.1 * 0.5 / 0.5 + 0.5 / 0.5, 0.2 * 0.75 / 0.25 + 0.5 / 0.25);
    CHECK(gen[0] == doctest::Approx(benchmark_shared(g, 0, z, 1) - d0));
}

TEST_CASE("delta_R recomputes from its definition") {
    std::mt19937_64 rng(29);
    GameInstance g = testutil::random_instance(rng, 2, 2, 2);
    g.rounds = 2;
    GarblingSpec z = garbling_identical_features(g, {0, 1});
    std::vector<ProviderRule> space = enumerate_deterministic_rules(g, 0);
    double expect = -1e9;
    for (int i = 0; i < 2; ++i) {
        double best = -1e9;
        for (const ProviderRule& rule : space)
            best = std::max(best, user_utility_against(g, i, rule, 0));
        expect = std::max(expect, best - benchmark_shared(g, i, z, 1));
    }
    CHECK(delta_R(g, 0, z, space) == doctest::Approx(expect).epsilon(1e-10));
}
