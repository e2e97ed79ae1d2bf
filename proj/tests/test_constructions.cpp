#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "market/alignment.hpp"
#include "market/constructions.hpp"

using namespace market;

TEST_CASE("public example rejects out-of-range parameters") {
    CHECK_THROWS_AS(make_public_example(0.25, 0.5, 2, 2), ParameterViolation);  // M = c/eps
    CHECK_THROWS_AS(make_public_example(0.6, 0.5, 6, 2), ParameterViolation);  // eps >= c
    CHECK_THROWS_AS(make_public_example(0.1, 0.5, 6, 1), ParameterViolation);  // D <= 1
    CHECK_THROWS_AS(make_public_example(0.0, 0.5, 6, 2), ParameterViolation);
    CHECK_NOTHROW(make_public_example(0.1, 0.5, 6, 2));
}

TEST_CASE("public example structure and exact weak alignment") {
    GameInstance g = make_public_example(0.25, 0.5, 3, 2);  // M=3 > c/eps=2
    CHECK(g.num_users() == 2);
    CHECK(g.num_providers() == 2);
    CHECK(g.num_states() == 3);
    CHECK(g.rounds == 1);
    CHECK(g.user_utils[0][1][1] == doctest::Approx(0.5));   // match pays c
    CHECK(g.user_utils[1][3][0] == doctest::Approx(0.25));  // abstain pays eps
    CHECK(g.provider_util(0, {1, 3}, 1) == doctest::Approx(1.0));  // match + rival abstains
    CHECK(g.provider_util(0, {1, 1}, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(g.provider_util(1, {3, 1}, 1) == doctest::Approx(1.0));

    // exact weak alignment: F_{1,1}=match_1, F_{1,2}=abstain_2 and symmetric
    WeakAlignmentCert cert;
    cert.providers = {0, 1};
    cert.components.resize(2);
    auto match = [&](int i) {
        std::vector<std::vector<double>> F(4, std::vector<double>(3, 0.0));
        for (int y = 0; y < 3; ++y) F[y][y] = 1.0;
        (void)i;
        return F;
    };
    auto abstain = [&]() {
        std::vector<std::vector<double>> F(4, std::vector<double>(3, 0.0));
        for (int y = 0; y < 3; ++y) F[3][y] = 1.0;
        return F;
    };
    cert.components[0] = {match(0), abstain()};
    cert.components[1] = {abstain(), match(1)};
    cert.provider_weights = {{1.0 / 3.0, 2.0 / 3.0}, {2.0 / 3.0, 1.0 / 3.0}};
    cert.provider_intercepts = {0.0, 0.0};
    cert.user_weights = {{0.5, 0.25}, {0.25, 0.5}};
    cert.user_intercepts = {0.0, 0.0};
    auto [ep, eu] = check_weak(g, cert);
    CHECK(ep == doctest::Approx(0.0));
    CHECK(eu == doctest::Approx(0.0));
}

TEST_CASE("full revelation hands each user the matching payoff") {
    GameInstance g = make_public_example(0.25, 0.5, 3, 2);
    ProviderRule reveal = make_full_revelation_rule(g, 0);
    CHECK(user_utility_against(g, 0, reveal, 0) == doctest::Approx(0.5));
    // dominance among all deterministic rules
    for (const ProviderRule& rule : enumerate_deterministic_rules(g, 0))
        for (int i = 0; i < 2; ++i)
            CHECK(user_utility_against(g, i, reveal, 0) >=
                  user_utility_against(g, i, rule, 0) - 1e-12);
    GameInstance small = g;
    small.messages = {"m0", "m1"};
    CHECK_THROWS_AS(make_full_revelation_rule(small, 0), MessageSpaceTooSmall);
}

TEST_CASE("adding-users instance: silence beats disclosure for the provider") {
    GameInstance g = make_public_adding_users();
    ProviderRule silent = constant_rule(g, 0, 0);
    AnonymousProfile prof{{silent}};
    InducedDistribution joint = induced_joint(g, prof);
    CHECK(expected_provider_utilities(g, joint)[0] == doctest::Approx(2.0 / 3.0));
    CHECK(expected_user_utility(g, 0, joint) == doctest::Approx(2.0 / 3.0));
    CHECK(expected_user_utility(g, 1, joint) == doctest::Approx(2.0 / 3.0));

    AnonymousProfile reveal{{make_full_revelation_rule(g, 0)}};
    CHECK(expected_provider_utilities(g, induced_joint(g, reveal))[0] ==
          doctest::Approx(0.25));
    GarblingSpec z = garbling_identical_features(g, {0});
    CHECK(benchmark_shared(g, 0, z, 1) == doctest::Approx(1.0));
    CHECK(benchmark_shared(g, 1, z, 1) == doctest::Approx(1.0));
}

TEST_CASE("augment mixes provider utilities and keeps base tables intact") {
    std::mt19937_64 rng(61);
    GameInstance base = testutil::random_instance(rng, 2, 2, 2);
    AugmentedGameSpec spec;
    spec.actions = {"p0", "p1"};
    spec.utility = {{0.2, 0.8}, {0.7, 0.1}};
    spec.features = {"x"};
    spec.feature_dist = {1.0};
    spec.betas = {0.25, 0.5};
    spec.perturbation = {{1.0, 0.0}, {0.0, 1.0}};
    GameInstance aug = augment(base, spec);
    CHECK(aug.num_users() == 3);
    for (int i = 0; i < 2; ++i) CHECK(aug.user_utils[i] == base.user_utils[i]);
    CHECK(aug.provider_util(0, {1, 0, 1}, 1) ==
          doctest::Approx(0.75 * base.provider_util(0, {1, 0}, 1) + 0.25 * 1.0));
    CHECK(aug.provider_util(1, {0, 1, 0}, 0) ==
          doctest::Approx(0.5 * base.provider_util(1, {0, 1}, 0) + 0.5 * 1.0));

    // beta near zero leaves provider utilities essentially unchanged
    spec.betas = {1e-9, 1e-9};
    GameInstance tiny = augment(base, spec);
    CHECK(std::abs(tiny.provider_util(0, {1, 0, 0}, 1) - base.provider_util(0, {1, 0}, 1)) <=
          1e-9);

    spec.betas = {0.0, 0.5};
    CHECK_THROWS_AS(augment(base, spec), ParameterViolation);
    spec.betas = {0.25, 0.5};
    spec.perturbation = {{1.5, 0.0}, {0.0, 1.0}};
    CHECK_THROWS_AS(augment(base, spec), ParameterViolation);
}

TEST_CASE("identity elicitation: declaring the own branch is optimal") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 5; ++trial) {
        GameInstance g = testutil::random_instance(rng, 3, 3, 2);
        g.rounds = 2;  // user speaks round 1, provider round 2
        GarblingSpec z = garbling_identical_features(g, {0, 1});
        ProviderRule rule = make_identity_elicitation_rule(g, 0, z);
        for (int i = 0; i < 2; ++i) {
            auto [strat, value] = optimal_user_strategy(g, i, rule, 0);
            // the truthful branch gives the (R-1)-round shared benchmark
            CHECK(value >= benchmark_shared(g, i, z, 1) - 1e-10);
        }
    }
    GameInstance g = testutil::random_instance(rng, 2, 2, 2);
    GarblingSpec z = garbling_identical_features(g, {0, 1});
    CHECK_THROWS_AS(make_identity_elicitation_rule(g, 0, z), NotApplicable);  // R=1
    g.rounds = 2;
    g.messages = {"m0"};
    CHECK_THROWS_AS(make_identity_elicitation_rule(g, 0, z), MessageSpaceTooSmall);
}

TEST_CASE("strict separation matches its stated tables") {
    GameInstance g = make_strict_separation();
    CHECK(g.user_utils[0][1][0] == doctest::Approx(0.25));
    CHECK(g.provider_util(0, {1, 1}, 0) == doctest::Approx(1.0));
    CHECK(g.provider_util(0, {1, 1}, 1) == doctest::Approx(0.0));
    CHECK(g.provider_util(1, {1, 1}, 1) == doctest::Approx(1.0));
}
