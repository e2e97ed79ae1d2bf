#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "helpers.hpp"
#include "market/constructions.hpp"
#include "market/serialization.hpp"

using namespace market;

TEST_CASE("game instances round-trip") {
    std::mt19937_64 rng(113);
    GameInstance g = testutil::random_instance(rng, 3, 2, 2);
    g.rounds = 2;
    GameInstance back = game_from_json(to_json(g));
    CHECK(back.states == g.states);
    CHECK(back.prior == g.prior);
    CHECK(back.user_utils == g.user_utils);
    CHECK(back.provider_utils == g.provider_utils);
    CHECK(back.rounds == g.rounds);
    CHECK(back.messages == g.messages);
}

TEST_CASE("provider rules and profiles round-trip") {
    std::mt19937_64 rng(127);
    GameInstance g = testutil::random_instance(rng, 2, 2, 2);
    ProviderRule rule = make_full_revelation_rule(g, 0);
    ProviderRule back = rule_from_json(to_json(rule));
    CHECK(back.rows == rule.rows);
    CHECK(back.deterministic == rule.deterministic);

    AnonymousProfile ap{{rule, constant_rule(g, 1, 1)}};
    AnonymousProfile ap2 = anonymous_profile_from_json(to_json(ap));
    REQUIRE(ap2.rules.size() == 2);
    for (int j = 0; j < 2; ++j) CHECK(ap2.rules[j].rows == ap.rules[j].rows);

    PersonalizedProfile pp;
    pp.rules = {{rule, rule}, {constant_rule(g, 1, 0), constant_rule(g, 1, 1)}};
    PersonalizedProfile pp2 = personalized_profile_from_json(to_json(pp));
    REQUIRE(pp2.rules.size() == 2);
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) CHECK(pp2.rules[j][i].rows == pp.rules[j][i].rows);
}

TEST_CASE("garblings and certificates round-trip") {
    std::mt19937_64 rng(131);
    GameInstance g = testutil::random_instance(rng, 2, 2, 2);
    GarblingSpec z = garbling_identical_features(g, {0, 1});
    GarblingSpec z2 = garbling_from_json(to_json(z));
    CHECK(z2.labels == z.labels);
    CHECK(z2.maps == z.maps);
    CHECK(z2.providers == z.providers);
    CHECK(z2.conditional == z.conditional);

    StrongAlignmentCert sc = fit_strong_exact(g, 0, {0, 1});
    StrongAlignmentCert sc2 = strong_cert_from_json(to_json(sc));
    CHECK(sc2.providers == sc.providers);
    CHECK(sc2.weights == sc.weights);
    CHECK(sc2.intercepts == sc.intercepts);
    CHECK(sc2.eps == sc.eps);
    if (sc.weights[0][0] <= 0.0) sc.weights[0][0] = 0.1;
    if (sc.weights[0][1] <= 0.0) sc.weights[0][1] = 0.1;
    WeakAlignmentCert wc = strong_implies_weak(g, sc);
    WeakAlignmentCert wc2 = weak_cert_from_json(to_json(wc));
    CHECK(wc2.components == wc.components);
    CHECK(wc2.provider_weights == wc.provider_weights);
    CHECK(wc2.user_weights == wc.user_weights);
    CHECK(wc2.eps_provider == wc.eps_provider);
    CHECK(wc2.eps_user == wc.eps_user);
}

TEST_CASE("report documents carry type, version, and witness") {
    std::mt19937_64 rng(137);
    GameInstance g = testutil::random_instance(rng, 2, 2, 2);
    AnonymousProfile prof{{constant_rule(g, 0, 0), constant_rule(g, 1, 0)}};
    DeviationClass cls;
    EquilibriumReport rep = verify_anonymous_NE(g, prof, cls);
    json j = to_json(rep);
    CHECK(j["type"] == "equilibrium_report");
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["pass"] == rep.pass);
    if (rep.witness)
        CHECK(j["witness"]["gain"] == rep.witness->gain);
    else
        CHECK(j["witness"].is_null());
}

TEST_CASE("wrong type or schema version raises SchemaError") {
    std::mt19937_64 rng(139);
    GameInstance g = testutil::random_instance(rng, 2, 2, 2);
    json j = to_json(g);
    json wrong_type = j;
    wrong_type["type"] = "provider_rule";
    CHECK_THROWS_AS(game_from_json(wrong_type), SchemaError);
    json wrong_version = j;
    wrong_version["schema_version"] = "2";
    CHECK_THROWS_AS(game_from_json(wrong_version), SchemaError);
    json missing = j;
    missing.erase("prior");
    CHECK_THROWS_AS(game_from_json(missing), SchemaError);
}

TEST_CASE("files round-trip through disk") {
    std::mt19937_64 rng(149);
    GameInstance g = testutil::random_instance(rng, 2, 2, 2);
    save_json(to_json(g), "/tmp/rt_game.json");
    GameInstance back = game_from_json(load_json("/tmp/rt_game.json"));
    CHECK(back.prior == g.prior);
    std::remove("/tmp/rt_game.json");
    CHECK_THROWS_AS(load_json("/tmp/rt_game.json"), SchemaError);
}
