#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "market/alignment.hpp"
#include "market/constructions.hpp"
#include "market/linprog.hpp"

using namespace market;

TEST_CASE("simplex solves small known programs") {
    // min -x - y  s.t. x + y + s = 1
    LpResult r = solve_lp_equality({{1, 1, 1}}, {1}, {-1, -1, 0});
    REQUIRE(r.feasible);
    CHECK(r.objective == doctest::Approx(-1.0));
    // infeasible: x + y = -1 with x, y >= 0
    CHECK_FALSE(solve_lp_equality({{1, 1}}, {-1}, {1, 1}).feasible);
    // degenerate/redundant rows
    r = solve_lp_equality({{1, 1}, {2, 2}}, {1, 2}, {1, 0});
    REQUIRE(r.feasible);
    CHECK(r.objective == doctest::Approx(0.0));
}

TEST_CASE("strict separation: weak holds exactly, strong floor is one half") {
    GameInstance g = make_strict_separation();

    WeakAlignmentCert weak;
    weak.providers = {0, 1};
    weak.components.resize(2);
    for (int j = 0; j < 2; ++j) {
        weak.components[j].resize(2);
        for (int i = 0; i < 2; ++i) {
            // F_{j,i}(a, y) = a * y_j / 2
            weak.components[j][i] = {{0.0, 0.0}, {j == 0 ? 0.5 : 0.0, j == 0 ? 0.0 : 0.5}};
        }
    }
    weak.provider_weights = {{1.0, 1.0}, {1.0, 1.0}};
    weak.provider_intercepts = {0.0, 0.0};
    weak.user_weights = {{0.5, 0.5}, {0.5, 0.5}};
    weak.user_intercepts = {0.0, 0.0};
    auto [ep, eu] = check_weak(g, weak);
    CHECK(ep == doctest::Approx(0.0));
    CHECK(eu == doctest::Approx(0.0));

    for (int j = 0; j < 2; ++j) {
        StrongAlignmentCert fit = fit_strong_exact(g, j, {0, 1});
        CHECK(fit.eps == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(check_strong(g, fit) == doctest::Approx(fit.eps));
    }
}

TEST_CASE("minimax fit is optimal against random candidate certificates") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        GameInstance g = testutil::random_instance(rng, 2, 2, 2);
        StrongAlignmentCert fit = fit_strong_exact(g, 0, {0, 1});
        CHECK(check_strong(g, fit) == doctest::Approx(fit.eps).epsilon(1e-9));
        for (int cand = 0; cand < 200; ++cand) {
            StrongAlignmentCert c;
            c.providers = {0};
            c.weights = {{2.0 * testutil::urand(rng), 2.0 * testutil::urand(rng)}};
            c.intercepts = {2.0 * testutil::urand(rng) - 1.0};
            CHECK(check_strong(g, c) >= fit.eps - 1e-9);
        }
    }
}

TEST_CASE("fit on exactly strong-aligned instances recovers residual zero") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 5; ++trial) {
        GameInstance g = testutil::random_exact_strong_instance(rng, 2, 3, 2);
        for (int j = 0; j < 2; ++j) CHECK(fit_strong_exact(g, j, {0, 1}).eps <= 1e-8);
    }
}

TEST_CASE("strong certificates imply weak ones with residuals (eps, 0)") {
    std::mt19937_64 rng(41);
    GameInstance g = testutil::random_instance(rng, 2, 2, 2);
    StrongAlignmentCert strong = fit_strong_exact(g, 0, {0, 1});
    if (strong.weights[0][0] <= 0.0) strong.weights[0][0] = 0.1;  // ensure coverage
    if (strong.weights[0][1] <= 0.0) strong.weights[0][1] = 0.1;
    strong.eps = check_strong(g, strong);
    WeakAlignmentCert weak = strong_implies_weak(g, strong);
    auto [ep, eu] = check_weak(g, weak);
    CHECK(ep == doctest::Approx(strong.eps).epsilon(1e-12));
    CHECK(eu == doctest::Approx(0.0));
}

TEST_CASE("certificate validation rejects bad shapes and coverage") {
    std::mt19937_64 rng(43);
    GameInstance g = testutil::random_instance(rng, 2, 2, 2);
    StrongAlignmentCert c;
    c.providers = {0};
    c.weights = {{0.5}};  // wrong user count
    c.intercepts = {0.0};
    CHECK_THROWS_AS(c.validate(g), DimensionMismatch);
    c.weights = {{0.5, -0.1}};
    CHECK_THROWS_AS(c.validate(g), ParameterViolation);

    WeakAlignmentCert w;
    w.providers = {0};
    w.components = {{g.user_utils[0], g.user_utils[1]}};
    w.provider_weights = {{1.0, 1.0}};
    w.provider_intercepts = {0.0};
    w.user_weights = {{1.0, 0.0}};  // user 1 uncovered
    w.user_intercepts = {0.0, 0.0};
    CHECK_THROWS_AS(w.validate(g), CoverageViolation);
}
