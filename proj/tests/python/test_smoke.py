import math

import pytest

import pluralism as pl


def test_public_example_equilibrium():
    g = pl.make_public_example(eps=0.25, c=0.5, M=3, D=2)
    assert g.num_users == 2 and g.num_providers == 2 and g.num_states == 3
    rules = [pl.constant_rule(g, 0, 0), pl.constant_rule(g, 1, 0)]
    rep = pl.verify_anonymous(g, rules)
    assert rep["pass"]
    assert rep["max_gain"] <= 1e-9
    for u in rep["user_utilities"]:
        assert math.isclose(u, 0.25, abs_tol=1e-9)
    for i in range(2):
        assert math.isclose(pl.benchmark(g, i, [0, 1], 1), 0.5, abs_tol=1e-9)


def test_game_json_round_trip():
    g = pl.make_strict_separation()
    back = pl.GameInstance.from_json(g.to_json())
    assert back.states == g.states
    assert back.prior == g.prior
    assert back.user_utils == g.user_utils


def test_strong_fit_and_check():
    g = pl.make_strict_separation()
    cert = pl.fit_strong_exact(g, 0, [0, 1])
    assert math.isclose(cert["eps"], 0.5, abs_tol=1e-6)
    import json

    assert math.isclose(pl.check_strong(g, json.dumps(cert)), cert["eps"], abs_tol=1e-9)


def test_pure_equilibria_listing():
    g = pl.make_public_example(eps=0.25, c=0.5, M=3, D=2)
    eqs = pl.pure_equilibria(g, personalized=False)
    assert all(e["report"]["pass"] for e in eqs)


def test_nnls():
    res = pl.solve_nnls([[1.0, 0.0], [0.0, 1.0]], [1.0, -2.0], fit_intercept=False)
    assert math.isclose(res["weights"][0], 1.0, abs_tol=1e-12)
    assert res["weights"][1] == 0.0
    assert res["kkt_violation"] <= 1e-8


def test_score_transform_and_dataset(tmp_path):
    v = pl.score_transform([0.5, 0.5], "brier")
    assert all(math.isclose(x, 0.75, abs_tol=1e-12) for x in v)

    gfile = tmp_path / "groups.csv"
    mfile = tmp_path / "models.csv"
    gfile.write_text(
        "question_id,wave,group,option_index,probability\n"
        + "".join(
            f"q{q},W1,g0,{a},{p}\n"
            for q in range(10)
            for a, p in enumerate([0.25, 0.75])
        )
    )
    mfile.write_text(
        "question_id,wave,model,option_index,probability\n"
        + "".join(
            f"q{q},W1,m{j},{a},{p}\n"
            for q in range(10)
            for j, dist in enumerate([[0.25, 0.75], [0.9, 0.1]])
            for a, p in enumerate(dist)
        )
    )
    ds = pl.load_dataset(str(gfile), str(mfile))
    assert ds.num_questions == 10
    rep = pl.fit_weak_user(ds, 0, [0, 1], score="linear", folds=2, seed=1)
    assert rep["full_rmse"] <= 1e-9  # model 0 matches the group exactly
    base = pl.baselines(ds, 0)
    assert base["best_single_provider"] == 0


def test_errors_surface_as_python_exceptions():
    with pytest.raises(pl.MarketError):
        pl.make_public_example(eps=0.5, c=0.25, M=3, D=2)
