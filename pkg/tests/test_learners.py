from __future__ import annotations

import numpy as np
import pytest

from conftest import random_game, random_simplex_points
from steerlab.errors import ConfigError
from steerlab.game import GameInstance, Trace, best_response_set, trajectory_regret
from steerlab.learners import (BudgetLearner, FixedActionLearner, KlMirrorLearner,
                               OgaLearner, SwitcherLearner, budget_learner_plan,
                               kl_mirror_step, make_learner, oga_step,
                               project_on_simplex)

INSTANCE1_B = np.array([[-2.0, 2.0], [3.0, -3.0]])


def test_projection_basics(rng):
    np.testing.assert_allclose(project_on_simplex([0.7, 0.5]), [0.6, 0.4], atol=1e-12)
    np.testing.assert_allclose(project_on_simplex([5.0, -3.0]), [1.0, 0.0], atol=1e-12)
    for _ in range(50):
        v = rng.normal(0, 3, size=int(rng.integers(2, 6)))
        p = project_on_simplex(v)
        assert np.all(p >= 0)
        assert np.sum(p) == pytest.approx(1.0, abs=1e-9)


def test_projection_is_euclidean_argmin(rng):
    # Cross-check against a dense candidate search on the 2-simplex.
    grid = np.linspace(0, 1, 2001)
    pts = np.column_stack([grid, 1 - grid])
    for _ in range(20):
        v = rng.normal(0, 2, size=2)
        p = project_on_simplex(v)
        best = pts[np.argmin(((pts - v) ** 2).sum(axis=1))]
        assert np.abs(p - best).max() <= 1e-3


def test_oga_step_uniform_gradient_is_fixed_point():
    y = np.array([0.3, 0.7])
    B = np.ones((2, 2)) * 4.2  # gradient is a uniform vector
    np.testing.assert_allclose(oga_step(y, [0.5, 0.5], B, 0.7), y, atol=1e-12)


def test_oga_step_hand_projection():
    got = oga_step([0.5, 0.5], [1.0, 0.0], np.eye(2), 0.2)
    np.testing.assert_allclose(got, [0.6, 0.4], atol=1e-12)


def test_oga_converges_to_best_response():
    # Fixed leader point with a unique follower best response.
    learner = OgaLearner(INSTANCE1_B, eta0=1.0)
    x = np.array([0.3, 0.7])  # column 0 wins: 3 - 5p = 1.5 > -1.5
    for _ in range(100_000):
        learner.observe(x)
    assert np.abs(learner.y - np.array([1.0, 0.0])).sum() < 0.05


def test_kl_step_uniform_gradient_is_fixed_point():
    y = np.array([0.25, 0.75])
    np.testing.assert_allclose(kl_mirror_step(y, [0.5, 0.5], np.ones((2, 2)), 1.0),
                               y, atol=1e-12)


def test_kl_step_hand_value():
    got = kl_mirror_step([0.5, 0.5], [1.0, 0.0], np.eye(2), 1.0)
    e = np.e
    np.testing.assert_allclose(got, [e / (e + 1), 1 / (e + 1)], atol=1e-12)


def test_kl_step_rejects_boundary_point():
    with pytest.raises(ValueError):
        kl_mirror_step([1.0, 0.0], [1.0, 0.0], np.eye(2), 1.0)


def test_kl_step_kkt_identity(rng):
    # eta * grad D(y'||y) - B^T x - xi must be a uniform vector: the update's
    # first-order condition up to the simplex multiplier.
    for _ in range(20):
        n = int(rng.integers(2, 5))
        B = rng.uniform(-3, 3, size=(3, n))
        x = random_simplex_points(rng, 1, 3)[0]
        y = random_simplex_points(rng, 1, n)[0] + 0.01
        y /= y.sum()
        xi = rng.normal(0, 0.1, size=n)
        eta = rng.uniform(0.5, 3.0)
        y_next = kl_mirror_step(y, x, B, eta, noise=xi)
        grad_div = np.log(y_next / y) + 1.0
        resid = eta * grad_div - (B.T @ x + xi)
        assert np.max(resid) - np.min(resid) <= 1e-8


@pytest.mark.parametrize("kind", ["oga", "kl"])
def test_ascent_property(rng, kind):
    # Against any fixed leader point the follower's payoff never decreases,
    # and strictly increases while off the best response.
    for trial in range(15):
        g = random_game(rng, 2, int(rng.integers(2, 4)))
        x = random_simplex_points(rng, 1, 2)[0]
        if kind == "oga":
            learner = OgaLearner(g.B, eta0=0.5)
        else:
            learner = KlMirrorLearner(g.B, eta0=1.0, noise_scale=0.0)
        scores = x @ g.B
        best = scores.max()
        prev = float(scores @ learner.act())
        for _ in range(200):
            learner.observe(x)
            cur = float(scores @ learner.act())
            assert cur >= prev - 1e-10
            if best - prev > 1e-6:
                assert cur > prev
            prev = cur


@pytest.mark.parametrize("kind", ["oga", "kl"])
def test_simplex_preservation(rng, kind):
    g = random_game(rng, 3, 3)
    learner = OgaLearner(g.B, eta0=2.0) if kind == "oga" else \
        KlMirrorLearner(g.B, eta0=0.5, noise_scale=0.3, rng=rng)
    for _ in range(300):
        y = learner.act()
        assert np.all(y >= -1e-12)
        assert np.sum(y) == pytest.approx(1.0, abs=1e-9)
        learner.observe(random_simplex_points(rng, 1, 3)[0])


@pytest.mark.parametrize("kind", ["oga", "kl"])
def test_no_regret_scaling(kind):
    # Regret grows compatibly with sqrt(T): the ratio of regret / sqrt(T)
    # between successive horizons stays below 3.5.
    game = GameInstance(A=np.eye(2), B=INSTANCE1_B)
    ratios = []
    for T in (1_000, 10_000, 100_000):
        rng = np.random.default_rng(7)
        learner = (OgaLearner(game.B, eta0=1.0) if kind == "oga"
                   else KlMirrorLearner(game.B, eta0=1.0, noise_scale=0.0))
        ps = rng.uniform(0.0, 1.0, size=T)
        xs = np.column_stack([ps, 1.0 - ps])
        ys = np.empty((T, 2))
        for t in range(T):
            ys[t] = learner.act()
            learner.observe(xs[t])
        po = np.einsum("ti,ij,tj->t", xs, game.A, ys)
        pl = np.einsum("ti,ij,tj->t", xs, game.B, ys)
        trace = Trace(xs=xs, ys=ys, payoff_opt=po, payoff_learner=pl, game=game)
        ratios.append(trajectory_regret(game.B, trace) / np.sqrt(T))
    assert ratios[1] / ratios[0] <= 3.5
    assert ratios[2] / ratios[1] <= 3.5


def test_switcher_stays_put_against_reference_optimum():
    g1_a = np.array([[0.0, 0.0], [1.0, 0.1]])
    learner = SwitcherLearner(np.eye(2), g1_a, epsilon=0.1, threshold=50.0)
    x_star = np.array([0.0, 1.0])
    for _ in range(5000):
        y = learner.act()
        np.testing.assert_array_equal(y, [0.0, 1.0])
        learner.observe(x_star)
    assert not learner.switched
    assert learner.running_regret == pytest.approx(0.0, abs=1e-9)


def test_switcher_switch_round_under_constant_pressure():
    # x = (1, 0) earns the reference target nothing, so the running deficit
    # grows by epsilon per round and the switch lands after ceil(thr/eps)
    # sticky rounds.
    g1_a = np.array([[0.0, 0.0], [1.0, 0.1]])
    threshold, eps = 2.0, 0.1
    learner = SwitcherLearner(np.eye(2), g1_a, epsilon=eps, threshold=threshold)
    x = np.array([1.0, 0.0])
    sticky = 0
    for _ in range(100):
        y = learner.act()
        if not learner.switched:
            sticky += 1
            np.testing.assert_array_equal(y, [0.0, 1.0])
        learner.observe(x)
        if learner.switched:
            break
    assert sticky == int(np.ceil(threshold / eps))
    assert learner.switched


def test_switcher_infinite_threshold_acts_fixed(rng):
    g1_a = np.array([[0.0, 0.0], [1.0, 0.1]])
    learner = SwitcherLearner(np.eye(2), g1_a, epsilon=0.1, threshold=np.inf)
    for _ in range(200):
        np.testing.assert_array_equal(learner.act(), [0.0, 1.0])
        learner.observe(random_simplex_points(rng, 1, 2)[0])
    assert not learner.switched


def test_budget_plan_branches():
    plan = budget_learner_plan([0.4, 0.6], 100.0, 1000)
    assert plan.prefix_rounds == 1000  # x2 >= x1: stick to column 1 forever
    plan = budget_learner_plan([0.75, 0.25], 100.0, 1000)
    assert plan.prefix_rounds == 200  # 100 / (1 - 0.5)
    assert plan.column(200) == 1 and plan.column(201) == 0
    with pytest.raises(ValueError):
        budget_learner_plan([0.6, 0.6], 10.0, 100)


def test_budget_learner_regret_equals_budget():
    # Realized regret equals the budget exactly, up to floor rounding.
    game = GameInstance(A=[[0.0, 0.0], [3.0, 1.0]], B=np.eye(2))
    T, budget = 20_000, 500.0
    x = np.array([0.8, 0.2])
    learner = BudgetLearner(budget=budget, horizon=T)
    xs = np.tile(x, (T, 1))
    ys = np.empty((T, 2))
    for t in range(T):
        ys[t] = learner.act()
        learner.observe(x)
    po = np.einsum("ti,ij,tj->t", xs, game.A, ys)
    pl = np.einsum("ti,ij,tj->t", xs, game.B, ys)
    trace = Trace(xs=xs, ys=ys, payoff_opt=po, payoff_learner=pl, game=game)
    regret = trajectory_regret(game.B, trace)
    assert abs(regret - budget) <= (1.0 - 2 * 0.2)  # one round of floor slack


def test_make_learner_specs(rng):
    B = np.eye(2)
    assert isinstance(make_learner({"kind": "oga", "eta0": 0.5}, B, 10), OgaLearner)
    assert isinstance(make_learner({"kind": "kl", "noise": 0.1}, B, 10, rng=rng),
                      KlMirrorLearner)
    assert isinstance(make_learner({"kind": "fixed", "y": [0.0, 1.0]}, B, 10),
                      FixedActionLearner)
    assert isinstance(make_learner(
        {"kind": "switcher", "reference_a": [[0.0, 0.0], [1.0, 0.1]],
         "epsilon": 0.1, "threshold": 10.0}, B, 10), SwitcherLearner)
    assert isinstance(make_learner({"kind": "budget", "budget": 5.0}, B, 10),
                      BudgetLearner)
    with pytest.raises(ConfigError):
        make_learner({"kind": "nope"}, B, 10)
    with pytest.raises(ConfigError):
        make_learner({"kind": "fixed"}, B, 10)
    with pytest.raises(ConfigError):
        make_learner({"kind": "oga", "eta0": -1.0}, B, 10)
