from __future__ import annotations

import numpy as np
import pytest

from conftest import random_game, random_simplex_points
from steerlab.facets import OPTIMISTIC, PESSIMISTIC, sensitivity_constant
from steerlab.game import GameInstance, best_response_set, class_difference, equiv_class
from steerlab.linprog import OPTIMAL
from steerlab.stackelberg import (STATUS_ALL_INFEASIBLE, STATUS_OK,
                                  brute_force_oracle, solve_exact,
                                  solve_extra_pessimistic, solve_margin)

INSTANCE1 = GameInstance(A=[[5.0, 0.0], [0.0, 3.0]], B=[[-2.0, 2.0], [3.0, -3.0]])
LOWER_BOUND = GameInstance(A=[[0.0, 0.0], [3.0, 1.0]], B=np.eye(2))
KL_GAME = GameInstance(A=[[0.0, 1.0], [5.0, 0.0]], B=[[2.0, -2.0], [-3.0, 3.0]])
G1 = GameInstance(A=[[0.0, 0.0], [1.0, 0.1]], B=[[0.0, 0.1], [0.0, 1.0]])
G2 = GameInstance(A=[[0.0, 0.0], [1.0, 0.1]], B=np.eye(2))
PENNIES = GameInstance(A=[[1.0, -1.0], [-1.0, 1.0]], B=[[-1.0, 1.0], [1.0, -1.0]])


@pytest.mark.parametrize("game,value,x_star,response", [
    (INSTANCE1, 3.0, (0.6, 0.4), 0),
    (LOWER_BOUND, 1.5, (0.5, 0.5), 0),
    (G1, 0.1, (0.0, 1.0), 1),
    (G2, 0.5, (0.5, 0.5), 0),
    (PENNIES, 0.0, (0.5, 0.5), 0),
    (KL_GAME, 2.0, (0.6, 0.4), 0),
])
def test_solve_exact_known_games(game, value, x_star, response):
    sol = solve_exact(game)
    assert sol.status == STATUS_OK
    assert sol.value == pytest.approx(value, abs=1e-9)
    np.testing.assert_allclose(sol.x_star, x_star, atol=1e-9)
    assert sol.response == response


def test_solve_exact_response_is_best_response():
    for game in (INSTANCE1, LOWER_BOUND, KL_GAME, G1, G2):
        sol = solve_exact(game)
        assert sol.response in best_response_set(game.B, sol.x_star, tol=1e-7)
        assert sol.value == pytest.approx(float(sol.x_star @ game.A[:, sol.response]),
                                          abs=1e-7)


def test_solve_exact_degenerate_learner():
    # All learner columns identical: the solver short-circuits to the best
    # leader entry under optimistic tie-breaking.
    g = GameInstance(A=[[1.0, 4.0], [2.0, 0.5]], B=np.ones((2, 2)))
    sol = solve_exact(g)
    assert sol.value == pytest.approx(4.0)
    assert sol.response == 1
    np.testing.assert_allclose(sol.x_star, [1.0, 0.0])


def test_solve_margin_zero_equals_exact(rng):
    for _ in range(15):
        g = random_game(rng, 2, 3)
        reps = [equiv_class(g.B, i) for i in range(g.n)]
        exact = solve_exact(g)
        for sign in (OPTIMISTIC, PESSIMISTIC):
            margin0 = solve_margin(g.A, reps, 0.0, sign)
            assert margin0.value == pytest.approx(exact.value, abs=1e-9)


def test_solve_margin_lower_bound_hand_value():
    # Tightening facet 0 of the identity game by 0.05 means p >= 0.525, so the
    # column-0 optimum drops to 3 * 0.475 = 1.425, below the exact 1.5.
    reps = [equiv_class(LOWER_BOUND.B, i) for i in range(2)]
    sol = solve_margin(LOWER_BOUND.A, reps, 0.05, PESSIMISTIC)
    facet0 = sol.per_facet[0]
    assert facet0.status == OPTIMAL
    assert facet0.value == pytest.approx(1.425, abs=1e-9)
    assert facet0.value <= 1.5


def test_solve_margin_all_infeasible_status():
    reps = [equiv_class(np.eye(2), i) for i in range(2)]
    sol = solve_margin(np.eye(2), reps, 2.0, PESSIMISTIC)
    assert sol.status == STATUS_ALL_INFEASIBLE
    assert sol.x_star is None


def test_extra_pessimistic_zero_slack_matches_margin(rng):
    for _ in range(10):
        g = random_game(rng, 2, 2)
        reps = [equiv_class(g.B, i) for i in range(2)]
        a = solve_extra_pessimistic(g.A, reps, 0.07, 0.0)
        b = solve_margin(g.A, reps, 0.07, PESSIMISTIC)
        assert a.status == b.status
        if a.status == STATUS_OK:
            assert a.value == pytest.approx(b.value, abs=1e-12)


def test_extra_pessimistic_monotone_commitment_distance():
    # Larger margins push the committed point monotonically away from the
    # commitment optimum (3/5, 2/5) of the mirror-ascent steering game.
    reps = [equiv_class(KL_GAME.B, i) for i in range(2)]
    x_star = np.array([0.6, 0.4])
    dists = []
    for d in (0.01, 0.02, 0.05):
        sol = solve_extra_pessimistic(KL_GAME.A, reps, d, 0.0)
        assert sol.status == STATUS_OK
        dists.append(float(np.abs(sol.x_star - x_star).sum()))
    assert dists[0] < dists[1] < dists[2]


def test_extra_pessimistic_rejects_negative_inputs():
    reps = [equiv_class(np.eye(2), i) for i in range(2)]
    with pytest.raises(ValueError):
        solve_extra_pessimistic(np.eye(2), reps, -0.1, 0.0)
    with pytest.raises(ValueError):
        solve_extra_pessimistic(np.eye(2), reps, 0.1, -0.5)


def test_brute_force_oracle_instance1():
    _, _, value = brute_force_oracle(INSTANCE1, 1000)
    assert abs(value - 3.0) <= 10 * np.max(np.abs(INSTANCE1.A)) / 1000


def test_brute_force_oracle_resolution_one():
    # Only the two vertices are on the grid; the best vertex wins.
    _, _, value = brute_force_oracle(LOWER_BOUND, 1)
    vertex_vals = []
    for r in range(2):
        xv = np.zeros(2)
        xv[r] = 1.0
        vertex_vals.append(max(float(xv @ LOWER_BOUND.A[:, j])
                               for j in best_response_set(LOWER_BOUND.B, xv)))
    assert value == pytest.approx(max(vertex_vals))


def test_brute_force_oracle_matching_pennies():
    x, _, value = brute_force_oracle(PENNIES, 500)
    assert abs(value) <= 4 * 1.0 / 500
    np.testing.assert_allclose(x, [0.5, 0.5], atol=1e-9)


def test_brute_force_oracle_guards():
    with pytest.raises(ValueError):
        brute_force_oracle(GameInstance(A=np.eye(4), B=np.eye(4)), 10)
    with pytest.raises(ValueError):
        brute_force_oracle(PENNIES, 2000)


def test_oracle_equivalence_random_games(rng):
    for trial in range(100):
        m = 2 if trial % 2 == 0 else 3
        g = random_game(rng, m, m)
        sol = solve_exact(g)
        _, _, grid_value = brute_force_oracle(g, 500)
        tol = 4 * np.max(np.abs(g.A)) / 500
        assert abs(sol.value - grid_value) <= tol


def test_value_sandwich_with_estimated_class(rng):
    # With d at least the class distance, per-facet pessimistic <= exact <=
    # optimistic whenever all three are feasible.
    for _ in range(40):
        g = random_game(rng, 3, 3)
        noise = rng.uniform(-0.05, 0.05, size=g.B.shape)
        b_hat = g.B + noise
        reps = [equiv_class(g.B, i) for i in range(g.n)]
        reps_hat = [equiv_class(b_hat, i) for i in range(g.n)]
        d = max(class_difference(r, rh) for r, rh in zip(reps, reps_hat)) + 1e-12
        exact = solve_exact(g)
        opt = solve_margin(g.A, reps_hat, d, OPTIMISTIC)
        pes = solve_margin(g.A, reps_hat, d, PESSIMISTIC)
        for i in range(g.n):
            fe, fo, fp = exact.per_facet[i], opt.per_facet[i], pes.per_facet[i]
            if fe.status == OPTIMAL and fo.status == OPTIMAL:
                assert fe.value <= fo.value + 1e-7
            if fe.status == OPTIMAL and fp.status == OPTIMAL:
                assert fp.value <= fe.value + 1e-7


def test_point_sandwich_with_estimated_class(rng):
    # Set inclusions behind the value sandwich: pessimistic system -> exact
    # system -> optimistic system, pointwise on samples.
    from steerlab.facets import facet_constraints, margin_facet
    for _ in range(40):
        m, n = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        g = random_game(rng, m, n)
        b_hat = g.B + rng.uniform(-0.05, 0.05, size=g.B.shape)
        for i in range(n):
            rep = equiv_class(g.B, i)
            rep_hat = equiv_class(b_hat, i)
            d = class_difference(rep, rep_hat) + 1e-12
            H = facet_constraints(rep)
            opt = margin_facet(rep_hat, d, OPTIMISTIC)
            pes = margin_facet(rep_hat, d, PESSIMISTIC)
            for x in random_simplex_points(rng, 30, m):
                exact_in = bool(np.all(H @ x <= 1e-12))
                if pes.contains(x):
                    assert exact_in
                if exact_in:
                    assert opt.contains(x)


def test_pessimistic_value_loss_bounded_by_hausdorff(rng):
    # On the segment, V_i - V_i^- <= d' * ||A[:, i]||_inf with d' the sampled
    # one-sided Hausdorff gap between the facet and its tightened version.
    grid = np.linspace(0.0, 1.0, 2001)
    pts = np.column_stack([grid, 1.0 - grid])
    for _ in range(30):
        g = random_game(rng, 2, 2)
        reps = [equiv_class(g.B, i) for i in range(2)]
        d = rng.uniform(0.01, 0.2)
        exact = solve_exact(g)
        pes = solve_margin(g.A, reps, d, PESSIMISTIC)
        for i in range(2):
            fe, fp = exact.per_facet[i], pes.per_facet[i]
            if fe.status != OPTIMAL or fp.status != OPTIMAL:
                continue
            H = reps[i].columns.T
            in_exact = np.all(pts @ H.T <= 1e-12, axis=1)
            in_pes = np.all(pts @ H.T <= -d + 1e-12, axis=1)
            if not in_pes.any():
                continue
            dists = np.abs(grid[in_exact][:, None] - grid[in_pes][None, :]).min(axis=1)
            d_haus = 2.0 * dists.max() + 2e-3  # L1 distance on the segment + grid slack
            bound = d_haus * np.max(np.abs(g.A[:, i]))
            assert fe.value - fp.value <= bound + 1e-9


def test_margin_value_monotonicity(rng):
    for _ in range(20):
        g = random_game(rng, 2, 3)
        reps = [equiv_class(g.B, i) for i in range(g.n)]
        pes_vals, opt_vals = [], []
        for d in (0.0, 0.05, 0.1, 0.2):
            pes = solve_margin(g.A, reps, d, PESSIMISTIC)
            opt = solve_margin(g.A, reps, d, OPTIMISTIC)
            pes_vals.append(-np.inf if pes.status != STATUS_OK else pes.value)
            opt_vals.append(opt.value)
        assert all(a >= b - 1e-9 for a, b in zip(pes_vals, pes_vals[1:]))
        assert all(b >= a - 1e-9 for a, b in zip(opt_vals, opt_vals[1:]))


def test_optimistic_pessimistic_gap_obeys_sensitivity_bound(rng):
    # Numeric form of the sensitivity lemma on random 2x2 games with exact
    # class estimates and d below 1 / (2 Sen).
    checked = 0
    while checked < 50:
        g = random_game(rng, 2, 2)
        reps = [equiv_class(g.B, i) for i in range(2)]
        if reps[0].degenerate:
            continue
        for i in range(2):
            M = reps[i].columns.T
            sen = sensitivity_constant(M)
            d = rng.uniform(0.0, 1.0 / (2.0 * sen))
            opt = solve_margin(g.A, reps, d, OPTIMISTIC).per_facet[i]
            pes = solve_margin(g.A, reps, d, PESSIMISTIC).per_facet[i]
            if opt.status != OPTIMAL or pes.status != OPTIMAL:
                continue
            bound = 4.0 * d * np.max(np.abs(g.A[:, i])) * sen + 1e-6
            assert opt.value - pes.value <= bound
            checked += 1
