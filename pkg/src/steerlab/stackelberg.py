"""Stackelberg equilibrium computation via per-facet linear programs.

The leader commits to a mixed action; the follower best-responds with a pure
action.  Restricting to the facet where column i is a best response turns the
commitment problem into one LP per column, and the equilibrium is the best
facet optimum.  Optimistic tie-breaking is realized structurally: boundary
points belong to every adjacent facet, so the max over facet LPs already picks
the follower action the leader prefers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError
from .facets import OPTIMISTIC, PESSIMISTIC, facet_constraints, margin_facet
from .game import EquivClassRep, GameInstance, equiv_class, simplex_grid
from .linprog import INFEASIBLE, OPTIMAL, LPProblem, solve_lp

MODE_EXACT = "exact"
MODE_OPTIMISTIC = "optimistic"
MODE_PESSIMISTIC = "pessimistic"
MODE_EXTRA_PESSIMISTIC = "extra-pessimistic"

STATUS_OK = "ok"
STATUS_ALL_INFEASIBLE = "all-infeasible"


@dataclass(frozen=True)
class FacetResult:
    """Outcome of one facet LP: the action index, LP status, and optimum."""

    action: int
    status: str  # OPTIMAL or INFEASIBLE
    value: float | None = None
    x: np.ndarray | None = None


@dataclass(frozen=True)
class StackelbergSolution:
    status: str
    mode: str
    x_star: np.ndarray | None = None
    response: int | None = None
    value: float | None = None
    per_facet: tuple[FacetResult, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "mode": self.mode,
            "value": self.value,
            "x_star": None if self.x_star is None else [float(v) for v in self.x_star],
            "response": self.response,
            "per_facet": [
                {"action": fr.action, "status": fr.status, "value": fr.value}
                for fr in self.per_facet
            ],
        }


def _argmax_result(results: list[FacetResult]) -> FacetResult | None:
    best = None
    for fr in results:
        if fr.status != OPTIMAL:
            continue
        # Strict improvement only: value ties stay with the lowest action index.
        if best is None or fr.value > best.value:
            best = fr
    return best


def _facet_lp_results(A: np.ndarray, systems: list[tuple[np.ndarray, np.ndarray]]) -> list[FacetResult]:
    results = []
    for i, (H, rhs) in enumerate(systems):
        sol = solve_lp(LPProblem(objective=A[:, i], constraints=H, bounds=rhs))
        if sol.status == OPTIMAL:
            results.append(FacetResult(action=i, status=OPTIMAL, value=sol.value, x=sol.x))
        else:
            results.append(FacetResult(action=i, status=INFEASIBLE))
    return results


def _best_vertex(column: np.ndarray) -> tuple[np.ndarray, float]:
    r = int(np.argmax(column))
    x = np.zeros(column.size)
    x[r] = 1.0
    return x, float(column[r])


def _assemble(mode: str, results: list[FacetResult],
              allow_all_infeasible: bool) -> StackelbergSolution:
    best = _argmax_result(results)
    if best is None:
        if allow_all_infeasible:
            return StackelbergSolution(status=STATUS_ALL_INFEASIBLE, mode=mode,
                                       per_facet=tuple(results))
        raise NumericError("every facet LP is infeasible, but the facets cover "
                           "the simplex; solver breakdown")
    return StackelbergSolution(status=STATUS_OK, mode=mode, x_star=best.x,
                               response=best.action, value=best.value,
                               per_facet=tuple(results))


def solve_exact(game: GameInstance) -> StackelbergSolution:
    """Exact Stackelberg equilibrium of the game (leader = optimizer)."""
    reps = [equiv_class(game.B, i) for i in range(game.n)]
    if reps[0].degenerate:
        # All learner columns identical: every action is always a best
        # response, so the optimistic value is the best matrix entry of A.
        results = []
        for i in range(game.n):
            x, v = _best_vertex(game.A[:, i])
            results.append(FacetResult(action=i, status=OPTIMAL, value=v, x=x))
        return _assemble(MODE_EXACT, results, allow_all_infeasible=False)
    systems = []
    for rep in reps:
        H = facet_constraints(rep)
        systems.append((H, np.zeros(H.shape[0])))
    results = _facet_lp_results(game.A, systems)
    return _assemble(MODE_EXACT, results, allow_all_infeasible=False)


def solve_margin(A, reps_hat: list[EquivClassRep], d: float, sign: str) -> StackelbergSolution:
    """Stackelberg LP over margin-relaxed (+d) or margin-tightened (-d) facets.

    Infeasible facets are recorded per facet, never raised.  When every
    pessimistic facet is infeasible the solution carries a distinguished
    all-infeasible status for the commit layer to inspect.
    """
    A = np.asarray(A, dtype=float)
    mode = MODE_OPTIMISTIC if sign == OPTIMISTIC else MODE_PESSIMISTIC
    systems = []
    for rep in reps_hat:
        mf = margin_facet(rep, d, sign)
        systems.append((mf.base, mf.rhs))
    results = _facet_lp_results(A, systems)
    return _assemble(mode, results, allow_all_infeasible=True)


def solve_extra_pessimistic(A, reps_hat: list[EquivClassRep], epsilon: float,
                            slack: float) -> StackelbergSolution:
    """Pessimistic commitment with total margin epsilon + slack.

    The extra slack buys strict dominance of the induced response despite both
    estimation error (epsilon) and the learner's regret budget; a natural
    default for the slack is sqrt(f(T)/T) for regret budget f.
    """
    if epsilon < 0 or slack < 0:
        raise ValueError("epsilon and slack must be nonnegative")
    sol = solve_margin(A, reps_hat, epsilon + slack, PESSIMISTIC)
    return StackelbergSolution(status=sol.status, mode=MODE_EXTRA_PESSIMISTIC,
                               x_star=sol.x_star, response=sol.response,
                               value=sol.value, per_facet=sol.per_facet)


def brute_force_oracle(game: GameInstance, resolution: int,
                       tol: float = 1e-9) -> tuple[np.ndarray, int, float]:
    """Independent grid oracle: enumerate the leader simplex at spacing
    1/resolution, score each point under optimistic best response, return the
    best (x, response, value)."""
    if game.m > 3:
        raise ValueError(f"grid oracle supports m <= 3, got m={game.m}")
    if resolution > 1000 or resolution < 1:
        raise ValueError("resolution must be in [1, 1000]")
    pts = simplex_grid(game.m, resolution)
    learner_scores = pts @ game.B
    opt_scores = pts @ game.A
    br_mask = learner_scores >= learner_scores.max(axis=1, keepdims=True) - tol
    values = np.where(br_mask, opt_scores, -np.inf).max(axis=1)
    best_idx = int(np.argmax(values))
    x = pts[best_idx]
    row_vals = np.where(br_mask[best_idx], opt_scores[best_idx], -np.inf)
    response = int(np.argmax(row_vals))
    return x, response, float(values[best_idx])
