"""Small dense LP solver for maximization over the probability simplex
intersected with halfspaces.

Two-phase primal simplex on an explicit tableau with Bland's anti-cycling
rule.  Problems in this package have at most a couple of dozen variables and
constraints, so numerical sophistication is deliberately avoided in favour of
determinism and zero dependencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError

# All solver tolerances live here.
FEAS_TOL = 1e-7    # phase-1 acceptance / constraint satisfaction
PIVOT_TOL = 1e-10  # reduced-cost threshold and smallest usable pivot element
_MAX_ITERS = 20_000

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LPProblem:
    """Maximize objective^T x over the simplex cut by g^T x <= b rows.

    The simplex constraints (sum x = 1, x >= 0) are implicit; ``constraints``
    is a (k, m) matrix of row vectors g with right-hand sides ``bounds``.
    """

    objective: np.ndarray
    constraints: np.ndarray
    bounds: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.objective, dtype=float))
        G = np.asarray(self.constraints, dtype=float).reshape(-1, c.size)
        h = np.atleast_1d(np.asarray(self.bounds, dtype=float))
        if G.shape[0] != h.size:
            raise ValueError(f"{G.shape[0]} constraint rows but {h.size} bounds")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", G)
        object.__setattr__(self, "bounds", h)

    @property
    def simplex_dim(self) -> int:
        return self.objective.size


@dataclass(frozen=True)
class LPSolution:
    status: str
    x: np.ndarray | None = None
    value: float | None = None


def _pivot(tab: np.ndarray, basis: list[int], row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    for i in range(tab.shape[0]):
        if i != row and abs(tab[i, col]) > 0.0:
            tab[i] -= tab[i, col] * tab[row]
    basis[row] = col


def _bland_min(tab: np.ndarray, basis: list[int], cost: np.ndarray) -> np.ndarray:
    """Run minimizing simplex iterations on a tableau already in basic form.

    ``cost`` is the reduced-cost row (length = #columns incl. rhs).  Mutates
    tab/basis/cost in place; returns the final cost row.
    """
    n_cols = tab.shape[1] - 1
    for _ in range(_MAX_ITERS):
        entering = -1
        for j in range(n_cols):
            if cost[j] < -PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return cost
        # Ratio test; ties resolve to the smallest basic variable index.
        leaving, best_ratio = -1, np.inf
        for i in range(tab.shape[0]):
            a = tab[i, entering]
            if a > PIVOT_TOL:
                ratio = tab[i, -1] / a
                if ratio < best_ratio - PIVOT_TOL or (
                        abs(ratio - best_ratio) <= PIVOT_TOL
                        and (leaving < 0 or basis[i] < basis[leaving])):
                    leaving, best_ratio = i, ratio
        if leaving < 0:
            raise NumericError("LP is unbounded; expected a bounded feasible set")
        _pivot(tab, basis, leaving, entering)
        cost -= cost[entering] * tab[leaving]
    raise NumericError("simplex failed to converge")


def _solve_general(c: np.ndarray, G: np.ndarray, h: np.ndarray,
                   simplex_dim: int) -> LPSolution:
    """Maximize c over variables z >= 0 where z[:simplex_dim] lies on the
    simplex and G z <= h.  Slack and artificial variables are internal."""
    n_vars = c.size
    k = G.shape[0]
    n_rows = k + 1

    # Equality system: [G | I] z,s = h plus the simplex row sum(x) = 1.
    A = np.zeros((n_rows, n_vars + k))
    b = np.zeros(n_rows)
    A[:k, :n_vars] = G
    A[:k, n_vars:] = np.eye(k)
    b[:k] = h
    A[k, :simplex_dim] = 1.0
    b[k] = 1.0
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # Phase 1: artificial basis, minimize the artificial mass.
    n_total = A.shape[1]
    tab = np.hstack([A, np.eye(n_rows), b[:, None]])
    basis = list(range(n_total, n_total + n_rows))
    cost = np.zeros(tab.shape[1])
    cost[:n_total] = -A.sum(axis=0)
    cost[-1] = -b.sum()
    cost = _bland_min(tab, basis, cost)
    if -cost[-1] > FEAS_TOL:
        return LPSolution(status=INFEASIBLE)

    # Drive leftover artificials out of the basis, dropping redundant rows.
    keep = []
    for i in range(tab.shape[0]):
        if basis[i] < n_total:
            keep.append(i)
            continue
        pivot_col = -1
        for j in range(n_total):
            if abs(tab[i, j]) > PIVOT_TOL:
                pivot_col = j
                break
        if pivot_col >= 0:
            _pivot(tab, basis, i, pivot_col)
            keep.append(i)
    tab = np.hstack([tab[keep, :n_total], tab[keep, -1:]])
    basis = [basis[i] for i in keep]

    # Phase 2: maximize c, i.e. minimize -c.
    cost = np.zeros(tab.shape[1])
    cost[:n_vars] = -c
    for i, bv in enumerate(basis):
        if abs(cost[bv]) > 0.0:
            cost -= cost[bv] * tab[i]
    _bland_min(tab, basis, cost)

    z = np.zeros(n_total)
    for i, bv in enumerate(basis):
        z[bv] = tab[i, -1]
    x = z[:n_vars]
    return LPSolution(status=OPTIMAL, x=x, value=float(c @ x))


def _preprocess(G: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """Drop vacuous all-zero rows; detect trivially impossible ones."""
    keep = []
    for i in range(G.shape[0]):
        if np.max(np.abs(G[i]), initial=0.0) == 0.0:
            if h[i] < -FEAS_TOL:
                return None
            continue
        keep.append(i)
    return G[keep], h[keep]


def solve_lp(problem: LPProblem) -> LPSolution:
    """Solve max objective^T x over the constrained simplex.

    Returns a vertex-optimal solution, or an infeasible status.  Deterministic
    for a fixed input.
    """
    c, G, h = problem.objective, problem.constraints, problem.bounds
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(G)) and np.all(np.isfinite(h))):
        raise NumericError("LP data contains NaN or Inf")
    pre = _preprocess(G, h)
    if pre is None:
        return LPSolution(status=INFEASIBLE)
    G, h = pre
    sol = _solve_general(c, G, h, simplex_dim=c.size)
    if sol.status != OPTIMAL:
        return sol
    x = sol.x[:c.size].copy()
    x[x < 0] = 0.0
    return LPSolution(status=OPTIMAL, x=x, value=float(c @ x))


def feasible(constraints, bounds, simplex_dim: int | None = None) -> bool:
    """Whether {x on the simplex : constraints x <= bounds} is nonempty."""
    G = np.asarray(constraints, dtype=float)
    if G.ndim == 1:
        G = G.reshape(1, -1)
    if G.size == 0 and simplex_dim is None:
        return True
    dim = simplex_dim if simplex_dim is not None else G.shape[1]
    if G.size == 0:
        G = np.zeros((0, dim))
    h = np.asarray(bounds, dtype=float).reshape(-1)
    problem = LPProblem(objective=np.zeros(dim), constraints=G, bounds=h)
    return solve_lp(problem).status == OPTIMAL


def minimax_gap(M) -> float:
    """min over x on the simplex of max over columns j of x^T M[:, j].

    Solved via the standard reformulation: minimize s subject to
    x^T M[:, j] <= s for all j.  The free variable s is shifted by a constant
    so every variable stays nonnegative.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if not np.all(np.isfinite(M)):
        raise NumericError("minimax input contains NaN or Inf")
    m, ncols = M.shape
    shift = float(np.max(np.abs(M), initial=0.0)) + 1.0
    # Variables (x, u) with s = u - shift: maximize -u s.t. x^T M_j - u <= -shift.
    c = np.zeros(m + 1)
    c[m] = -1.0
    G = np.hstack([M.T, -np.ones((ncols, 1))])
    h = np.full(ncols, -shift)
    sol = _solve_general(c, G, h, simplex_dim=m)
    if sol.status != OPTIMAL:
        raise NumericError("minimax LP unexpectedly infeasible")
    return float(sol.x[m] - shift)
