"""Best-response facets of the optimizer simplex.

For each learner pure action i, the facet is the polytope of optimizer mixed
actions to which i is a best response.  Facets, their margin-tightened or
margin-relaxed variants, inducibility gaps, and the sensitivity constant used
in suboptimality bounds are all derived from the normalized payoff-class
representation, so margins are comparable across games.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .game import EquivClassRep, equiv_class, simplex_grid
from .linprog import feasible, minimax_gap

OPTIMISTIC = "optimistic"
PESSIMISTIC = "pessimistic"

# Facet identification statuses.
NONEMPTY_CERTIFIED = "nonempty-certified"
EMPTY_CERTIFIED = "empty-certified"
UNDETERMINED = "undetermined"

_DEFAULT_EPS_GRID = tuple(np.logspace(-3.0, 3.0, 25))


def facet_constraints(rep: EquivClassRep) -> np.ndarray:
    """Halfspace system H (shape (n-1, m)) with facet = {x : H x <= 0}."""
    if rep.degenerate:
        raise ValueError("degenerate payoff class: every action is always a best "
                         "response, there is no facet system")
    return rep.columns.T.copy()


@dataclass(frozen=True)
class MarginFacet:
    """A facet system relaxed (+d) or tightened (-d) by a margin."""

    base: np.ndarray  # (n-1, m) halfspace matrix from the estimated class
    margin: float
    sign: str  # OPTIMISTIC or PESSIMISTIC

    @property
    def rhs(self) -> np.ndarray:
        s = 1.0 if self.sign == OPTIMISTIC else -1.0
        return np.full(self.base.shape[0], s * self.margin)

    def contains(self, x, tol: float = 1e-12) -> bool:
        return bool(np.all(self.base @ np.asarray(x, dtype=float) <= self.rhs + tol))


def margin_facet(rep_hat: EquivClassRep, d: float, sign: str) -> MarginFacet:
    """Constraints (B_i^o)^T x <= +d (optimistic) or <= -d (pessimistic)."""
    if d < 0:
        raise ValueError(f"margin must be nonnegative, got {d}")
    if sign not in (OPTIMISTIC, PESSIMISTIC):
        raise ValueError(f"sign must be {OPTIMISTIC!r} or {PESSIMISTIC!r}")
    return MarginFacet(base=facet_constraints(rep_hat), margin=float(d), sign=sign)


def inducibility_gap(rep: EquivClassRep) -> float:
    """min over x of the worst constraint value; positive iff the facet is empty."""
    if rep.degenerate:
        raise ValueError("degenerate payoff class has no inducibility gap")
    return minimax_gap(rep.columns)


@dataclass(frozen=True)
class FacetSystem:
    """Per-learner-action halfspace systems with gaps and emptiness flags."""

    halfspaces: tuple[np.ndarray, ...]
    gaps: tuple[float, ...]
    empty: tuple[bool, ...]

    @property
    def n(self) -> int:
        return len(self.halfspaces)

    def membership(self, x, tol: float = 1e-9) -> list[bool]:
        x = np.asarray(x, dtype=float)
        return [bool(np.all(H @ x <= tol)) for H in self.halfspaces]


def facet_system(B) -> FacetSystem:
    """Build the full facet system of a learner payoff matrix.

    A degenerate B (all columns identical) yields all-zero halfspace rows, so
    every facet is the whole simplex.
    """
    B = np.asarray(B, dtype=float)
    n = B.shape[1]
    systems, gaps, empty = [], [], []
    for i in range(n):
        rep = equiv_class(B, i)
        H = rep.columns.T.copy()  # zero rows when degenerate: facet = simplex
        gap = 0.0 if rep.degenerate else inducibility_gap(rep)
        systems.append(H)
        gaps.append(gap)
        empty.append(gap > 0)
    return FacetSystem(halfspaces=tuple(systems), gaps=tuple(gaps), empty=tuple(empty))


def identify_facets(reps_hat: list[EquivClassRep], d: float) -> list[str]:
    """Decide facet emptiness from estimated classes with margin d.

    An infeasible optimistic facet certifies emptiness; a feasible pessimistic
    facet certifies non-emptiness.  When the optimistic facet is feasible but
    the pessimistic one is not, the status is undetermined and the caller must
    shrink d.
    """
    if d < 0:
        raise ValueError(f"margin must be nonnegative, got {d}")
    statuses = []
    for rep in reps_hat:
        opt = margin_facet(rep, d, OPTIMISTIC)
        if not feasible(opt.base, opt.rhs):
            statuses.append(EMPTY_CERTIFIED)
            continue
        pes = margin_facet(rep, d, PESSIMISTIC)
        if feasible(pes.base, pes.rhs):
            statuses.append(NONEMPTY_CERTIFIED)
        else:
            statuses.append(UNDETERMINED)
    return statuses


def sensitivity_constant(M, eps_grid=None) -> float:
    """Worst-case infinity norm of inverses of invertible square submatrices of
    M stacked over a scaled all-ones row, minimized over the row scale.

    The scale minimization runs over a finite log-spaced grid, so the result is
    an upper-bound approximation of the true infimum.  Diagnostic only: used in
    reported suboptimality bounds, never in steering decisions.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    rows, m = M.shape
    if rows + 1 > 7 or m > 7:
        raise ValueError(f"enumeration bound exceeded for shape {M.shape}; "
                         "supports at most a 7-row stack and 7 columns")
    if eps_grid is None:
        eps_grid = _DEFAULT_EPS_GRID
    if not len(eps_grid):
        raise ValueError("eps_grid must be nonempty")

    best = np.inf
    for eps in eps_grid:
        stacked = np.vstack([M, float(eps) * np.ones(m)])
        worst = _max_inverse_norm(stacked)
        best = min(best, worst)
    return float(best)


def _max_inverse_norm(S: np.ndarray) -> float:
    """Max infinity norm of the inverse over all invertible square submatrices."""
    n_rows, n_cols = S.shape
    worst = 0.0
    for k in range(1, min(n_rows, n_cols) + 1):
        for P in itertools.combinations(range(n_rows), k):
            rows = S[list(P)]
            for Q in itertools.combinations(range(n_cols), k):
                sub = rows[:, list(Q)]
                # Invertibility guard: |det| relative to the row-norm product,
                # so near-singular submatrices never count as invertible.
                scale = float(np.prod(np.maximum(np.max(np.abs(sub), axis=1), 1e-300)))
                det = float(np.linalg.det(sub))
                if abs(det) <= 1e-10 * scale:
                    continue
                inv_norm = float(np.max(np.sum(np.abs(np.linalg.inv(sub)), axis=1)))
                worst = max(worst, inv_norm)
    return worst


def facet_membership_grid(B, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Sample facet membership over a simplex grid (m <= 3).

    Returns (points, membership) where points is (N, m) and membership is a
    boolean (N, n) array; used by the CLI to emit plottable facet diagrams.
    """
    B = np.asarray(B, dtype=float)
    m = B.shape[0]
    if m not in (2, 3):
        raise ValueError(f"facet grids support m in {{2, 3}}, got m={m}")
    pts = simplex_grid(m, resolution)
    # Membership by best-response scores; equivalent to the halfspace view
    # (exercised in tests) but a single matrix product for the whole grid.
    scores = pts @ B
    best = scores.max(axis=1, keepdims=True)
    member = scores >= best - 1e-9
    return pts, member
