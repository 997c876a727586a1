"""Core bimatrix game types: payoffs, best responses, regrets, payoff-class reps.

Conventions: the optimizer is the row player with payoff matrix A, the learner
is the column player with payoff matrix B.  Mixed strategies are numpy vectors
on the probability simplex.  All action indices are 0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ConfigError, NumericError

# Simplex membership tolerances: entries may dip slightly negative after
# floating-point arithmetic, the total must stay close to one.
ENTRY_TOL = 1e-12
SUM_TOL = 1e-9

# Default tie tolerance for best-response sets; exposed because facet-boundary
# tests need to widen it.
BR_TIE_TOL = 1e-9


def as_simplex(v, *, name: str = "vector") -> np.ndarray:
    """Validate that ``v`` lies on the probability simplex and return it as a
    read-only float array."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"{name} contains non-finite entries")
    if np.min(arr) < -ENTRY_TOL:
        raise ValueError(f"{name} has a negative entry: min={np.min(arr)}")
    total = float(np.sum(arr))
    if abs(total - 1.0) > SUM_TOL:
        raise ValueError(f"{name} does not sum to 1: sum={total}")
    out = arr.copy()
    out.flags.writeable = False
    return out


def uniform_mixture(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / dim)


def simplex_grid(dim: int, resolution: int) -> np.ndarray:
    """All points of the dim-simplex with coordinates in multiples of
    1/resolution (dim <= 3)."""
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if dim == 2:
        ks = np.arange(resolution + 1)
        return np.column_stack([ks, resolution - ks]) / resolution
    if dim == 3:
        counts = np.arange(resolution + 1, 0, -1)
        a = np.repeat(np.arange(resolution + 1), counts)
        b = np.concatenate([np.arange(c) for c in counts])
        return np.column_stack([a, b, resolution - a - b]) / resolution
    raise ValueError(f"simplex grids support dim in {{2, 3}}, got {dim}")


def unit_vector(dim: int, index: int) -> np.ndarray:
    e = np.zeros(dim)
    e[index] = 1.0
    return e


def _as_matrix(M, name: str) -> np.ndarray:
    arr = np.asarray(M, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class GameInstance:
    """A two-player bimatrix game.  A is the optimizer's payoff, B the learner's.

    Both matrices are m x n with m, n >= 2 and are frozen after construction,
    so instances are safe to share between threads.
    """

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = _as_matrix(self.A, "A")
        B = _as_matrix(self.B, "B")
        if A.shape != B.shape:
            raise ValueError(f"A and B must share dimensions: {A.shape} vs {B.shape}")
        if A.shape[0] < 2 or A.shape[1] < 2:
            raise ValueError(f"need at least 2 actions per player, got {A.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
            raise NumericError("payoff matrices contain non-finite entries")
        A = A.copy()
        B = B.copy()
        A.flags.writeable = False
        B.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


def load_game_json(path: str) -> GameInstance:
    """Load a game from a JSON file ``{"A": [[...]], "B": [[...]]}``.

    Dimensions are inferred; ragged rows are rejected.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read game file {path!r}: {exc}") from exc
    if not isinstance(doc, dict) or "A" not in doc or "B" not in doc:
        raise ConfigError(f"game file {path!r} must be an object with keys 'A' and 'B'")
    mats = {}
    for key in ("A", "B"):
        rows = doc[key]
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise ConfigError(f"game field {key!r} must be a list of rows")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ConfigError(f"game field {key!r} is ragged")
        try:
            mats[key] = np.array(rows, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"game field {key!r} has non-numeric entries") from exc
    return GameInstance(A=mats["A"], B=mats["B"])


@dataclass(frozen=True)
class Trace:
    """Per-round record of one simulation run.

    ``xs`` is T x m, ``ys`` is T x n; row t-1 holds the round-t actions.
    Payoff arrays hold x_t^T A y_t and x_t^T B y_t per round.
    """

    xs: np.ndarray
    ys: np.ndarray
    payoff_opt: np.ndarray
    payoff_learner: np.ndarray
    game: GameInstance | None = None
    seed: int | None = None

    def __post_init__(self):
        for name in ("xs", "ys", "payoff_opt", "payoff_learner"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        T = self.xs.shape[0]
        if not (self.ys.shape[0] == self.payoff_opt.shape[0] == self.payoff_learner.shape[0] == T):
            raise ValueError("trace arrays disagree on the number of rounds")

    def __len__(self) -> int:
        return self.xs.shape[0]

    def rounds(self) -> Iterator[tuple[int, np.ndarray, np.ndarray, float, float]]:
        """Yield (t, x, y, payoff_opt, payoff_learner) with t starting at 1."""
        for i in range(len(self)):
            yield (i + 1, self.xs[i], self.ys[i], float(self.payoff_opt[i]),
                   float(self.payoff_learner[i]))

    def validate(self, tol: float = 1e-9) -> None:
        """Check the recorded payoffs against the game matrices."""
        if self.game is None:
            raise ValueError("trace has no game reference to validate against")
        po = np.einsum("ti,ij,tj->t", self.xs, self.game.A, self.ys)
        pl = np.einsum("ti,ij,tj->t", self.xs, self.game.B, self.ys)
        if np.max(np.abs(po - self.payoff_opt), initial=0.0) > tol:
            raise ValueError("optimizer payoffs inconsistent with trace actions")
        if np.max(np.abs(pl - self.payoff_learner), initial=0.0) > tol:
            raise ValueError("learner payoffs inconsistent with trace actions")


def payoff(game: GameInstance, x, y) -> tuple[float, float]:
    """Expected payoffs (optimizer, learner) for mixed actions x, y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (game.m,) or y.shape != (game.n,):
        raise ValueError(
            f"dimension mismatch: game is {game.m}x{game.n}, "
            f"got x{x.shape} and y{y.shape}")
    return float(x @ game.A @ y), float(x @ game.B @ y)


def best_response_set(B, x, tol: float = BR_TIE_TOL) -> set[int]:
    """All column indices within ``tol`` of the learner's best payoff against x."""
    B = _as_matrix(B, "B")
    x = np.asarray(x, dtype=float)
    scores = x @ B
    return set(np.flatnonzero(scores >= scores.max() - tol).tolist())


def best_response_optimistic(game: GameInstance, x, tol: float = BR_TIE_TOL) -> int:
    """Learner best response with optimistic tie-breaking.

    Among the learner's best responses to x, returns the column the optimizer
    prefers; remaining ties resolve to the lowest index so simulations are
    deterministic.
    """
    x = np.asarray(x, dtype=float)
    candidates = sorted(best_response_set(game.B, x, tol))
    opt_scores = x @ game.A
    best = candidates[0]
    for j in candidates[1:]:
        if opt_scores[j] > opt_scores[best]:
            best = j
    return best


def trajectory_regret(B, trace: Trace) -> float:
    """Hindsight regret of the learner on a recorded trajectory.

    The hindsight maximum over mixed strategies is attained at a pure strategy
    because the total payoff is linear in y, so the maximum is computed exactly
    over columns.
    """
    B = _as_matrix(B, "B")
    if len(trace) == 0:
        raise ValueError("trajectory regret of an empty trace is undefined")
    col_scores = trace.xs @ B  # (T, n): per-round payoff of each pure column
    realized = float(np.sum(col_scores * trace.ys))
    return float(np.max(np.sum(col_scores, axis=0)) - realized)


def stackelberg_regret(game: GameInstance, v_star: float, trace: Trace) -> float:
    """T * v_star minus the optimizer's realized total payoff."""
    return float(len(trace) * v_star - np.sum(trace.payoff_opt))


@dataclass(frozen=True)
class EquivClassRep:
    """Normalized column-difference representation of a payoff-matrix class.

    Matrices related by B -> c*B + mu*1^T (c > 0) induce identical best-response
    structure; this normal form is shared by the whole class.  ``columns`` holds
    (B[:,k] - B[:,pivot]) / max_{j1,j2} ||B[:,j1] - B[:,j2]||_inf for k != pivot,
    in ascending k order.  ``degenerate`` marks an all-identical-columns B,
    where the normalizer is 0 and the 0/0 = 0 convention yields zero columns.
    """

    pivot: int
    columns: np.ndarray  # m x (n-1)
    degenerate: bool = False

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=float)
        cols.flags.writeable = False
        object.__setattr__(self, "columns", cols)

    @property
    def m(self) -> int:
        return self.columns.shape[0]

    @property
    def n(self) -> int:
        return self.columns.shape[1] + 1


def equiv_class(B, pivot: int) -> EquivClassRep:
    """Normalized representation of B's payoff class relative to ``pivot``."""
    B = _as_matrix(B, "B")
    m, n = B.shape
    if not 0 <= pivot < n:
        raise ValueError(f"pivot {pivot} out of range for {n} columns")
    # Largest infinity-norm difference over all column pairs.
    diffs = B[:, :, None] - B[:, None, :]
    denom = float(np.max(np.abs(diffs)))
    others = [k for k in range(n) if k != pivot]
    raw = B[:, others] - B[:, [pivot]]
    if denom == 0.0:
        return EquivClassRep(pivot=pivot, columns=np.zeros((m, n - 1)), degenerate=True)
    return EquivClassRep(pivot=pivot, columns=raw / denom, degenerate=False)


def class_difference(c1: EquivClassRep, c2: EquivClassRep) -> float:
    """Max-norm distance between two class representations at the same pivot."""
    if c1.pivot != c2.pivot:
        raise ValueError(f"pivot mismatch: {c1.pivot} vs {c2.pivot}")
    if c1.columns.shape != c2.columns.shape:
        raise ValueError(
            f"shape mismatch: {c1.columns.shape} vs {c2.columns.shape}")
    if c1.columns.size == 0:
        return 0.0
    return float(np.max(np.abs(c1.columns - c2.columns)))
