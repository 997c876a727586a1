"""Optimizer-side algorithms.

All optimizers expose act() -> x_t and observe(y_t).  The two explore-then-
commit algorithms only ever see the learner's played mixed actions; the
mirror-ascent recovery optimizer additionally knows the learner's regularizer
and step schedule, which the protocol assumes are public.
"""

from __future__ import annotations

import logging

import numpy as np

from .errors import ConfigError
from .game import as_simplex, equiv_class, unit_vector, uniform_mixture
from .learners import project_on_simplex
from .stackelberg import STATUS_OK, StackelbergSolution, solve_extra_pessimistic

log = logging.getLogger(__name__)

PHASE_EXPLORE = "explore"
PHASE_COMMIT = "commit"
PHASE_ONLINE = "online"


class Optimizer:
    phase_label = PHASE_COMMIT

    def act(self) -> np.ndarray:
        raise NotImplementedError

    def observe(self, y: np.ndarray) -> None:
        raise NotImplementedError


class FixedCommitOptimizer(Optimizer):
    """Plays one fixed mixed action every round."""

    def __init__(self, x):
        self.x = np.asarray(x, dtype=float)

    def act(self) -> np.ndarray:
        return self.x

    def observe(self, y) -> None:
        pass


class OgaOptimizer(Optimizer):
    """Projected gradient ascent on the optimizer's own payoff (baseline)."""

    phase_label = PHASE_ONLINE

    def __init__(self, A, eta0: float = 0.5, x_init=None):
        self.A = np.asarray(A, dtype=float)
        self.eta0 = eta0
        self.x = uniform_mixture(self.A.shape[0]) if x_init is None else np.asarray(x_init, dtype=float)
        self.t = 1

    def act(self) -> np.ndarray:
        return self.x

    def observe(self, y) -> None:
        grad = self.A @ np.asarray(y, dtype=float)
        self.x = project_on_simplex(self.x + self.eta0 / np.sqrt(self.t) * grad)
        self.t += 1


def _interval_best(A: np.ndarray, response: int, lo: float, hi: float) -> tuple[float, float]:
    """Maximize (p, 1-p)^T A[:, response] over p in [lo, hi]; ties pick lo."""
    def val(p: float) -> float:
        return p * A[0, response] + (1.0 - p) * A[1, response]
    return (lo, val(lo)) if val(lo) >= val(hi) else (hi, val(hi))


class PaalOptimizer(Optimizer):
    """Binary-search explore-then-commit against an ascent learner (2x2 only).

    A probe at p plays (p, 1-p) for two consecutive rounds; the learner's move
    between the two observations reveals its best response to that point.  Two
    endpoint probes either prove one column dominant (commit immediately) or
    seed a binary search for the indifference point, which is then bracketed
    to width d.  The commitment tightens the bracket by a further margin d on
    each side and solves the two one-dimensional facet problems.
    """

    def __init__(self, A, d: float):
        A = np.asarray(A, dtype=float)
        if A.shape != (2, 2):
            raise ValueError("this optimizer requires a 2x2 game")
        if not 0.0 < d < 1.0:
            raise ValueError(f"accuracy margin must be in (0, 1), got {d}")
        self.A = A
        self.d = d
        self.committed_x: np.ndarray | None = None
        self.committed_response: int | None = None
        self.bracket: tuple[float, float] | None = None
        self.exploration_rounds = 0
        self.degenerate_probes = 0
        # First coordinates of stalled probes.  A stall at q = 1 is the one
        # case where the movement rule misreads an ascent learner: the learner
        # already sits on column 0's vertex, yet the tie branch reports
        # column 1.  Exposed so property tests can reject such runs.
        self.stalled_probe_values: list[float] = []
        # Probe bookkeeping: which slot the running test fills and its point.
        self._slot = "endpoint0"
        self._p = 0.0
        self._q_first: float | None = None
        self._br_endpoint0: int | None = None
        self._p_l: float | None = None
        self._p_r: float | None = None

    @property
    def phase_label(self) -> str:  # type: ignore[override]
        return PHASE_COMMIT if self.committed_x is not None else PHASE_EXPLORE

    def act(self) -> np.ndarray:
        if self.committed_x is not None:
            return self.committed_x
        return np.array([self._p, 1.0 - self._p])

    def observe(self, y) -> None:
        if self.committed_x is not None:
            return
        self.exploration_rounds += 1
        q = float(np.asarray(y, dtype=float)[0])
        if self._q_first is None:
            self._q_first = q
            return
        # Strictly increasing first coordinate reveals column 0 as the best
        # response; an exactly unchanged response falls to the column-1 branch
        # and is tolerated by the bracket invariant.
        if q == self._q_first:
            self.degenerate_probes += 1
            self.stalled_probe_values.append(q)
            log.debug("degenerate probe at p=%s (response unchanged, q=%s)",
                      self._p, q)
        br = 0 if q > self._q_first else 1
        self._q_first = None
        self._advance(br)

    def _advance(self, br: int) -> None:
        if self._slot == "endpoint0":
            self._br_endpoint0 = br
            self._slot = "endpoint1"
            self._p = 1.0
            return
        if self._slot == "endpoint1":
            if br == self._br_endpoint0:
                # One column is everywhere a best response: commit to the best
                # leader vertex against it.
                r = int(np.argmax(self.A[:, br]))
                self.committed_x = unit_vector(2, r)
                self.committed_response = br
                return
            self._p_l = 1.0 if br == 0 else 0.0
            self._p_r = 1.0 - self._p_l
            self._slot = "search"
            self._continue_search()
            return
        # Search probe: column 0 wins -> its side of the bracket moves to mid.
        mid = self._p
        if br == 0:
            self._p_l = mid
        else:
            self._p_r = mid
        self._continue_search()

    def _continue_search(self) -> None:
        if abs(self._p_l - self._p_r) <= self.d:
            self._commit_from_bracket()
            return
        self._p = 0.5 * (self._p_l + self._p_r)

    def _commit_from_bracket(self) -> None:
        p_l, p_r, d = self._p_l, self._p_r, self.d
        self.bracket = (p_l, p_r)
        if p_l < p_r:
            col0_interval = (0.0, max(p_l - d, 0.0))
            col1_interval = (min(1.0, p_r + d), 1.0)
        else:
            col1_interval = (0.0, max(p_r - d, 0.0))
            col0_interval = (min(1.0, p_l + d), 1.0)
        p0, v0 = _interval_best(self.A, 0, *col0_interval)
        p1, v1 = _interval_best(self.A, 1, *col1_interval)
        if v0 >= v1:
            p_star, self.committed_response = p0, 0
        else:
            p_star, self.committed_response = p1, 1
        self.committed_x = np.array([p_star, 1.0 - p_star])


class PamdOptimizer(Optimizer):
    """Recover the learner's payoff class from mirror-ascent updates, then
    commit pessimistically.

    Plays each leader vertex for k+1 rounds; consecutive response pairs within
    a block satisfy eta_t * grad D(y_{t+1} || y_t) = B^T e_i + noise + c * 1,
    so averaging k such gradients estimates row i of B up to a uniform shift,
    which the class representation quotients out.  Requires the learner's
    KL-regularized update rule with a known eta schedule.
    """

    def __init__(self, A, k: int, margin: float, slack: float = 0.0,
                 learner_eta0: float = 1.0):
        if k < 1:
            raise ValueError("per-row exploration steps k must be >= 1")
        if margin < 0 or slack < 0:
            raise ValueError("margin and slack must be nonnegative")
        self.A = np.asarray(A, dtype=float)
        self.m, self.n = self.A.shape
        self.k = k
        self.margin = margin
        self.slack = slack
        self.learner_eta0 = learner_eta0
        self.committed_x: np.ndarray | None = None
        self.solution: StackelbergSolution | None = None
        self.estimated_matrix: np.ndarray | None = None
        self.commit_failed = False
        self.exploration_rounds = self.m * (self.k + 1)
        self._row = 0
        self._block_start_t = 1
        self._block_ys: list[np.ndarray] = []
        self._rows_hat: list[np.ndarray] = []
        self._t = 1

    @property
    def phase_label(self) -> str:  # type: ignore[override]
        return PHASE_COMMIT if self.committed_x is not None else PHASE_EXPLORE

    def _eta(self, t: int) -> float:
        return self.learner_eta0 * float(np.sqrt(t))

    def act(self) -> np.ndarray:
        if self.committed_x is not None:
            return self.committed_x
        return unit_vector(self.m, self._row)

    def observe(self, y) -> None:
        if self.committed_x is not None:
            return
        self._block_ys.append(np.asarray(y, dtype=float).copy())
        self._t += 1
        if len(self._block_ys) == self.k + 1:
            self._finish_block()

    def _finish_block(self) -> None:
        ys = self._block_ys
        grads = []
        for j in range(self.k):
            eta = self._eta(self._block_start_t + j)
            prev = np.maximum(ys[j], 1e-300)      # guard against underflowed zeros
            nxt = np.maximum(ys[j + 1], 1e-300)
            grads.append(eta * (np.log(nxt) - np.log(prev) + 1.0))
        self._rows_hat.append(np.mean(grads, axis=0))
        self._row += 1
        self._block_ys = []
        self._block_start_t = self._t
        if self._row == self.m:
            self._commit()

    def _commit(self) -> None:
        b_hat = np.vstack(self._rows_hat)
        self.estimated_matrix = b_hat
        reps = [equiv_class(b_hat, i) for i in range(self.n)]
        sol = solve_extra_pessimistic(self.A, reps, self.margin, self.slack)
        self.solution = sol
        if sol.status == STATUS_OK:
            self.committed_x = np.asarray(sol.x_star, dtype=float)
            return
        # Over-tightened: no pessimistic facet is feasible.  Fall back to the
        # best leader vertex against the estimated best responses.
        self.commit_failed = True
        log.warning("pessimistic commitment infeasible at margin %s + slack %s; "
                    "falling back to a pure commitment", self.margin, self.slack)
        best_r, best_val = 0, -np.inf
        for r in range(self.m):
            j = int(np.argmax(b_hat[r]))
            if self.A[r, j] > best_val:
                best_r, best_val = r, float(self.A[r, j])
        self.committed_x = unit_vector(self.m, best_r)

    @property
    def diagnostic_pivot(self) -> int:
        """Deterministic pivot used when reporting recovery error."""
        if self.estimated_matrix is None:
            raise ValueError("exploration has not finished")
        return int(np.argmax(self.estimated_matrix[0]))


def make_optimizer(spec: dict, A, rng: np.random.Generator | None = None) -> Optimizer:
    """Build an optimizer from its JSON spec, e.g. {"kind": "paal", "d": 0.01}."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("optimizer spec must be an object with a 'kind' field")
    kind = spec["kind"]
    A = np.asarray(A, dtype=float)
    try:
        if kind == "fixed":
            if "x" not in spec:
                raise ConfigError("fixed optimizer spec needs an 'x' field")
            x = as_simplex(spec["x"], name="optimizer x")
            if x.size != A.shape[0]:
                raise ConfigError(f"optimizer x has length {x.size}, "
                                  f"the game has {A.shape[0]} rows")
            return FixedCommitOptimizer(x)
        if kind == "oga":
            x_init = spec.get("x_init")
            if x_init is not None:
                x_init = as_simplex(x_init, name="optimizer x_init")
            return OgaOptimizer(A, eta0=float(spec.get("eta0", 0.5)), x_init=x_init)
        if kind == "paal":
            if "d" not in spec:
                raise ConfigError("paal optimizer spec needs a 'd' field")
            return PaalOptimizer(A, d=float(spec["d"]))
        if kind == "pamd":
            for fld in ("k", "margin"):
                if fld not in spec:
                    raise ConfigError(f"pamd optimizer spec needs field {fld!r}")
            return PamdOptimizer(A, k=int(spec["k"]), margin=float(spec["margin"]),
                                 slack=float(spec.get("slack", 0.0)),
                                 learner_eta0=float(spec.get("learner_eta0", 1.0)))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid optimizer spec {spec}: {exc}") from exc
    raise ConfigError(f"unknown optimizer kind {kind!r}; expected one of "
                      "fixed, oga, paal, pamd")
