"""Learner-side algorithms behind a single act/observe interface.

Every learner emits its round-t action via ``act()`` before seeing the
optimizer's round-t action, then ingests it via ``observe(x)``.  States are
single-owner mutable; one instance per simulation run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .game import as_simplex, uniform_mixture, unit_vector


def project_on_simplex(v) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-and-threshold)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.max(idx[u - css / idx > 0])
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


def oga_step(y, x_prev, B, eta: float) -> np.ndarray:
    """One projected gradient-ascent step on the learner payoff x^T B y."""
    y = np.asarray(y, dtype=float)
    grad = np.asarray(B, dtype=float).T @ np.asarray(x_prev, dtype=float)
    return project_on_simplex(y + eta * grad)


def kl_mirror_step(y, x_prev, B, eta_t: float, noise=None) -> np.ndarray:
    """Mirror-ascent step with KL regularizer weight eta_t.

    Closed form: y'_i proportional to y_i * exp((B^T x + xi)_i / eta_t),
    evaluated in log space with a log-sum-exp normalizer so entries are never
    rounded to exactly zero by the update itself.
    """
    y = np.asarray(y, dtype=float)
    if np.min(y) <= 0.0:
        raise ValueError("KL mirror step requires strictly positive y")
    if eta_t <= 0:
        raise ValueError("eta_t must be positive")
    grad = np.asarray(B, dtype=float).T @ np.asarray(x_prev, dtype=float)
    if noise is not None:
        grad = grad + np.asarray(noise, dtype=float)
    logits = np.log(y) + grad / eta_t
    logits -= logits.max()
    logits -= np.log(np.sum(np.exp(logits)))
    return np.exp(logits)


@dataclass(frozen=True)
class BudgetPlan:
    """Deterministic action schedule: column 1 for a prefix, column 0 after."""

    prefix_rounds: int
    horizon: int

    def column(self, t: int) -> int:
        return 1 if t <= self.prefix_rounds else 0

    def action(self, t: int) -> np.ndarray:
        return unit_vector(2, self.column(t))


def budget_learner_plan(x, f_t: float, horizon: int) -> BudgetPlan:
    """Schedule of the regret-budget learner against a fixed optimizer action.

    If x2 >= x1 the learner sticks to column 1 forever; otherwise it spends its
    budget on column 1 for floor(f_t / (1 - 2*x2)) rounds and then defects to
    column 0, incurring hindsight regret of exactly f_t up to floor rounding.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (2,) or np.min(x) < -1e-12 or abs(float(np.sum(x)) - 1.0) > 1e-9:
        raise ValueError(f"expected a point on the 2-simplex, got {x}")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if f_t < 0:
        raise ValueError("budget must be nonnegative")
    x2 = float(x[1])
    if x2 >= x[0]:
        return BudgetPlan(prefix_rounds=horizon, horizon=horizon)
    prefix = int(np.floor(f_t / (1.0 - 2.0 * x2)))
    return BudgetPlan(prefix_rounds=min(prefix, horizon), horizon=horizon)


class Learner:
    """Base interface: act() -> y_t, then observe(x_t)."""

    def act(self) -> np.ndarray:
        raise NotImplementedError

    def observe(self, x: np.ndarray) -> None:
        raise NotImplementedError


class FixedActionLearner(Learner):
    def __init__(self, y):
        self.y = np.asarray(y, dtype=float)

    def act(self) -> np.ndarray:
        return self.y

    def observe(self, x) -> None:
        pass


class OgaLearner(Learner):
    """Projected online gradient ascent with step size eta0 / sqrt(t)."""

    def __init__(self, B, eta0: float = 1.0, y_init=None):
        if eta0 <= 0:
            raise ValueError("eta0 must be positive")
        self.B = np.asarray(B, dtype=float)
        self.eta0 = eta0
        self.y = uniform_mixture(self.B.shape[1]) if y_init is None else np.asarray(y_init, dtype=float)
        self.t = 1

    def act(self) -> np.ndarray:
        return self.y

    def observe(self, x) -> None:
        self.y = oga_step(self.y, x, self.B, self.eta0 / np.sqrt(self.t))
        self.t += 1


class KlMirrorLearner(Learner):
    """Stochastic mirror ascent with KL regularizer.

    The divergence weight grows as eta_t = eta0 * sqrt(t), so effective steps
    shrink like 1/sqrt(t).  Noise entries are i.i.d. Gaussian(0, R^2), matching
    an R-sub-Gaussian noise model; R = 0 disables noise.  State is kept in log
    space so the iterate never hits the simplex boundary.
    """

    def __init__(self, B, eta0: float = 1.0, noise_scale: float = 0.0,
                 y_init=None, rng: np.random.Generator | None = None):
        if eta0 <= 0:
            raise ValueError("eta0 must be positive")
        if noise_scale < 0:
            raise ValueError("noise scale must be nonnegative")
        self.B = np.asarray(B, dtype=float)
        self.eta0 = eta0
        self.noise_scale = noise_scale
        self.rng = rng if rng is not None else np.random.default_rng(0)
        y0 = uniform_mixture(self.B.shape[1]) if y_init is None else np.asarray(y_init, dtype=float)
        if np.min(y0) <= 0:
            raise ValueError("KL learner needs a strictly positive initial point")
        self._log_y = np.log(y0)
        self.t = 1

    def eta_at(self, t: int) -> float:
        return self.eta0 * float(np.sqrt(t))

    def act(self) -> np.ndarray:
        y = np.exp(self._log_y - self._log_y.max())
        return y / y.sum()

    def observe(self, x) -> None:
        grad = self.B.T @ np.asarray(x, dtype=float)
        if self.noise_scale > 0:
            grad = grad + self.rng.normal(0.0, self.noise_scale, size=grad.size)
        self._log_y = self._log_y + grad / self.eta_at(self.t)
        self._log_y -= self._log_y.max()
        self._log_y -= np.log(np.sum(np.exp(self._log_y)))
        self.t += 1


class SwitcherLearner(Learner):
    """Adversarial learner for the two-candidate-game impossibility setup.

    Sticks to column 1 while tracking the optimizer's running commitment
    regret on the reference game (payoff matrix ``reference_a`` with target
    per-round value ``epsilon``); once that exceeds ``threshold`` it switches
    permanently to KL mirror ascent on its own payoff matrix.
    """

    def __init__(self, B, reference_a, epsilon: float, threshold: float,
                 eta0: float = 1.0, rng: np.random.Generator | None = None):
        if np.asarray(B).shape[1] != 2:
            raise ValueError("the switcher construction requires n = 2")
        self.B = np.asarray(B, dtype=float)
        self.reference_a = np.asarray(reference_a, dtype=float)
        self.epsilon = epsilon
        self.threshold = threshold
        self.eta0 = eta0
        self.rng = rng
        self.running_regret = 0.0
        self.switched = False
        self.switch_round: int | None = None
        self.t = 1
        self._mirror: KlMirrorLearner | None = None
        self._last_y = unit_vector(2, 1)

    def act(self) -> np.ndarray:
        if not self.switched and self.running_regret >= self.threshold:
            self.switched = True
            self.switch_round = self.t
            # Mirror ascent restarts from the interior; the pre-switch corner
            # point is outside the KL domain.
            self._mirror = KlMirrorLearner(self.B, eta0=self.eta0, rng=self.rng)
            self._mirror.t = self.t
        if self.switched:
            self._last_y = self._mirror.act()
        else:
            self._last_y = unit_vector(2, 1)
        return self._last_y

    def observe(self, x) -> None:
        x = np.asarray(x, dtype=float)
        self.running_regret += self.epsilon - float(x @ self.reference_a @ self._last_y)
        if self.switched:
            self._mirror.observe(x)  # mirror.t stays in lockstep with the round index
        self.t += 1


class BudgetLearner(Learner):
    """Plays the budget schedule against a fixed optimizer action.

    The schedule depends on the opponent's committed action, which is only
    revealed after round 1; both schedule branches open with column 1, so
    deferring the plan by one round reproduces the planned play exactly.
    """

    def __init__(self, budget: float, horizon: int):
        self.budget = budget
        self.horizon = horizon
        self.plan: BudgetPlan | None = None
        self.t = 1

    def act(self) -> np.ndarray:
        if self.plan is None:
            return unit_vector(2, 1)
        return self.plan.action(self.t)

    def observe(self, x) -> None:
        if self.plan is None:
            self.plan = budget_learner_plan(x, self.budget, self.horizon)
        self.t += 1


def make_learner(spec: dict, B, horizon: int,
                 rng: np.random.Generator | None = None) -> Learner:
    """Build a learner from its JSON spec, e.g. {"kind": "oga", "eta0": 1.0}."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("learner spec must be an object with a 'kind' field")
    kind = spec["kind"]
    B = np.asarray(B, dtype=float)
    n = B.shape[1]
    y_init = spec.get("y_init")
    if y_init is not None:
        try:
            y_init = as_simplex(y_init, name="learner y_init")
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if y_init.size != n:
            raise ConfigError(f"learner y_init has length {y_init.size}, "
                              f"the game has {n} columns")
    try:
        if kind == "oga":
            return OgaLearner(B, eta0=float(spec.get("eta0", 1.0)), y_init=y_init)
        if kind == "kl":
            return KlMirrorLearner(B, eta0=float(spec.get("eta0", 1.0)),
                                   noise_scale=float(spec.get("noise", 0.0)),
                                   y_init=y_init, rng=rng)
        if kind == "fixed":
            if "y" not in spec:
                raise ConfigError("fixed learner spec needs a 'y' field")
            return FixedActionLearner(as_simplex(spec["y"], name="learner y"))
        if kind == "switcher":
            for fld in ("reference_a", "epsilon", "threshold"):
                if fld not in spec:
                    raise ConfigError(f"switcher learner spec needs field {fld!r}")
            return SwitcherLearner(B, reference_a=spec["reference_a"],
                                   epsilon=float(spec["epsilon"]),
                                   threshold=float(spec["threshold"]),
                                   eta0=float(spec.get("eta0", 1.0)), rng=rng)
        if kind == "budget":
            if "budget" not in spec:
                raise ConfigError("budget learner spec needs a 'budget' field")
            if n != 2:
                raise ConfigError("budget learner is defined for n = 2 games")
            return BudgetLearner(budget=float(spec["budget"]), horizon=horizon)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid learner spec {spec}: {exc}") from exc
    raise ConfigError(f"unknown learner kind {kind!r}; expected one of "
                      "oga, kl, fixed, switcher, budget")
