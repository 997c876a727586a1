"""Simulation loop, metrics accounting, and CSV emission.

The harness is an omniscient referee: it holds both payoff matrices and the
exact Stackelberg value for regret accounting, while each player object only
ever sees the opponent's played actions.  Players move simultaneously; neither
act() may depend on the current round's opposing action.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError
from .game import GameInstance, Trace
from .learners import (BudgetLearner, FixedActionLearner, Learner,
                       budget_learner_plan, make_learner)
from .stackelberg import solve_exact
from .steering import FixedCommitOptimizer, Optimizer, make_optimizer

CSV_BASE_COLUMNS = ("payoff_opt", "payoff_learner", "cum_regret_learner",
                    "cum_stackreg_opt")


@dataclass(frozen=True)
class MetricsRow:
    t: int
    x: tuple[float, ...]
    y: tuple[float, ...]
    payoff_opt: float
    payoff_learner: float
    cum_regret_learner: float
    cum_stackreg_opt: float
    phase: str


@dataclass(frozen=True)
class SimulationResult:
    trace: Trace
    rows: list[MetricsRow]
    v_star: float
    seed: int | None

    @property
    def horizon(self) -> int:
        return len(self.trace)

    def final_learner_regret(self) -> float:
        return self.rows[-1].cum_regret_learner

    def final_stackelberg_regret(self) -> float:
        return self.rows[-1].cum_stackreg_opt


def _record_mask_round(t: int, horizon: int, record_every: int,
                       phase_changed: bool) -> bool:
    return t == 1 or t == horizon or phase_changed or t % record_every == 0


def run_simulation(game: GameInstance, optimizer: Optimizer, learner: Learner,
                   horizon: int, *, record_every: int = 1, seed: int | None = None,
                   v_star: float | None = None) -> SimulationResult:
    """Simulate `horizon` rounds of simultaneous play and return the full trace
    plus thinned metric rows.

    Cumulative learner regret is maintained incrementally from per-column
    cumulative payoffs, so the hindsight maximum is exact at every prefix.
    Thinning always records round 1, round `horizon`, and every round whose
    phase label differs from the previous round.
    """
    if horizon < 1:
        raise ConfigError("horizon must be >= 1")
    if record_every < 1:
        raise ConfigError("record_every must be >= 1")
    if v_star is None:
        v_star = solve_exact(game).value

    fast = (isinstance(optimizer, FixedCommitOptimizer)
            and isinstance(learner, (BudgetLearner, FixedActionLearner)))
    if fast:
        return _run_fixed_vs_planned(game, optimizer, learner, horizon,
                                     record_every=record_every, seed=seed,
                                     v_star=v_star)

    A, B = game.A, game.B
    m, n = game.m, game.n
    xs = np.empty((horizon, m))
    ys = np.empty((horizon, n))
    po_arr = np.empty(horizon)
    pl_arr = np.empty(horizon)
    cum_cols = np.zeros(n)
    cum_realized = 0.0
    cum_opt = 0.0
    rows: list[MetricsRow] = []
    prev_phase: str | None = None
    last_x_id = None
    xA = xB = None

    for t in range(1, horizon + 1):
        x = optimizer.act()
        y = learner.act()
        phase = optimizer.phase_label
        if x is not last_x_id:
            xv = np.asarray(x, dtype=float)
            xA = xv @ A
            xB = xv @ B
            last_x_id = x
        yv = np.asarray(y, dtype=float)
        po = float(xA @ yv)
        pl = float(xB @ yv)
        xs[t - 1] = x
        ys[t - 1] = yv
        po_arr[t - 1] = po
        pl_arr[t - 1] = pl
        cum_cols += xB
        cum_realized += pl
        cum_opt += po
        if not np.isfinite(po) or not np.isfinite(pl):
            raise NumericError(f"non-finite payoff at round {t}")
        if _record_mask_round(t, horizon, record_every, phase != prev_phase):
            rows.append(MetricsRow(
                t=t, x=tuple(float(v) for v in xs[t - 1]),
                y=tuple(float(v) for v in yv),
                payoff_opt=po, payoff_learner=pl,
                cum_regret_learner=float(np.max(cum_cols) - cum_realized),
                cum_stackreg_opt=float(t * v_star - cum_opt),
                phase=phase))
        prev_phase = phase
        optimizer.observe(yv)
        learner.observe(np.asarray(x, dtype=float))

    trace = Trace(xs=xs, ys=ys, payoff_opt=po_arr, payoff_learner=pl_arr,
                  game=game, seed=seed)
    return SimulationResult(trace=trace, rows=rows, v_star=float(v_star), seed=seed)


def _run_fixed_vs_planned(game: GameInstance, optimizer: FixedCommitOptimizer,
                          learner, horizon: int, *, record_every: int,
                          seed: int | None, v_star: float) -> SimulationResult:
    """Vectorized path for a fixed commitment against a schedule learner.

    Produces the same per-round numbers as the generic loop (sequential
    accumulation order is preserved via np.add.accumulate), in O(horizon)
    numpy work; used for the million-round lower-bound sweeps.
    """
    x = np.asarray(optimizer.x, dtype=float)
    if isinstance(learner, BudgetLearner):
        plan = budget_learner_plan(x, learner.budget, horizon)
        segments = [(plan.prefix_rounds, np.array([0.0, 1.0])),
                    (horizon - plan.prefix_rounds, np.array([1.0, 0.0]))]
    else:
        segments = [(horizon, np.asarray(learner.y, dtype=float))]

    m, n = game.m, game.n
    xs = np.tile(x, (horizon, 1))
    ys = np.empty((horizon, n))
    po_arr = np.empty(horizon)
    pl_arr = np.empty(horizon)
    xA = x @ game.A
    xB = x @ game.B
    pos = 0
    for length, y in segments:
        if length <= 0:
            continue
        ys[pos:pos + length] = y
        po_arr[pos:pos + length] = float(xA @ y)
        pl_arr[pos:pos + length] = float(xB @ y)
        pos += length

    cum_cols = np.add.accumulate(np.tile(xB, (horizon, 1)), axis=0)
    cum_realized = np.add.accumulate(pl_arr)
    cum_opt = np.add.accumulate(po_arr)
    cum_regret = cum_cols.max(axis=1) - cum_realized
    ts = np.arange(1, horizon + 1)
    cum_stackreg = ts * v_star - cum_opt

    rows = []
    phase = optimizer.phase_label
    for t in range(1, horizon + 1):
        if _record_mask_round(t, horizon, record_every, phase_changed=False):
            rows.append(MetricsRow(
                t=t, x=tuple(float(v) for v in x),
                y=tuple(float(v) for v in ys[t - 1]),
                payoff_opt=float(po_arr[t - 1]), payoff_learner=float(pl_arr[t - 1]),
                cum_regret_learner=float(cum_regret[t - 1]),
                cum_stackreg_opt=float(cum_stackreg[t - 1]), phase=phase))
    trace = Trace(xs=xs, ys=ys, payoff_opt=po_arr, payoff_learner=pl_arr,
                  game=game, seed=seed)
    return SimulationResult(trace=trace, rows=rows, v_star=float(v_star), seed=seed)


def run_from_specs(game: GameInstance, optimizer_spec: dict, learner_spec: dict,
                   horizon: int, seed: int, *, record_every: int = 1,
                   v_star: float | None = None) -> SimulationResult:
    """Construct both players from JSON specs with a seeded RNG and simulate."""
    rng = np.random.default_rng(seed)
    optimizer = make_optimizer(optimizer_spec, game.A, rng=rng)
    learner = make_learner(learner_spec, game.B, horizon, rng=rng)
    return run_simulation(game, optimizer, learner, horizon,
                          record_every=record_every, seed=seed, v_star=v_star)


def csv_header(m: int, n: int) -> str:
    xcols = ",".join(f"x_{i + 1}" for i in range(m))
    ycols = ",".join(f"y_{j + 1}" for j in range(n))
    return f"t,{xcols},{ycols},{','.join(CSV_BASE_COLUMNS)},phase"


def write_metrics_csv(path: str, result: SimulationResult) -> None:
    """Write thinned metric rows with the exact public schema.

    Floats are serialized with shortest round-trip repr, so identical runs
    yield byte-identical files.
    """
    m = result.trace.xs.shape[1]
    n = result.trace.ys.shape[1]
    lines = [csv_header(m, n)]
    for r in result.rows:
        vals = [str(r.t)]
        vals += [repr(v) for v in r.x]
        vals += [repr(v) for v in r.y]
        vals += [repr(r.payoff_opt), repr(r.payoff_learner),
                 repr(r.cum_regret_learner), repr(r.cum_stackreg_opt), r.phase]
        lines.append(",".join(vals))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def aggregate_rows(results: list[SimulationResult], record_every: int) -> tuple[list[str], list[list[float]]]:
    """Mean/std of every numeric column across seeds at shared checkpoints.

    Only regular checkpoints (multiples of record_every, plus the final round)
    are aggregated; phase-transition rounds may differ between seeds.
    """
    if not results:
        raise ValueError("nothing to aggregate")
    horizon = results[0].horizon
    shared = [t for t in range(1, horizon + 1)
              if t == 1 or t == horizon or t % record_every == 0]
    by_seed = []
    for res in results:
        indexed = {r.t: r for r in res.rows}
        by_seed.append([indexed[t] for t in shared if t in indexed])
    counts = {len(rows) for rows in by_seed}
    if len(counts) != 1:
        raise ValueError("seeds disagree on recorded checkpoints")

    m = len(results[0].rows[0].x)
    n = len(results[0].rows[0].y)
    names = ([f"x_{i + 1}" for i in range(m)] + [f"y_{j + 1}" for j in range(n)]
             + list(CSV_BASE_COLUMNS))

    def numeric(row: MetricsRow) -> list[float]:
        return list(row.x) + list(row.y) + [row.payoff_opt, row.payoff_learner,
                                            row.cum_regret_learner, row.cum_stackreg_opt]

    header = ["t"]
    for name in names:
        header += [f"mean_{name}", f"std_{name}"]
    out_rows = []
    for idx, t in enumerate([r.t for r in by_seed[0]]):
        block = np.array([numeric(rows[idx]) for rows in by_seed])
        mean = block.mean(axis=0)
        std = block.std(axis=0)
        row = [float(t)]
        for k in range(len(names)):
            row += [float(mean[k]), float(std[k])]
        out_rows.append(row)
    return header, out_rows


def write_aggregate_csv(path: str, results: list[SimulationResult],
                        record_every: int) -> None:
    header, rows = aggregate_rows(results, record_every)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join([str(int(row[0]))] + [repr(v) for v in row[1:]]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)
