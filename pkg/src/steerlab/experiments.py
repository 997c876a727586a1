"""Registry of named experiments and their game instances.

Each experiment expands to a list of runs (label, game, optimizer spec,
learner spec); running one writes per-seed CSVs, an aggregate CSV when there
are multiple seeds, and a manifest.json carrying the games and their exact
Stackelberg solutions for downstream plotting.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .game import GameInstance
from .harness import (ensure_dir, run_from_specs, write_aggregate_csv,
                      write_metrics_csv)
from .stackelberg import solve_exact

GAMES: dict[str, GameInstance] = {
    # Zero-sum classic: commitment and Nash coincide at the uniform mix.
    "matching-pennies": GameInstance(A=[[1.0, -1.0], [-1.0, 1.0]],
                                     B=[[-1.0, 1.0], [1.0, -1.0]]),
    # Commitment value 3 at (3/5, 2/5); online play against it oscillates.
    "instance1": GameInstance(A=[[5.0, 0.0], [0.0, 3.0]],
                              B=[[-2.0, 2.0], [3.0, -3.0]]),
    # Unique Nash at the bottom-right corner pays 1; commitment pays more.
    "instance2": GameInstance(A=[[2.0, 0.0], [3.0, 1.0]],
                              B=[[1.0, 0.0], [0.0, 2.0]]),
    # Mirror-ascent steering target with commitment value 2 at (3/5, 2/5).
    "kl-steering": GameInstance(A=[[0.0, 1.0], [5.0, 0.0]],
                                B=[[2.0, -2.0], [-3.0, 3.0]]),
    # Regret-budget lower-bound game: value 3/2 at the uniform mix.
    "lower-bound": GameInstance(A=[[0.0, 0.0], [3.0, 1.0]],
                                B=[[1.0, 0.0], [0.0, 1.0]]),
}

AMBIGUITY_EPSILON = 0.1
# Two games sharing the optimizer payoff but with opposite equilibria; no
# optimizer can steer both against a regret-tracking adversary.
GAMES["ambiguity-g1"] = GameInstance(
    A=[[0.0, 0.0], [1.0, AMBIGUITY_EPSILON]],
    B=[[0.0, AMBIGUITY_EPSILON], [0.0, 1.0]])
GAMES["ambiguity-g2"] = GameInstance(
    A=[[0.0, 0.0], [1.0, AMBIGUITY_EPSILON]],
    B=[[1.0, 0.0], [0.0, 1.0]])

LOWER_BOUND_X2_GRID = tuple(round(0.30 + 0.01 * k, 2) for k in range(20))
PAMD_MARGINS = (0.01, 0.02, 0.05)

# Reproduction defaults: dynamics experiments run 1e5 rounds with learner
# eta0 = 1 and an eta0 = 0.5 gradient-ascent baseline; the deterministic
# lower-bound sweep runs 1e6 rounds.
DEFAULT_HORIZON = 100_000
LOWER_BOUND_HORIZON = 1_000_000
DEFAULT_SEEDS = (0,)


@dataclass(frozen=True)
class RunSpec:
    label: str
    game_name: str
    game: GameInstance
    optimizer: dict
    learner: dict
    horizon: int
    record_every: int
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    deterministic: bool = False


@dataclass(frozen=True)
class ExperimentPlan:
    name: str
    runs: tuple[RunSpec, ...] = field(default_factory=tuple)


def _dynamics_plan(name: str, horizon: int, seeds: tuple[int, ...],
                   record_every: int) -> ExperimentPlan:
    game = GAMES[name]
    learner = {"kind": "oga", "eta0": 1.0}
    runs = (
        RunSpec(label="paal", game_name=name, game=game,
                optimizer={"kind": "paal", "d": 0.01}, learner=learner,
                horizon=horizon, record_every=record_every, seeds=seeds),
        RunSpec(label="oga", game_name=name, game=game,
                optimizer={"kind": "oga", "eta0": 0.5}, learner=learner,
                horizon=horizon, record_every=record_every, seeds=seeds),
    )
    return ExperimentPlan(name=name, runs=runs)


def _pamd_plan(horizon: int, seeds: tuple[int, ...], record_every: int) -> ExperimentPlan:
    game = GAMES["kl-steering"]
    runs = []
    for d in PAMD_MARGINS:
        runs.append(RunSpec(
            label=f"pamd_d{d}", game_name="kl-steering", game=game,
            optimizer={"kind": "pamd", "k": 50, "margin": d, "slack": 0.0,
                       "learner_eta0": 1.0},
            learner={"kind": "kl", "eta0": 1.0, "noise": 0.05},
            horizon=horizon, record_every=record_every, seeds=seeds))
    return ExperimentPlan(name="pamd-kl", runs=tuple(runs))


def _lower_bound_plan(horizon: int, record_every: int) -> ExperimentPlan:
    game = GAMES["lower-bound"]
    budget = float(horizon) ** 0.6
    runs = []
    for x2 in LOWER_BOUND_X2_GRID:
        runs.append(RunSpec(
            label=f"x2_{x2:.2f}", game_name="lower-bound", game=game,
            optimizer={"kind": "fixed", "x": [1.0 - x2, x2]},
            learner={"kind": "budget", "budget": budget},
            horizon=horizon, record_every=record_every, seeds=(0,),
            deterministic=True))
    return ExperimentPlan(name="lower-bound-sweep", runs=tuple(runs))


def _impossibility_plan(horizon: int, seeds: tuple[int, ...],
                        record_every: int) -> ExperimentPlan:
    g1 = GAMES["ambiguity-g1"]
    g2 = GAMES["ambiguity-g2"]
    threshold = float(np.sqrt(horizon * np.sqrt(horizon)))
    optimizer = {"kind": "fixed", "x": [0.0, 1.0]}  # tuned to the g1 equilibrium
    learner = {"kind": "switcher", "reference_a": [list(r) for r in g1.A],
               "epsilon": AMBIGUITY_EPSILON, "threshold": threshold, "eta0": 1.0}
    runs = (
        RunSpec(label="g1", game_name="ambiguity-g1", game=g1, optimizer=optimizer,
                learner=learner, horizon=horizon, record_every=record_every,
                seeds=seeds),
        RunSpec(label="g2", game_name="ambiguity-g2", game=g2, optimizer=optimizer,
                learner=learner, horizon=horizon, record_every=record_every,
                seeds=seeds),
    )
    return ExperimentPlan(name="impossibility", runs=runs)


EXPERIMENT_NAMES = ("matching-pennies", "instance1", "instance2", "pamd-kl",
                    "lower-bound-sweep", "impossibility")
# The four dynamics/margin experiments with figure analogues.
FIGURE_EXPERIMENTS = ("matching-pennies", "instance1", "instance2", "pamd-kl")


def experiment_plan(name: str, *, horizon: int | None = None,
                    seeds: tuple[int, ...] | None = None,
                    record_every: int | None = None) -> ExperimentPlan:
    if name not in EXPERIMENT_NAMES:
        raise ConfigError(f"unknown experiment {name!r}; registered: "
                          f"{', '.join(EXPERIMENT_NAMES)}")
    seeds = tuple(seeds) if seeds else DEFAULT_SEEDS
    if name in ("matching-pennies", "instance1", "instance2"):
        return _dynamics_plan(name, horizon or DEFAULT_HORIZON, seeds,
                              record_every or 10)
    if name == "pamd-kl":
        return _pamd_plan(horizon or DEFAULT_HORIZON, seeds, record_every or 10)
    if name == "lower-bound-sweep":
        return _lower_bound_plan(horizon or LOWER_BOUND_HORIZON,
                                 record_every or 10_000)
    return _impossibility_plan(horizon or DEFAULT_HORIZON, seeds,
                               record_every or 10)


def run_experiment(name: str, out_dir: str, *, horizon: int | None = None,
                   seeds: tuple[int, ...] | None = None,
                   record_every: int | None = None) -> dict:
    """Execute a registered experiment; returns the manifest written to disk."""
    plan = experiment_plan(name, horizon=horizon, seeds=seeds,
                           record_every=record_every)
    exp_dir = os.path.join(out_dir, plan.name)
    ensure_dir(exp_dir)
    manifest: dict = {"experiment": plan.name, "runs": []}
    for run in plan.runs:
        solution = solve_exact(run.game)
        results = []
        csv_paths = []
        for seed in run.seeds:
            res = run_from_specs(run.game, run.optimizer, run.learner,
                                 run.horizon, seed,
                                 record_every=run.record_every,
                                 v_star=solution.value)
            path = os.path.join(exp_dir, f"{run.label}_seed{seed}.csv")
            write_metrics_csv(path, res)
            csv_paths.append(path)
            results.append(res)
        agg_path = None
        if len(results) > 1:
            agg_path = os.path.join(exp_dir, f"{run.label}_aggregate.csv")
            write_aggregate_csv(agg_path, results, run.record_every)
        manifest["runs"].append({
            "label": run.label,
            "game": run.game_name,
            "A": [list(map(float, row)) for row in run.game.A],
            "B": [list(map(float, row)) for row in run.game.B],
            "horizon": run.horizon,
            "optimizer": run.optimizer,
            "learner": run.learner,
            "stackelberg_value": solution.value,
            "stackelberg_x": [float(v) for v in solution.x_star],
            "csv_files": [os.path.basename(p) for p in csv_paths],
            "aggregate": None if agg_path is None else os.path.basename(agg_path),
        })
    with open(os.path.join(exp_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
    return manifest
