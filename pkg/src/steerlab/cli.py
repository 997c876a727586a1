"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, NumericError
from .experiments import EXPERIMENT_NAMES, run_experiment
from .facets import facet_membership_grid
from .game import load_game_json
from .harness import run_from_specs, write_metrics_csv
from .stackelberg import solve_exact


def _parse_spec(raw: str, what: str) -> dict:
    try:
        spec = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} spec is not valid JSON: {exc}") from exc
    if not isinstance(spec, dict):
        raise ConfigError(f"{what} spec must be a JSON object")
    return spec


def _cmd_solve(args) -> int:
    game = load_game_json(args.game)
    solution = solve_exact(game)
    json.dump(solution.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_simulate(args) -> int:
    game = load_game_json(args.game)
    optimizer = _parse_spec(args.optimizer, "optimizer")
    learner = _parse_spec(args.learner, "learner")
    if args.rounds < 1:
        raise ConfigError("--rounds must be >= 1")
    if args.record_every < 1:
        raise ConfigError("--record-every must be >= 1")
    result = run_from_specs(game, optimizer, learner, args.rounds, args.seed,
                            record_every=args.record_every)
    write_metrics_csv(args.out, result)
    print(f"wrote {args.out} ({len(result.rows)} rows, horizon {args.rounds})")
    return 0


def _cmd_experiment(args) -> int:
    seeds = None
    if args.seeds:
        try:
            seeds = tuple(int(s) for s in args.seeds.split(","))
        except ValueError as exc:
            raise ConfigError(f"--seeds must be comma-separated integers: {exc}") from exc
    manifest = run_experiment(args.name, args.out, horizon=args.rounds,
                              seeds=seeds, record_every=args.record_every)
    n_csv = sum(len(r["csv_files"]) for r in manifest["runs"])
    print(f"experiment {args.name}: wrote {n_csv} CSV file(s) under {args.out}")
    return 0


def _cmd_facets(args) -> int:
    game = load_game_json(args.game)
    if args.resolution < 1:
        raise ConfigError("--resolution must be >= 1")
    try:
        points, member = facet_membership_grid(game.B, args.resolution)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    m = points.shape[1]
    n = member.shape[1]
    header = (",".join(f"x_{i + 1}" for i in range(m)) + ","
              + ",".join(f"in_E_{j + 1}" for j in range(n)))
    lines = [header]
    for p, row in zip(points, member):
        lines.append(",".join([repr(float(v)) for v in p]
                              + [str(int(v)) for v in row]))
    with open(args.out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {args.out} ({points.shape[0]} grid points)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steerlab",
        description="Repeated bimatrix games: commitment solvers, steering "
                    "algorithms, and experiment reproduction.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="print the exact commitment solution as JSON")
    p.add_argument("--game", required=True, help="path to a game JSON file")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("simulate", help="run one simulation and write a metrics CSV")
    p.add_argument("--game", required=True)
    p.add_argument("--optimizer", required=True, help='JSON, e.g. {"kind":"paal","d":0.01}')
    p.add_argument("--learner", required=True, help='JSON, e.g. {"kind":"oga","eta0":1.0}')
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("experiment", help="run a registered experiment")
    p.add_argument("--name", required=True,
                   help=f"one of: {', '.join(EXPERIMENT_NAMES)}")
    p.add_argument("--out", default="experiments")
    p.add_argument("--seeds", default=None, help="comma-separated integers")
    p.add_argument("--rounds", type=int, default=None,
                   help="override the registered horizon")
    p.add_argument("--record-every", type=int, default=None)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("facets", help="sample facet membership over a simplex grid")
    p.add_argument("--game", required=True)
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_facets)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
