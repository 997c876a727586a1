"""Render figures from steerlab metrics CSVs.

Consumes only the public CSV schema
    t,x_1..x_m,y_1..y_n,payoff_opt,payoff_learner,cum_regret_learner,
    cum_stackreg_opt,phase
plus the optional per-experiment manifest.json; no linkage to the simulator
internals.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

METRIC_COLUMNS = ("payoff_opt", "payoff_learner", "cum_regret_learner",
                  "cum_stackreg_opt")
KINDS = ("dynamics", "margin-comparison", "regret-sweep", "facet-plot")


class SchemaError(ValueError):
    """The input CSV does not carry the expected schema."""


@dataclass
class MetricsTable:
    t: np.ndarray
    xs: np.ndarray  # (rows, m)
    ys: np.ndarray  # (rows, n)
    metrics: dict[str, np.ndarray]
    phase: list[str]

    @property
    def explore_end(self) -> float | None:
        """Last round labelled 'explore', if any."""
        ts = [tv for tv, ph in zip(self.t, self.phase) if ph == "explore"]
        return float(max(ts)) if ts else None


def _count_prefixed(header: list[str], start: int, prefix: str) -> int:
    count = 0
    while start + count < len(header) and header[start + count] == f"{prefix}{count + 1}":
        count += 1
    return count


def read_metrics_csv(path: str) -> MetricsTable:
    """Parse a metrics CSV, enforcing the exact public schema."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, missing column 't'") from None
        rows = list(reader)
    if not header or header[0] != "t":
        raise SchemaError(f"{path}: missing column 't'")
    m = _count_prefixed(header, 1, "x_")
    if m == 0:
        raise SchemaError(f"{path}: missing column 'x_1'")
    n = _count_prefixed(header, 1 + m, "y_")
    if n == 0:
        raise SchemaError(f"{path}: missing column 'y_1'")
    expected_tail = list(METRIC_COLUMNS) + ["phase"]
    tail = header[1 + m + n:]
    for want in expected_tail:
        if want not in tail:
            raise SchemaError(f"{path}: missing column {want!r}")
    if tail != expected_tail:
        raise SchemaError(f"{path}: trailing columns {tail} do not match "
                          f"{expected_tail}")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.array([r[:-1] for r in rows], dtype=float)
    return MetricsTable(
        t=data[:, 0],
        xs=data[:, 1:1 + m],
        ys=data[:, 1 + m:1 + m + n],
        metrics={name: data[:, 1 + m + n + k] for k, name in enumerate(METRIC_COLUMNS)},
        phase=[r[-1] for r in rows],
    )


def read_facets_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse a facet-membership CSV: x_1..x_m,in_E_1..in_E_n."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, missing column 'x_1'") from None
        rows = list(reader)
    m = _count_prefixed(header, 0, "x_")
    if m == 0:
        raise SchemaError(f"{path}: missing column 'x_1'")
    n = 0
    while m + n < len(header) and header[m + n] == f"in_E_{n + 1}":
        n += 1
    if n == 0:
        raise SchemaError(f"{path}: missing column 'in_E_1'")
    if len(header) != m + n:
        raise SchemaError(f"{path}: unexpected trailing columns {header[m + n:]}")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    return data[:, :m], data[:, m:].astype(bool)


@dataclass
class FigureSpec:
    kind: str
    inputs: list[str]
    out: str
    labels: list[str] = field(default_factory=list)
    v_star: float | None = None
    x_star1: float | None = None
    title: str | None = None


def _label_for(spec: FigureSpec, idx: int) -> str:
    if idx < len(spec.labels):
        return spec.labels[idx]
    return os.path.splitext(os.path.basename(spec.inputs[idx]))[0]


def _shade_explore(ax, table: MetricsTable) -> None:
    end = table.explore_end
    if end is not None:
        ax.axvspan(1, end, color="red", alpha=0.12, lw=0)


def _render_dynamics(spec: FigureSpec) -> plt.Figure:
    fig, (ax_strat, ax_pay) = plt.subplots(2, 1, figsize=(9, 7), sharex=True)
    for idx, path in enumerate(spec.inputs):
        table = read_metrics_csv(path)
        label = _label_for(spec, idx)
        color = f"C{idx}"
        ax_strat.plot(table.t, table.xs[:, 0], color=color, label=f"{label} optimizer")
        ax_strat.plot(table.t, table.ys[:, 0], color=color, ls="--",
                      label=f"{label} learner")
        ax_pay.plot(table.t, table.metrics["payoff_opt"], color=color,
                    label=f"{label} optimizer")
        ax_pay.plot(table.t, table.metrics["payoff_learner"], color=color, ls="--",
                    label=f"{label} learner")
        if idx == 0:
            _shade_explore(ax_strat, table)
            _shade_explore(ax_pay, table)
    if spec.x_star1 is not None:
        ax_strat.axhline(spec.x_star1, color="black", ls=":", label="commitment x[0]")
    if spec.v_star is not None:
        ax_pay.axhline(spec.v_star, color="black", ls=":", label="commitment value")
    ax_strat.set_ylabel("first strategy coordinate")
    ax_pay.set_ylabel("per-round payoff")
    ax_pay.set_xlabel("round")
    ax_strat.legend(loc="best", fontsize=8)
    ax_pay.legend(loc="best", fontsize=8)
    return fig


def _render_margin_comparison(spec: FigureSpec) -> plt.Figure:
    fig, (ax_pay, ax_strat) = plt.subplots(2, 1, figsize=(9, 7), sharex=True)
    for idx, path in enumerate(spec.inputs):
        table = read_metrics_csv(path)
        label = _label_for(spec, idx)
        ax_pay.plot(table.t, table.metrics["payoff_opt"], color=f"C{idx}", label=label)
        ax_strat.plot(table.t, table.xs[:, 0], color=f"C{idx}", label=label)
        if idx == 0:
            _shade_explore(ax_pay, table)
            _shade_explore(ax_strat, table)
    if spec.v_star is not None:
        ax_pay.axhline(spec.v_star, color="black", ls=":", label="commitment value")
    if spec.x_star1 is not None:
        ax_strat.axhline(spec.x_star1, color="black", ls=":", label="commitment x[0]")
    ax_pay.set_ylabel("optimizer payoff")
    ax_strat.set_ylabel("optimizer x[0]")
    ax_strat.set_xlabel("round")
    ax_pay.legend(loc="best", fontsize=8)
    return fig


def _render_regret_sweep(spec: FigureSpec) -> plt.Figure:
    points = []
    for path in spec.inputs:
        table = read_metrics_csv(path)
        x2 = float(table.xs[0, 1])
        points.append((x2, float(table.metrics["cum_stackreg_opt"][-1])))
    points.sort()
    xs = [p[0] for p in points]
    regs = [p[1] for p in points]
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(xs, regs, marker="o")
    best = int(np.argmin(regs))
    ax.axvline(xs[best], color="black", ls=":",
               label=f"empirical argmin x2={xs[best]:.2f}")
    ax.set_xlabel("committed weight on the second row")
    ax.set_ylabel("final commitment regret")
    ax.legend(loc="best", fontsize=8)
    return fig


def _render_facet_plot(spec: FigureSpec) -> plt.Figure:
    points, member = read_facets_csv(spec.inputs[0])
    m = points.shape[1]
    n = member.shape[1]
    fig, ax = plt.subplots(figsize=(7, 6))
    if m == 2:
        for j in range(n):
            sel = member[:, j]
            ax.scatter(points[sel, 0], np.full(sel.sum(), j), s=6, label=f"E_{j + 1}")
        ax.set_xlabel("first coordinate p")
        ax.set_ylabel("facet index")
        ax.set_yticks(range(n))
    else:
        # Barycentric projection of the 3-simplex.
        u = points[:, 1] + 0.5 * points[:, 2]
        v = (np.sqrt(3) / 2) * points[:, 2]
        colors = np.argmax(member, axis=1)
        sc = ax.scatter(u, v, c=colors, s=6, cmap="viridis")
        fig.colorbar(sc, ax=ax, label="facet of the best response")
        ax.set_aspect("equal")
        ax.set_axis_off()
    if m == 2:
        ax.legend(loc="best", fontsize=8)
    return fig


_RENDERERS = {
    "dynamics": _render_dynamics,
    "margin-comparison": _render_margin_comparison,
    "regret-sweep": _render_regret_sweep,
    "facet-plot": _render_facet_plot,
}


def render(spec: FigureSpec) -> str:
    """Render one figure; returns the output path.

    Inputs are validated before any drawing, so a schema violation never
    leaves a partial output file behind.
    """
    if spec.kind not in _RENDERERS:
        raise ValueError(f"unknown figure kind {spec.kind!r}; expected one of {KINDS}")
    if not spec.inputs:
        raise ValueError("no input CSVs given")
    for path in spec.inputs:
        if not os.path.exists(path):
            raise SchemaError(f"{path}: no such file")
    # Validation pass first.
    for path in spec.inputs:
        if spec.kind == "facet-plot":
            read_facets_csv(path)
        else:
            read_metrics_csv(path)
    fig = _RENDERERS[spec.kind](spec)
    if spec.title:
        fig.suptitle(spec.title)
    fig.savefig(spec.out, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return spec.out


def _first_csv(exp_dir: str, prefix: str) -> str | None:
    names = sorted(f for f in os.listdir(exp_dir)
                   if f.startswith(prefix) and f.endswith(".csv")
                   and "aggregate" not in f)
    return os.path.join(exp_dir, names[0]) if names else None


def render_all(experiments_dir: str, out_dir: str | None = None) -> list[str]:
    """Map experiment directories to their figure analogues.

    Expects the four dynamics/margin experiments (matching-pennies, instance1,
    instance2, pamd-kl) under ``experiments_dir``; reads each manifest.json
    for reference lines when present.
    """
    out_dir = out_dir or experiments_dir
    os.makedirs(out_dir, exist_ok=True)
    written = []
    dynamics_names = ("matching-pennies", "instance1", "instance2")
    for name in dynamics_names + ("pamd-kl",):
        exp_dir = os.path.join(experiments_dir, name)
        if not os.path.isdir(exp_dir):
            raise SchemaError(f"experiment directory {exp_dir!r} not found; "
                              "run the experiment first")
        v_star = x_star1 = None
        manifest_path = os.path.join(exp_dir, "manifest.json")
        if os.path.exists(manifest_path):
            with open(manifest_path) as fh:
                manifest = json.load(fh)
            if manifest.get("runs"):
                v_star = manifest["runs"][0].get("stackelberg_value")
                xs = manifest["runs"][0].get("stackelberg_x")
                x_star1 = xs[0] if xs else None
        if name in dynamics_names:
            inputs, labels = [], []
            for prefix in ("paal", "oga"):
                path = _first_csv(exp_dir, prefix)
                if path:
                    inputs.append(path)
                    labels.append(prefix)
            kind = "dynamics"
        else:
            inputs = sorted(
                os.path.join(exp_dir, f) for f in os.listdir(exp_dir)
                if f.startswith("pamd_d") and f.endswith(".csv")
                and "aggregate" not in f)
            labels = [os.path.basename(p).split("_seed")[0].replace("pamd_", "")
                      for p in inputs]
            kind = "margin-comparison"
        out = os.path.join(out_dir, f"{name}_{kind}.png")
        render(FigureSpec(kind=kind, inputs=inputs, out=out, labels=labels,
                          v_star=v_star, x_star1=x_star1, title=name))
        written.append(out)
    return written
