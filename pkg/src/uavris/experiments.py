"""Experiment orchestration: spec loading/validation, the three studies
(objective fairness, min-SINR vs transmit power, one-bit vs continuous),
CSV emission and plot-script generation.

CSV conventions: UTF-8, comma-separated, header row, floats printed with
6 significant digits.  Every file is deterministic given (spec, seeds).
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .agent import DdpgHyperparams
from .env import Objective, Variant
from .metrics import db_to_linear, dbm_to_watts
from .scene import SystemConfig
from .training import RANDOM_SEARCH, TrainingTrace, run_random_search, run_training

__all__ = [
    "SpecError",
    "ExperimentSpec",
    "load_spec",
    "save_spec",
    "run_algorithm",
    "run_fairness",
    "run_pmax_sweep",
    "run_onebit_table",
    "emit_plot_script",
]

EXPERIMENTS = ("fairness", "pmax_sweep", "onebit_table")
ALGORITHMS = (Variant.IC.value, Variant.ORESOU.value, Variant.JOINT.value, RANDOM_SEARCH)
FLOAT_FMT = "%.6g"


class SpecError(ValueError):
    """Experiment spec failed to parse or validate."""


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: SystemConfig = SystemConfig()
    experiment: str = "pmax_sweep"
    objective: str = Objective.MAX_MIN_SINR.value
    algorithms: tuple[str, ...] = ALGORITHMS
    p_max_grid_dbm: tuple[float, ...] = (20.0, 25.0, 30.0, 35.0, 40.0, 45.0)
    iterations: int = 10_000
    seeds: tuple[int, ...] = (0, 1, 2)
    rolling_window: int = 300
    one_bit: bool = False
    output_dir: str = "results"
    ddpg: DdpgHyperparams | None = None  # None -> per-variant defaults

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise SpecError(f"experiment: {self.experiment!r} not one of {EXPERIMENTS}")
        if self.objective not in (o.value for o in Objective):
            raise SpecError(f"objective: unknown value {self.objective!r}")
        if not self.algorithms:
            raise SpecError("algorithms: must be nonempty")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise SpecError(f"algorithms: unknown algorithm {a!r}")
        if not self.seeds:
            raise SpecError("seeds: must be nonempty")
        if not self.p_max_grid_dbm:
            raise SpecError("p_max_grid_dbm: must be nonempty")
        for p in self.p_max_grid_dbm:
            if not 0.0 <= p <= 60.0:
                raise SpecError(f"p_max_grid_dbm: {p} outside [0, 60] dBm")
        if self.iterations < 1:
            raise SpecError("iterations: must be >= 1")
        if self.rolling_window < 1:
            raise SpecError("rolling_window: must be >= 1")


# scenario keys that arrive in dB/dBm and their watt/linear target fields
_DB_ALIASES = {
    "noise_power_dbm": ("noise_power", dbm_to_watts),
    "p_max_dbm": ("p_max", dbm_to_watts),
    "rician_bs_ris_db": ("rician_bs_ris", db_to_linear),
    "rician_ris_uav_db": ("rician_ris_uav", db_to_linear),
}


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(v) for v in x)
    return x


def _build_scenario(raw: dict) -> SystemConfig:
    known = {f.name for f in dataclasses.fields(SystemConfig)}
    kwargs = {}
    for key, value in raw.items():
        if key in _DB_ALIASES:
            target, conv = _DB_ALIASES[key]
            kwargs[target] = conv(value)
        elif key in known:
            kwargs[key] = _tuplify(value)
        else:
            raise SpecError(f"scenario.{key}: unknown field")
    try:
        return SystemConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"scenario: {exc}") from exc


def load_spec(path) -> ExperimentSpec:
    """Load and validate an experiment spec from a YAML file.

    Unspecified scenario fields default to the two-RIS / two-UAV scene.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise SpecError(f"cannot parse {path}{where}: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise SpecError(f"{path}: top level must be a mapping")

    kwargs = {}
    known = {f.name for f in dataclasses.fields(ExperimentSpec)}
    for key, value in raw.items():
        if key == "scenario":
            kwargs["scenario"] = _build_scenario(value or {})
        elif key == "ddpg":
            if value is None:
                continue
            try:
                kwargs["ddpg"] = DdpgHyperparams(**{
                    k: _tuplify(v) for k, v in (value or {}).items()
                })
            except (TypeError, ValueError) as exc:
                raise SpecError(f"ddpg: {exc}") from exc
        elif key in known:
            kwargs[key] = _tuplify(value)
        else:
            raise SpecError(f"{key}: unknown field")
    return ExperimentSpec(**kwargs)


def save_spec(spec: ExperimentSpec, path) -> None:
    """Serialize a spec to YAML such that load_spec returns it unchanged."""

    def plain(obj):
        if dataclasses.is_dataclass(obj):
            return {k: plain(v) for k, v in dataclasses.asdict(obj).items()}
        if isinstance(obj, tuple):
            return [plain(v) for v in obj]
        return obj

    doc = plain(spec)
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=False), encoding="utf-8")


def run_algorithm(
    algorithm: str,
    config: SystemConfig,
    iterations: int,
    seed: int,
    objective: str = Objective.MAX_MIN_SINR.value,
    one_bit: bool = False,
    hyper: DdpgHyperparams | None = None,
) -> TrainingTrace:
    """Run one (algorithm, config, seed) cell and return its trace."""
    if algorithm == RANDOM_SEARCH:
        return run_random_search(config, iterations=iterations, seed=seed, one_bit=one_bit)
    return run_training(
        config,
        Variant(algorithm),
        seed=seed,
        objective=objective,
        one_bit=one_bit,
        hyper=hyper,
        total_steps=iterations,
    )


def _fmt(x) -> str:
    if isinstance(x, float) or isinstance(x, np.floating):
        if np.isnan(x):
            return "nan"
        return FLOAT_FMT % x
    return str(x)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _trace_rows(trace: TrainingTrace, p_max_dbm: float, window: int) -> list[list]:
    rolling = trace.rolling_mean_sinr_db(window)
    rows = []
    for t in range(trace.n_steps):
        rows.append(
            [trace.algorithm, trace.objective, trace.seed, p_max_dbm, t]
            + list(trace.per_uav_sinr_db[t])
            + [trace.min_sinr_db[t]]
            + list(rolling[t])
            + [trace.best_min_sinr_db[t], trace.sum_rate[t]]
        )
    return rows


def _per_step_header(n_uav: int) -> list[str]:
    return (
        ["algorithm", "objective", "seed", "p_max_dbm", "step"]
        + [f"sinr_uav{u + 1}_db" for u in range(n_uav)]
        + ["min_sinr_db"]
        + [f"rolling_sinr_uav{u + 1}_db" for u in range(n_uav)]
        + ["best_min_sinr_db", "sum_rate"]
    )


def run_fairness(spec: ExperimentSpec, p_max_dbm: float = 35.0) -> Path:
    """Joint-DRL training under the max-sum-rate and then the max-min-SINR
    objective; per-step rows with rolling averages."""
    if spec.experiment != "fairness":
        raise SpecError(f"experiment is {spec.experiment!r}, expected 'fairness'")
    config = spec.scenario.with_p_max(dbm_to_watts(p_max_dbm))
    rows = []
    for objective in (Objective.MAX_SUM_RATE, Objective.MAX_MIN_SINR):
        for seed in spec.seeds:
            trace = run_algorithm(
                Variant.JOINT.value,
                config,
                spec.iterations,
                seed,
                objective=objective.value,
                one_bit=spec.one_bit,
                hyper=spec.ddpg,
            )
            rows.extend(_trace_rows(trace, p_max_dbm, spec.rolling_window))
    out = Path(spec.output_dir) / "fairness.csv"
    _write_csv(out, _per_step_header(spec.scenario.n_uav), rows)
    return out


def run_pmax_sweep(spec: ExperimentSpec) -> Path:
    """Best min-SINR per (algorithm, p_max, seed) cell plus seed means."""
    if spec.experiment != "pmax_sweep":
        raise SpecError(f"experiment is {spec.experiment!r}, expected 'pmax_sweep'")
    rows = []
    for algorithm in spec.algorithms:
        for p_dbm in spec.p_max_grid_dbm:
            config = spec.scenario.with_p_max(dbm_to_watts(p_dbm))
            cell = []
            for seed in spec.seeds:
                trace = run_algorithm(
                    algorithm,
                    config,
                    spec.iterations,
                    seed,
                    objective=spec.objective,
                    one_bit=spec.one_bit,
                    hyper=spec.ddpg,
                )
                cell.append(trace.final_best_min_sinr_db)
                rows.append([algorithm, p_dbm, seed, trace.final_best_min_sinr_db])
            rows.append([algorithm, p_dbm, "mean", float(np.mean(cell))])
    out = Path(spec.output_dir) / "pmax_sweep.csv"
    _write_csv(out, ["algorithm", "p_max_dbm", "seed", "best_min_sinr_db"], rows)
    return out


def run_onebit_table(spec: ExperimentSpec, p_max_dbm: float = 45.0) -> Path:
    """Continuous vs one-bit best min-SINR per algorithm, with the
    continuous-minus-one-bit difference, per seed and seed mean."""
    if spec.experiment != "onebit_table":
        raise SpecError(f"experiment is {spec.experiment!r}, expected 'onebit_table'")
    config = spec.scenario.with_p_max(dbm_to_watts(p_max_dbm))
    rows = []
    for algorithm in spec.algorithms:
        by_mode = {}
        for one_bit in (False, True):
            vals = []
            for seed in spec.seeds:
                trace = run_algorithm(
                    algorithm,
                    config,
                    spec.iterations,
                    seed,
                    objective=spec.objective,
                    one_bit=one_bit,
                    hyper=spec.ddpg,
                )
                vals.append(trace.final_best_min_sinr_db)
            by_mode["one_bit" if one_bit else "continuous"] = vals
        for i, seed in enumerate(spec.seeds):
            rows.append([algorithm, seed, p_max_dbm, "continuous", by_mode["continuous"][i]])
            rows.append([algorithm, seed, p_max_dbm, "one_bit", by_mode["one_bit"][i]])
            rows.append(
                [algorithm, seed, p_max_dbm, "difference",
                 by_mode["continuous"][i] - by_mode["one_bit"][i]]
            )
        c_mean = float(np.mean(by_mode["continuous"]))
        o_mean = float(np.mean(by_mode["one_bit"]))
        rows.append([algorithm, "mean", p_max_dbm, "continuous", c_mean])
        rows.append([algorithm, "mean", p_max_dbm, "one_bit", o_mean])
        rows.append([algorithm, "mean", p_max_dbm, "difference", c_mean - o_mean])
    out = Path(spec.output_dir) / "onebit_table.csv"
    _write_csv(out, ["algorithm", "seed", "p_max_dbm", "mode", "min_sinr_db"], rows)
    return out


_PLOT_TEMPLATE = '''\
#!/usr/bin/env python3
"""Render {kind} chart from {csv_name} (auto-generated)."""
import csv
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

with open({csv_name!r}, newline="", encoding="utf-8") as fh:
    rows = list(csv.DictReader(fh))

{body}
plt.savefig({png_name!r}, dpi=150, bbox_inches="tight")
print("wrote", {png_name!r})
'''

_BODY_SWEEP = '''\
series = defaultdict(list)
for r in rows:
    if r["seed"] == "mean":
        series[r["algorithm"]].append((float(r["p_max_dbm"]), float(r["best_min_sinr_db"])))
plt.figure(figsize=(6, 4))
for alg, pts in series.items():
    pts.sort()
    plt.plot([p for p, _ in pts], [v for _, v in pts], marker="o", label=alg)
plt.xlabel("P_max (dBm)")
plt.ylabel("best min-SINR (dB)")
plt.legend()
plt.grid(True, alpha=0.3)
'''

_BODY_FAIRNESS = '''\
objectives = sorted({{r["objective"] for r in rows}})
uav_cols = [c for c in rows[0] if c.startswith("rolling_sinr_uav")]
inst_cols = [c for c in rows[0] if c.startswith("sinr_uav")]
seed0 = rows[0]["seed"]
fig, axes = plt.subplots(len(objectives), 1, figsize=(7, 4 * len(objectives)), squeeze=False)
for ax, obj in zip(axes[:, 0], objectives):
    sub = [r for r in rows if r["objective"] == obj and r["seed"] == seed0]
    steps = [int(r["step"]) for r in sub]
    for col in inst_cols:
        vals = [float(r[col]) if r[col] != "nan" else float("nan") for r in sub]
        ax.plot(steps, vals, alpha=0.25, label=col + " (instant)")
    for col in uav_cols:
        vals = [float(r[col]) if r[col] != "nan" else float("nan") for r in sub]
        ax.plot(steps, vals, linewidth=2, label=col)
    ax.set_title("objective: " + obj)
    ax.set_xlabel("step")
    ax.set_ylabel("SINR (dB)")
    ax.legend(fontsize=7)
    ax.grid(True, alpha=0.3)
'''

_BODY_ONEBIT = '''\
algs, cont, onebit = [], [], []
for r in rows:
    if r["seed"] == "mean" and r["mode"] == "continuous":
        algs.append(r["algorithm"])
        cont.append(float(r["min_sinr_db"]))
for a in algs:
    for r in rows:
        if r["seed"] == "mean" and r["mode"] == "one_bit" and r["algorithm"] == a:
            onebit.append(float(r["min_sinr_db"]))
x = range(len(algs))
plt.figure(figsize=(6, 4))
plt.bar([i - 0.2 for i in x], cont, width=0.4, label="continuous")
plt.bar([i + 0.2 for i in x], onebit, width=0.4, label="one-bit")
plt.xticks(list(x), algs)
plt.ylabel("best min-SINR (dB)")
plt.legend()
plt.grid(True, axis="y", alpha=0.3)
'''


def emit_plot_script(csv_path) -> Path:
    """Write a standalone matplotlib script next to the CSV; the chart type
    is inferred from the header columns."""
    csv_path = Path(csv_path)
    with open(csv_path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh))
    cols = set(header)
    if {"step", "min_sinr_db", "objective"} <= cols:
        kind, body = "SINR-vs-step", _BODY_FAIRNESS
    elif {"mode", "min_sinr_db"} <= cols:
        kind, body = "one-bit comparison", _BODY_ONEBIT
    elif {"p_max_dbm", "best_min_sinr_db", "algorithm"} <= cols:
        kind, body = "min-SINR-vs-power", _BODY_SWEEP
    else:
        raise ValueError(f"{csv_path}: columns {sorted(cols)} match no known chart")
    out = csv_path.with_suffix(".plot.py")
    out.write_text(
        _PLOT_TEMPLATE.format(
            kind=kind,
            csv_name=csv_path.name,
            png_name=csv_path.with_suffix(".png").name,
            body=body.format(),
        ),
        encoding="utf-8",
    )
    return out
