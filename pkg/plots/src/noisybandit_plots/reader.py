"""Load and aggregate noisybandit results.csv files.

The CSV schema is the contract between the simulator and this package:

    experiment,sweep,scenario_id,t,chosen_arm,regret_increment,
    cum_regret,norm_regret,obs_param_err,param_err,cum_reward

one row per (sweep point, scenario, round). The ``sweep`` field is a
``key=value,key=value`` label ('' for a single-point run); ``norm_regret``
is empty at t=1. All curve values are recomputed here from the rows alone.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

EXPECTED_COLUMNS = (
    "experiment",
    "sweep",
    "scenario_id",
    "t",
    "chosen_arm",
    "regret_increment",
    "cum_regret",
    "norm_regret",
    "obs_param_err",
    "param_err",
    "cum_reward",
)

METRICS = ("regret_increment", "cum_regret", "norm_regret", "obs_param_err", "param_err", "cum_reward")


class SchemaMismatch(ValueError):
    """The CSV does not conform to the results schema."""


class MissingSweepPoint(ValueError):
    """A figure needs a sweep dimension or value the CSV does not contain."""


def parse_sweep_label(label: str) -> dict[str, float]:
    """'a=1,b=0.5' -> {'a': 1.0, 'b': 0.5}; '' -> {}."""
    if not label:
        return {}
    out: dict[str, float] = {}
    for part in label.split(","):
        key, sep, value = part.partition("=")
        if not sep or not key:
            raise SchemaMismatch(f"malformed sweep label {label!r}")
        try:
            out[key] = float(value)
        except ValueError as exc:
            raise SchemaMismatch(f"malformed sweep value in {label!r}") from exc
    return out


@dataclass(frozen=True)
class ResultsTable:
    """Per-sweep-point series aggregated across scenarios."""

    experiment: str
    sweeps: tuple[str, ...]  # labels in file order
    params: dict[str, dict[str, float]]  # label -> parsed key/values
    mean: dict[str, dict[str, np.ndarray]]  # label -> metric -> (T,)
    max: dict[str, dict[str, np.ndarray]]
    scenarios: int
    horizon: int

    def param_values(self, key: str) -> list[float]:
        """Sorted distinct values of one sweep parameter."""
        if any(key not in p for p in self.params.values()):
            raise MissingSweepPoint(f"sweep parameter {key!r} missing from the results")
        return sorted({p[key] for p in self.params.values()})

    def select(self, **fixed: float) -> list[str]:
        """Labels whose parameters match all given values."""
        hits = [
            label
            for label in self.sweeps
            if all(key in self.params[label] and self.params[label][key] == value for key, value in fixed.items())
        ]
        if not hits:
            raise MissingSweepPoint(f"no sweep point matches {fixed!r}")
        return hits

    def final_mean(self, label: str, metric: str) -> float:
        return float(self.mean[label][metric][-1])


def load_results(path) -> ResultsTable:
    """Read one results.csv into per-sweep aggregates."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch(f"{path} is empty")
        if tuple(header) != EXPECTED_COLUMNS:
            raise SchemaMismatch(f"{path} header {header!r} does not match the results schema")

        experiment = None
        series: dict[str, dict[int, dict[str, list[float]]]] = {}
        order: list[str] = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(EXPECTED_COLUMNS):
                raise SchemaMismatch(f"{path}:{lineno}: expected {len(EXPECTED_COLUMNS)} fields")
            experiment = row[0] if experiment is None else experiment
            label, scenario = row[1], int(row[2])
            if label not in series:
                series[label] = {}
                order.append(label)
            per_scenario = series[label].setdefault(scenario, {metric: [] for metric in METRICS})
            try:
                values = {
                    "regret_increment": float(row[5]),
                    "cum_regret": float(row[6]),
                    "norm_regret": float(row[7]) if row[7] else np.nan,
                    "obs_param_err": float(row[8]),
                    "param_err": float(row[9]),
                    "cum_reward": float(row[10]),
                }
            except ValueError as exc:
                raise SchemaMismatch(f"{path}:{lineno}: non-numeric metric value") from exc
            for metric in METRICS:
                per_scenario[metric].append(values[metric])

    if not series:
        raise SchemaMismatch(f"{path} contains a header but no rows")

    horizons = {len(m["cum_regret"]) for by_s in series.values() for m in by_s.values()}
    if len(horizons) != 1:
        raise SchemaMismatch(f"{path}: scenarios disagree on horizon {sorted(horizons)}")
    horizon = horizons.pop()
    counts = {len(by_s) for by_s in series.values()}
    if len(counts) != 1:
        raise SchemaMismatch(f"{path}: sweep points disagree on scenario count {sorted(counts)}")

    mean: dict[str, dict[str, np.ndarray]] = {}
    mx: dict[str, dict[str, np.ndarray]] = {}
    for label, by_scenario in series.items():
        stacked = {
            metric: np.stack([np.asarray(by_scenario[s][metric]) for s in sorted(by_scenario)])
            for metric in METRICS
        }
        mean[label] = {metric: arr.mean(axis=0) for metric, arr in stacked.items()}
        mx[label] = {metric: arr.max(axis=0) for metric, arr in stacked.items()}

    return ResultsTable(
        experiment=experiment or "",
        sweeps=tuple(order),
        params={label: parse_sweep_label(label) for label in order},
        mean=mean,
        max=mx,
        scenarios=counts.pop(),
        horizon=horizon,
    )
