"""Experiment presets, configuration files, and CSV emission.

A preset is a parameter grid over a base environment. Four built-in presets
cover the standard analyses (arm count, estimability, signal-to-noise ratios,
observation dimension); ``custom`` is the all-defaults single point. Desk
scale runs 2000 rounds over 20 scenarios; paper scale 5000 over 50.

Per scenario, the runner draws the reward parameter, then the observation
matrix, then hands the same stream to the simulator, so a scenario id plus
the master seed pins every draw of the run. Sweep values never affect how
many draws setup consumes, which keeps scenarios paired across sweep points.

Config files are plain ``key = value`` text; ``#`` starts a comment.
Repeating a sweepable key turns its values into a grid dimension, and the
grid is the cross product of all such dimensions. A run's manifest is itself
a valid config file that reproduces the results byte for byte.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .environment import EnvironmentSpec, estimability_obs_matrix, orthonormal_obs_matrix, unit_row_obs_matrix
from .numerics import RngStream
from .simulator import AggregateSeries, ScenarioConfig, aggregate_traces, norm_regret_series, run_scenarios

DESK = {"horizon": 2000, "scenarios": 20}
PAPER = {"horizon": 5000, "scenarios": 50}
DEFAULT_MASTER_SEED = 123456789

PRESET_NAMES = ("fig1_arms", "fig2_estimability", "fig3_snr", "fig4_dimension", "custom")

CSV_COLUMNS = (
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

# Keys that may repeat in a config file to form grid dimensions.
SWEEPABLE_KEYS = (
    "arms",
    "context_dim",
    "obs_dim",
    "explore_scale",
    "estimability",
    "snr_reward",
    "snr_obs",
    "reward_noise_var",
)
_INT_KEYS = {"seed", "horizon", "scenarios", "arms", "context_dim", "obs_dim"}
_SCALAR_KEYS = ("preset", "scale", "seed", "horizon", "scenarios", "param_norm", "obs_matrix_kind", "shared_param", "code_version")
KNOWN_KEYS = set(SWEEPABLE_KEYS) | set(_SCALAR_KEYS)

OBS_MATRIX_KINDS = ("orthonormal", "estimability", "unit_rows")

# Stream id reserved for the run-wide reward parameter when shared_param is on.
SHARED_PARAM_STREAM_ID = 2**32


class UnknownPreset(ValueError):
    """Preset name not recognized."""


class ParseError(ValueError):
    """Config file is syntactically invalid; message carries the line number."""


class ValidationError(ValueError):
    """Config parsed but requests an invalid or contradictory experiment."""


@dataclass(frozen=True)
class ExperimentPreset:
    """A resolved experiment: base parameters plus an ordered sweep grid."""

    name: str
    grid: tuple[tuple[str, tuple[float, ...]], ...]
    base: dict
    scenarios: int
    horizon: int
    master_seed: int
    scale: str

    def points(self) -> list[dict]:
        """All sweep points, in deterministic cross-product order."""
        if not self.grid:
            return [{}]
        keys = [k for k, _ in self.grid]
        return [dict(zip(keys, combo)) for combo in itertools.product(*(vals for _, vals in self.grid))]


@dataclass(frozen=True)
class ExperimentSummary:
    name: str
    csv_path: Path
    manifest_path: Path
    points: dict[str, AggregateSeries]
    rows: int
    horizon: int
    scenarios: int


def _base_defaults() -> dict:
    return {
        "context_dim": 20,
        "obs_dim": 5,
        "arms": 5,
        "reward_noise_var": 1.0,
        "explore_scale": 0.0,
        "param_norm": "auto",  # concrete value: sqrt(context_dim)
        "obs_matrix_kind": "orthonormal",
        "shared_param": False,
        "estimability": None,
        "snr_reward": None,
        "snr_obs": None,
    }


def preset(name: str, scale: str = "desk", seed: int = DEFAULT_MASTER_SEED) -> ExperimentPreset:
    """Build a named preset at the given scale."""
    if name not in PRESET_NAMES:
        raise UnknownPreset(f"unknown preset {name!r}; choose one of {', '.join(PRESET_NAMES)}")
    if scale not in ("desk", "paper"):
        raise ValidationError(f"scale must be 'desk' or 'paper', got {scale!r}")
    size = DESK if scale == "desk" else PAPER
    base = _base_defaults()
    grid: tuple = ()
    if name == "fig1_arms":
        grid = (("arms", (5.0, 10.0, 20.0, 50.0)),)
    elif name == "fig2_estimability":
        base["obs_matrix_kind"] = "estimability"
        grid = (
            ("estimability", (0.25, 0.5, 0.75, 1.0)),
            ("explore_scale", (0.0, 1.0, 10.0, 100.0)),
        )
    elif name == "fig3_snr":
        values = (0.25, 1.0, 4.0) if scale == "desk" else (0.25, 0.5, 1.0, 2.0, 4.0)
        grid = (("snr_reward", values), ("snr_obs", values))
    elif name == "fig4_dimension":
        base["context_dim"] = 50
        base["obs_matrix_kind"] = "unit_rows"
        dims = (5.0, 20.0, 100.0) if scale == "desk" else (5.0, 20.0, 50.0, 100.0)
        grid = (("obs_dim", dims),)
    p = ExperimentPreset(
        name=name,
        grid=grid,
        base=base,
        scenarios=size["scenarios"],
        horizon=size["horizon"],
        master_seed=int(seed),
        scale=scale,
    )
    _validate(p)
    return p


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "on" if v else "off"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _fmt_sweep_value(v: float) -> str:
    return format(v, "g")


def point_label(point: dict) -> str:
    """Canonical 'key=value,key=value' label of a sweep point ('' if empty)."""
    return ",".join(f"{k}={_fmt_sweep_value(v)}" for k, v in point.items())


def _effective(base: dict, point: dict) -> dict:
    params = dict(base)
    params.update(point)
    for key in ("arms", "context_dim", "obs_dim"):
        params[key] = int(params[key])
    return params


def build_scenario(
    preset_: ExperimentPreset, point: dict, scenario_id: int
) -> tuple[ScenarioConfig, RngStream]:
    """Environment, config, and the continued stream for one scenario."""
    params = _effective(preset_.base, point)
    d_x = params["context_dim"]
    d_y = params["obs_dim"]
    stream = RngStream(preset_.master_seed, scenario_id)

    if params["shared_param"]:
        mu_raw = RngStream(preset_.master_seed, SHARED_PARAM_STREAM_ID).standard_normals(d_x)
    else:
        mu_raw = stream.standard_normals(d_x)
    norm = float(np.linalg.norm(mu_raw))
    if norm < 1e-12:  # pragma: no cover - probability ~0
        raise ValidationError("degenerate reward parameter draw")
    target_norm = math.sqrt(d_x) if params["param_norm"] == "auto" else float(params["param_norm"])
    mu = mu_raw * (target_norm / norm)

    kind = params["obs_matrix_kind"]
    if kind == "orthonormal":
        obs_matrix = orthonormal_obs_matrix(d_y, d_x, stream)
    elif kind == "estimability":
        obs_matrix = estimability_obs_matrix(mu, float(params["estimability"]), d_y, d_x, stream)
    else:
        obs_matrix = unit_row_obs_matrix(d_y, d_x, stream)

    obs_noise_scale = 1.0 if params["snr_obs"] is None else 1.0 / float(params["snr_obs"])
    if params["snr_reward"] is None:
        reward_noise_var = float(params["reward_noise_var"])
    else:
        reward_noise_var = float(mu @ mu) / float(params["snr_reward"])

    spec = EnvironmentSpec(
        context_dim=d_x,
        obs_dim=d_y,
        num_arms=params["arms"],
        reward_param=mu,
        obs_matrix=obs_matrix,
        context_cov=np.eye(d_x),
        obs_noise_cov=obs_noise_scale * np.eye(d_y),
        reward_noise_var=reward_noise_var,
    )
    config = ScenarioConfig(
        spec=spec,
        explore_scale=float(params["explore_scale"]),
        horizon=preset_.horizon,
        master_seed=preset_.master_seed,
        scenario_id=scenario_id,
    )
    return config, stream


def _validate(p: ExperimentPreset) -> None:
    if p.horizon < 1:
        raise ValidationError("horizon must be at least 1")
    if p.scenarios < 1:
        raise ValidationError("scenarios must be at least 1")
    if p.master_seed < 0:
        raise ValidationError("seed must be nonnegative")
    seen = set()
    for key, values in p.grid:
        if key not in SWEEPABLE_KEYS:
            raise ValidationError(f"{key} cannot be swept")
        if key in seen:
            raise ValidationError(f"duplicate grid dimension {key}")
        seen.add(key)
        if not values:
            raise ValidationError(f"empty grid for {key}")
    for point in (dict(p.points()[0]), {k: vals[-1] for k, vals in p.grid}):
        _validate_params(_effective(p.base, point))


def _validate_params(params: dict) -> None:
    if params["arms"] < 1 or params["context_dim"] < 1 or params["obs_dim"] < 1:
        raise ValidationError("arms and dimensions must be at least 1")
    if params["reward_noise_var"] is not None and float(params["reward_noise_var"]) <= 0:
        raise ValidationError("reward_noise_var must be positive")
    if float(params["explore_scale"]) < 0:
        raise ValidationError("explore_scale must be nonnegative")
    if params["param_norm"] != "auto" and float(params["param_norm"]) <= 0:
        raise ValidationError("param_norm must be positive or 'auto'")
    kind = params["obs_matrix_kind"]
    if kind not in OBS_MATRIX_KINDS:
        raise ValidationError(f"obs_matrix_kind must be one of {OBS_MATRIX_KINDS}, got {kind!r}")
    est = params["estimability"]
    if kind == "estimability":
        if est is None:
            raise ValidationError("obs_matrix_kind=estimability needs an estimability value")
        if not 0 < float(est) <= 1:
            raise ValidationError("estimability must be in (0, 1]")
        if params["snr_obs"] is not None and float(params["snr_obs"]) != 1.0:
            raise ValidationError("estimability targets require unit observation noise (snr_obs unset)")
        if int(params["context_dim"]) < int(params["obs_dim"]) + 1:
            raise ValidationError("estimability targets need context_dim >= obs_dim + 1")
    elif est is not None:
        raise ValidationError("estimability is only meaningful with obs_matrix_kind=estimability")
    if kind == "orthonormal" and int(params["obs_dim"]) > int(params["context_dim"]):
        raise ValidationError("orthonormal rows need obs_dim <= context_dim")
    for key in ("snr_reward", "snr_obs"):
        if params[key] is not None and float(params[key]) <= 0:
            raise ValidationError(f"{key} must be positive")


def run_experiment(preset_: ExperimentPreset, out_dir, workers: int = 1) -> ExperimentSummary:
    """Run every sweep point, write results.csv and manifest.txt, aggregate.

    Rows appear in sweep-point order, then scenario order, then time order,
    regardless of how many workers executed the scenarios.
    """
    out = Path(out_dir) / preset_.name
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "results.csv"
    manifest_path = out / "manifest.txt"

    aggregates: dict[str, AggregateSeries] = {}
    rows = 0
    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for point in preset_.points():
            label = point_label(point)
            built = [build_scenario(preset_, point, k) for k in range(preset_.scenarios)]
            configs = [c for c, _ in built]
            rngs = [r for _, r in built]
            traces = run_scenarios(configs, rngs=rngs, workers=workers)
            aggregates[label] = aggregate_traces(traces)
            for scenario_id, trace in enumerate(traces):
                fh.write(_scenario_rows(preset_.name, label, scenario_id, trace))
                rows += trace.horizon
    manifest_path.write_text(render_manifest(preset_))
    return ExperimentSummary(
        name=preset_.name,
        csv_path=csv_path,
        manifest_path=manifest_path,
        points=aggregates,
        rows=rows,
        horizon=preset_.horizon,
        scenarios=preset_.scenarios,
    )


def _scenario_rows(name: str, label: str, scenario_id: int, trace) -> str:
    f = lambda x: format(x, ".17g")
    norm_reg = norm_regret_series(trace.cum_regret)
    field = f'"{label}"' if "," in label else label  # CSV-quote multi-key labels
    head = f"{name},{field},{scenario_id},"
    lines = []
    for t in range(trace.horizon):
        nr = "" if t == 0 else f(norm_reg[t])
        lines.append(
            head
            + f"{t + 1},{trace.chosen_arm[t]},{f(trace.regret_increment[t])},"
            + f"{f(trace.cum_regret[t])},{nr},{f(trace.obs_param_err[t])},"
            + f"{f(trace.param_err[t])},{f(trace.cum_reward[t])}"
        )
    return "\n".join(lines) + "\n"


def render_manifest(p: ExperimentPreset) -> str:
    """Serialize a preset as a config file that reproduces the run."""
    from . import __version__

    lines = [
        "# noisybandit run manifest; rerun with: noisybandit run --config <this file> --out <dir>",
        f"code_version = {__version__}",
        f"preset = {p.name}",
        f"scale = {p.scale}",
        f"seed = {p.master_seed}",
        f"horizon = {p.horizon}",
        f"scenarios = {p.scenarios}",
    ]
    swept = {k for k, _ in p.grid}
    for key in ("context_dim", "obs_dim", "arms", "explore_scale", "reward_noise_var"):
        if key in swept:
            continue
        if key == "reward_noise_var" and (p.base["snr_reward"] is not None or "snr_reward" in swept):
            continue
        lines.append(f"{key} = {_fmt_value(p.base[key])}")
    lines.append(f"param_norm = {_fmt_value(p.base['param_norm'])}")
    lines.append(f"obs_matrix_kind = {p.base['obs_matrix_kind']}")
    lines.append(f"shared_param = {_fmt_value(p.base['shared_param'])}")
    for key in ("estimability", "snr_reward", "snr_obs"):
        if key not in swept and p.base[key] is not None:
            lines.append(f"{key} = {_fmt_value(p.base[key])}")
    for key, values in p.grid:
        for v in values:
            lines.append(f"{key} = {_fmt_value(float(v))}")
    return "\n".join(lines) + "\n"


def parse_config(path, base_preset: str | None = None, scale: str | None = None, seed: int | None = None) -> ExperimentPreset:
    """Parse a config file into a preset, with optional CLI-level overrides.

    ``base_preset`` supplies the preset when the file names none (a conflict
    raises); ``scale`` and ``seed`` override the file's values.
    """
    entries: dict[str, list[tuple[int, str]]] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in KNOWN_KEYS:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        entries.setdefault(key, []).append((lineno, value))

    for key, occurrences in entries.items():
        if key not in SWEEPABLE_KEYS and len(occurrences) > 1:
            raise ParseError(f"line {occurrences[1][0]}: key {key!r} given more than once")

    def single(key: str) -> str | None:
        return entries[key][0][1] if key in entries else None

    name = single("preset")
    if name is not None and base_preset is not None and name != base_preset:
        raise ValidationError(f"config names preset {name!r} but {base_preset!r} was requested")
    name = name or base_preset or "custom"
    eff_scale = scale or single("scale") or "desk"
    if eff_scale not in ("desk", "paper"):
        raise ValidationError(f"scale must be 'desk' or 'paper', got {eff_scale!r}")
    eff_seed = seed if seed is not None else _parse_number("seed", entries) if "seed" in entries else DEFAULT_MASTER_SEED

    p = preset(name, scale=eff_scale, seed=int(eff_seed))
    base = dict(p.base)
    horizon = p.horizon
    scenarios = p.scenarios
    if "horizon" in entries:
        horizon = int(_parse_number("horizon", entries))
    if "scenarios" in entries:
        scenarios = int(_parse_number("scenarios", entries))

    if "snr_reward" in entries and "reward_noise_var" in entries:
        raise ValidationError("snr_reward and reward_noise_var cannot both be set")

    grid = {k: list(v) for k, v in p.grid}
    order = [k for k, _ in p.grid]
    for key in SWEEPABLE_KEYS:
        if key not in entries:
            continue
        values = [_parse_value(key, lineno, raw) for lineno, raw in entries[key]]
        if len(values) == 1:
            base[key] = values[0]
            if key in grid:
                del grid[key]
                order.remove(key)
        else:
            if key not in grid:
                order.append(key)
            grid[key] = values
    for key in ("param_norm", "obs_matrix_kind", "shared_param"):
        if key in entries:
            base[key] = _parse_value(key, *entries[key][0])
    if (base.get("estimability") is not None or "estimability" in grid) and "obs_matrix_kind" not in entries:
        base["obs_matrix_kind"] = "estimability"

    out = ExperimentPreset(
        name=name,
        grid=tuple((k, tuple(float(v) for v in grid[k])) for k in order),
        base=base,
        scenarios=scenarios,
        horizon=horizon,
        master_seed=int(eff_seed),
        scale=eff_scale,
    )
    _validate(out)
    return out


def _parse_number(key: str, entries) -> int:
    lineno, raw = entries[key][0]
    try:
        return int(raw)
    except ValueError as exc:
        raise ParseError(f"line {lineno}: {key} must be an integer, got {raw!r}") from exc


def _parse_value(key: str, lineno: int, raw: str):
    if key == "obs_matrix_kind":
        return raw
    if key == "param_norm":
        if raw == "auto":
            return "auto"
        return _parse_float(key, lineno, raw)
    if key == "shared_param":
        if raw in ("on", "true", "yes"):
            return True
        if raw in ("off", "false", "no"):
            return False
        raise ParseError(f"line {lineno}: shared_param must be on or off, got {raw!r}")
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {key} must be an integer, got {raw!r}") from exc
    return _parse_float(key, lineno, raw)


def _parse_float(key: str, lineno: int, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ParseError(f"line {lineno}: {key} must be a number, got {raw!r}") from exc
    if not math.isfinite(value):
        raise ParseError(f"line {lineno}: {key} must be finite")
    return value


def describe(p: ExperimentPreset) -> str:
    """Human-readable summary of a preset's grid and defaults."""
    lines = [
        f"preset: {p.name} (scale={p.scale})",
        f"horizon: {p.horizon}   scenarios: {p.scenarios}   seed: {p.master_seed}",
        "grid:" if p.grid else "grid: (single point)",
    ]
    for key, values in p.grid:
        lines.append(f"  {key}: {', '.join(_fmt_sweep_value(v) for v in values)}")
    lines.append("base parameters:")
    for key in ("context_dim", "obs_dim", "arms", "reward_noise_var", "explore_scale", "param_norm", "obs_matrix_kind"):
        lines.append(f"  {key} = {_fmt_value(p.base[key])}")
    return "\n".join(lines)


PRESET_SUMMARIES = {
    "fig1_arms": "sweep the number of arms (5, 10, 20, 50)",
    "fig2_estimability": "sweep estimability targets x posterior exploration scales",
    "fig3_snr": "sweep reward and observation signal-to-noise ratios",
    "fig4_dimension": "sweep the observation dimension at context_dim=50",
    "custom": "single run with all defaults (override via --config)",
}
