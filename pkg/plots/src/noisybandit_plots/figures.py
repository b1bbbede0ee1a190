"""Figure construction for the four standard experiment presets.

A figure is a list of panels. Time panels draw one solid mean curve per
sweep value (plus a dashed per-round max where configured); endpoint panels
plot the final-round mean against a swept parameter. Rendering is read-only
and idempotent: the same CSV yields the same files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from matplotlib.figure import Figure

from .reader import MissingSweepPoint, ResultsTable, load_results

METRIC_LABELS = {
    "obs_param_err": "estimate error (observation space)",
    "param_err": "estimate error (context space)",
    "norm_regret": "regret / log t",
    "cum_reward": "cumulative reward",
    "cum_regret": "cumulative regret",
}


class UnknownFigure(ValueError):
    """No figure layout is defined for this preset."""


@dataclass(frozen=True)
class PanelSpec:
    name: str
    metric: str
    x: str  # "time" or a sweep parameter name
    curves: str  # sweep parameter giving one curve per value
    show_max: bool = False  # dashed per-round max alongside the mean
    fixed: dict = field(default_factory=dict)  # slice of the sweep grid


@dataclass(frozen=True)
class FigureSpec:
    preset: str
    panels: tuple[PanelSpec, ...]


_FIGURES = {
    "fig1_arms": FigureSpec(
        preset="fig1_arms",
        panels=(
            PanelSpec("obs_param_err_vs_time", "obs_param_err", "time", "arms", show_max=True),
            PanelSpec("norm_regret_vs_time", "norm_regret", "time", "arms", show_max=True),
        ),
    ),
    "fig2_estimability": FigureSpec(
        preset="fig2_estimability",
        panels=(
            PanelSpec("obs_param_err_vs_time", "obs_param_err", "time", "estimability", fixed={"explore_scale": 0.0}),
            PanelSpec("param_err_vs_time", "param_err", "time", "estimability", fixed={"explore_scale": 0.0}),
            PanelSpec("norm_regret_vs_explore_scale", "norm_regret", "explore_scale", "estimability"),
        ),
    ),
    "fig3_snr": FigureSpec(
        preset="fig3_snr",
        panels=(
            PanelSpec("obs_param_err_vs_snr_reward", "obs_param_err", "snr_reward", "snr_obs"),
            PanelSpec("param_err_vs_snr_reward", "param_err", "snr_reward", "snr_obs"),
            PanelSpec("norm_regret_vs_snr_reward", "norm_regret", "snr_reward", "snr_obs"),
        ),
    ),
    "fig4_dimension": FigureSpec(
        preset="fig4_dimension",
        panels=(
            PanelSpec("param_err_vs_time", "param_err", "time", "obs_dim"),
            PanelSpec("norm_regret_vs_time", "norm_regret", "time", "obs_dim"),
            PanelSpec("cum_reward_vs_time", "cum_reward", "time", "obs_dim"),
        ),
    ),
}

FIGURE_PRESETS = tuple(_FIGURES)


def figure_spec(preset: str) -> FigureSpec:
    if preset not in _FIGURES:
        raise UnknownFigure(f"no figure layout for preset {preset!r}")
    return _FIGURES[preset]


def _fmt(value: float) -> str:
    return format(value, "g")


def _label_for(table: ResultsTable, param: str, value: float, extra_fixed: dict) -> str:
    fixed = dict(extra_fixed)
    fixed[param] = value
    labels = table.select(**fixed)
    if len(labels) != 1:
        raise MissingSweepPoint(f"expected one sweep point for {fixed!r}, found {len(labels)}")
    return labels[0]


def build_panel(panel: PanelSpec, table: ResultsTable, log_y: bool = False) -> Figure:
    fig = Figure(figsize=(6.4, 4.4))
    ax = fig.add_subplot(111)
    curve_values = table.param_values(panel.curves)

    if panel.x == "time":
        ts = range(1, table.horizon + 1)
        for value in curve_values:
            label = _label_for(table, panel.curves, value, panel.fixed)
            ax.plot(ts, table.mean[label][panel.metric], label=f"{panel.curves}={_fmt(value)}")
            if panel.show_max:
                ax.plot(ts, table.max[label][panel.metric], linestyle="--",
                        color=ax.lines[-1].get_color(), label="_nolegend_")
        ax.set_xlabel("t")
    else:
        xs = table.param_values(panel.x)
        for value in curve_values:
            ys = [
                table.final_mean(_label_for(table, panel.curves, value, {panel.x: x, **panel.fixed}), panel.metric)
                for x in xs
            ]
            ax.plot(xs, ys, marker="o", label=f"{panel.curves}={_fmt(value)}")
        ax.set_xlabel(panel.x)

    if log_y:
        ax.set_yscale("log")
    ax.set_ylabel(METRIC_LABELS.get(panel.metric, panel.metric))
    title = METRIC_LABELS.get(panel.metric, panel.metric)
    if panel.show_max:
        title += " (solid: mean, dashed: worst case)"
    ax.set_title(title)
    ax.legend()
    return fig


def build_figures(spec: FigureSpec, table: ResultsTable, log_y: bool = False) -> list[tuple[str, Figure]]:
    """One (panel name, Figure) pair per panel; raises before any output."""
    return [(panel.name, build_panel(panel, table, log_y=log_y)) for panel in spec.panels]


def render(spec: FigureSpec, csv_path, out_dir, fmt: str = "png", log_y: bool = False) -> list[Path]:
    """Render every panel of a figure to <out_dir>/<preset>_<panel>.<fmt>."""
    table = load_results(csv_path)
    figures = build_figures(spec, table, log_y=log_y)  # validate fully before writing
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, fig in figures:
        path = out / f"{spec.preset}_{name}.{fmt}"
        fig.savefig(path, format=fmt, dpi=110)
        paths.append(path)
    return paths
