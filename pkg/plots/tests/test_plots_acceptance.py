"""Acceptance: render desk-scale results for all four presets, produced by
the simulator CLI, and check panel counts, per-value curves, and legends.
Generating the CSVs dominates the runtime (a few minutes on one core)."""

import subprocess
import sys

import pytest

from noisybandit_plots.figures import build_figures, figure_spec, render
from noisybandit_plots.reader import load_results

EXPECTED_PANELS = {
    "fig1_arms": 2,
    "fig2_estimability": 3,
    "fig3_snr": 3,
    "fig4_dimension": 3,
}
SWEEP_LEGENDS = {
    "fig1_arms": ["arms=5", "arms=10", "arms=20", "arms=50"],
    "fig2_estimability": ["estimability=0.25", "estimability=0.5", "estimability=0.75", "estimability=1"],
    "fig3_snr": ["snr_obs=0.25", "snr_obs=1", "snr_obs=4"],
    "fig4_dimension": ["obs_dim=5", "obs_dim=20", "obs_dim=100"],
}


@pytest.fixture(scope="session")
def desk_results(tmp_path_factory):
    out = tmp_path_factory.mktemp("desk_results")
    for preset in EXPECTED_PANELS:
        cmd = [sys.executable, "-m", "noisybandit", "run", "--preset", preset, "--scale", "desk", "--out", str(out)]
        proc = subprocess.run(cmd, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    return out


@pytest.mark.parametrize("preset", sorted(EXPECTED_PANELS))
def test_desk_render_structure(preset, desk_results, tmp_path):
    csv_path = desk_results / preset / "results.csv"
    table = load_results(csv_path)
    figures = build_figures(figure_spec(preset), table)
    assert len(figures) == EXPECTED_PANELS[preset]
    for name, fig in figures:
        assert len(fig.axes) == 1
        ax = fig.axes[0]
        legend_texts = [t.get_text() for t in ax.get_legend().get_texts()]
        assert legend_texts == SWEEP_LEGENDS[preset], name
        solid = [l for l in ax.lines if l.get_linestyle() == "-"]
        assert len(solid) == len(SWEEP_LEGENDS[preset])

    paths = render(figure_spec(preset), csv_path, tmp_path / "figs")
    assert len(paths) == EXPECTED_PANELS[preset]
    assert all(p.exists() for p in paths)
    print(f"PASS {preset}: {len(figures)} panels, {len(SWEEP_LEGENDS[preset])} curves each")
