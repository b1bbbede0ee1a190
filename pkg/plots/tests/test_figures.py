import numpy as np
import pytest

from noisybandit_plots.cli import main
from noisybandit_plots.figures import UnknownFigure, build_figures, figure_spec, render
from noisybandit_plots.reader import MissingSweepPoint, SchemaMismatch, load_results
from helpers_csv import HEADER, write_results_csv

EXPECTED_PANELS = {
    "fig1_arms": 2,
    "fig2_estimability": 3,
    "fig3_snr": 3,
    "fig4_dimension": 3,
}
EXPECTED_CURVES = {
    "fig1_arms": ["arms=5", "arms=10", "arms=20", "arms=50"],
    "fig2_estimability": ["estimability=0.25", "estimability=0.5", "estimability=0.75", "estimability=1"],
    "fig3_snr": ["snr_obs=0.25", "snr_obs=1", "snr_obs=4"],
    "fig4_dimension": ["obs_dim=5", "obs_dim=20", "obs_dim=100"],
}


@pytest.mark.parametrize("preset", sorted(EXPECTED_PANELS))
def test_panel_and_curve_structure(preset, make_csv):
    table = load_results(make_csv(preset))
    figures = build_figures(figure_spec(preset), table)
    assert len(figures) == EXPECTED_PANELS[preset]
    for _, fig in figures:
        assert len(fig.axes) == 1
        ax = fig.axes[0]
        legend_texts = [t.get_text() for t in ax.get_legend().get_texts()]
        assert legend_texts == EXPECTED_CURVES[preset]


def test_fig1_mean_and_max_lines(make_csv):
    table = load_results(make_csv("fig1_arms"))
    figures = build_figures(figure_spec("fig1_arms"), table)
    for _, fig in figures:
        ax = fig.axes[0]
        solid = [l for l in ax.lines if l.get_linestyle() == "-"]
        dashed = [l for l in ax.lines if l.get_linestyle() == "--"]
        assert len(solid) == 4 and len(dashed) == 4


def test_fig2_time_panels_use_greedy_slice(make_csv):
    table = load_results(make_csv("fig2_estimability"))
    name, fig = build_figures(figure_spec("fig2_estimability"), table)[0]
    assert name == "obs_param_err_vs_time"
    line = fig.axes[0].lines[0]  # estimability=0.25 curve
    expected = table.mean["estimability=0.25,explore_scale=0"]["obs_param_err"]
    np.testing.assert_allclose(line.get_ydata(), expected)


def test_fig2_endpoint_panel_axes(make_csv):
    table = load_results(make_csv("fig2_estimability"))
    _, fig = build_figures(figure_spec("fig2_estimability"), table)[-1]
    line = fig.axes[0].lines[0]
    np.testing.assert_allclose(line.get_xdata(), [0.0, 1.0, 10.0, 100.0])
    expected = [
        table.final_mean(f"estimability=0.25,explore_scale={c:g}", "norm_regret")
        for c in (0.0, 1.0, 10.0, 100.0)
    ]
    np.testing.assert_allclose(line.get_ydata(), expected)


def test_fig3_endpoint_values(make_csv):
    table = load_results(make_csv("fig3_snr"))
    _, fig = build_figures(figure_spec("fig3_snr"), table)[2]
    line = fig.axes[0].lines[0]  # snr_obs=0.25
    np.testing.assert_allclose(line.get_xdata(), [0.25, 1.0, 4.0])
    expected = [
        table.final_mean(f"snr_reward={r:g},snr_obs=0.25", "norm_regret") for r in (0.25, 1.0, 4.0)
    ]
    np.testing.assert_allclose(line.get_ydata(), expected)


def test_missing_sweep_dimension(tmp_path):
    # estimability grid present but no explore_scale dimension
    path = write_results_csv(
        tmp_path / "r.csv", "fig2_estimability", [f"estimability={e:g}" for e in (0.25, 0.5, 0.75, 1.0)]
    )
    with pytest.raises(MissingSweepPoint):
        build_figures(figure_spec("fig2_estimability"), load_results(path))


def test_empty_csv_no_partial_output(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER + "\n")
    out = tmp_path / "figs"
    with pytest.raises(SchemaMismatch):
        render(figure_spec("fig1_arms"), path, out)
    assert not out.exists()


def test_render_writes_one_image_per_panel(make_csv, tmp_path):
    out = tmp_path / "figs"
    paths = render(figure_spec("fig4_dimension"), make_csv("fig4_dimension"), out)
    assert len(paths) == 3
    for path in paths:
        assert path.exists() and path.suffix == ".png"
        assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_render_is_idempotent(make_csv, tmp_path):
    out = tmp_path / "figs"
    csv_path = make_csv("fig1_arms")
    first = render(figure_spec("fig1_arms"), csv_path, out)
    second = render(figure_spec("fig1_arms"), csv_path, out)
    assert first == second
    assert sorted(p.name for p in out.iterdir()) == sorted(p.name for p in first)


def test_svg_format(make_csv, tmp_path):
    paths = render(figure_spec("fig1_arms"), make_csv("fig1_arms"), tmp_path / "f", fmt="svg")
    assert all(p.suffix == ".svg" for p in paths)
    assert b"<svg" in paths[0].read_bytes()[:200]


def test_unknown_preset():
    with pytest.raises(UnknownFigure):
        figure_spec("custom")


class TestCli:
    def test_plot_success(self, make_csv, tmp_path, capsys):
        csv_path = make_csv("fig1_arms")
        in_dir = tmp_path / "out" / "fig1_arms"
        in_dir.mkdir(parents=True)
        (in_dir / "results.csv").write_bytes(csv_path.read_bytes())
        code = main(["plot", "--preset", "fig1_arms", "--in", str(tmp_path / "out"), "--out", str(tmp_path / "figs")])
        assert code == 0
        assert len(list((tmp_path / "figs").iterdir())) == 2
        assert "fig1_arms_obs_param_err_vs_time" in capsys.readouterr().out

    def test_missing_results_exits_one(self, tmp_path, capsys):
        assert main(["plot", "--preset", "fig1_arms", "--in", str(tmp_path), "--out", str(tmp_path)]) == 1
        assert "not found" in capsys.readouterr().err

    def test_bad_preset_exits_one(self, tmp_path):
        assert main(["plot", "--preset", "nope", "--in", str(tmp_path), "--out", str(tmp_path)]) == 1
