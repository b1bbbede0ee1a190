import math

import numpy as np
import pytest

from noisybandit_plots.reader import (
    MissingSweepPoint,
    SchemaMismatch,
    load_results,
    parse_sweep_label,
)
from helpers_csv import HEADER, write_results_csv


class TestParseSweepLabel:
    def test_pairs(self):
        assert parse_sweep_label("a=1,b=0.5") == {"a": 1.0, "b": 0.5}

    def test_empty(self):
        assert parse_sweep_label("") == {}

    def test_malformed(self):
        with pytest.raises(SchemaMismatch):
            parse_sweep_label("nonsense")
        with pytest.raises(SchemaMismatch):
            parse_sweep_label("a=x")


class TestLoadResults:
    def test_aggregates_mean_and_max(self, tmp_path):
        path = write_results_csv(tmp_path / "r.csv", "fig1_arms", ["arms=5", "arms=10"], scenarios=2, horizon=4)
        table = load_results(path)
        assert table.sweeps == ("arms=5", "arms=10")
        assert table.scenarios == 2 and table.horizon == 4
        # per conftest: increments are 0.1*(i+1) + 0.01*s, so at t=4 the
        # cumulative regret is 4*inc; mean over s in {0, 1} uses s=0.005
        assert table.mean["arms=5"]["cum_regret"][-1] == pytest.approx(4 * 0.105)
        assert table.max["arms=5"]["cum_regret"][-1] == pytest.approx(4 * 0.11)
        assert table.mean["arms=10"]["obs_param_err"][0] == pytest.approx(2.0)

    def test_norm_regret_nan_at_first_round(self, tmp_path):
        path = write_results_csv(tmp_path / "r.csv", "fig1_arms", ["arms=5"])
        table = load_results(path)
        assert np.isnan(table.mean["arms=5"]["norm_regret"][0])
        expected = table.mean["arms=5"]["cum_regret"][1] / math.log(2)
        assert table.mean["arms=5"]["norm_regret"][1] == pytest.approx(expected)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(SchemaMismatch):
            load_results(path)

    def test_header_only(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text(HEADER + "\n")
        with pytest.raises(SchemaMismatch):
            load_results(path)

    def test_wrong_header(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(SchemaMismatch):
            load_results(path)

    def test_short_row(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text(HEADER + "\nfig1_arms,arms=5,0,1\n")
        with pytest.raises(SchemaMismatch):
            load_results(path)

    def test_non_numeric_metric(self, tmp_path):
        path = tmp_path / "n.csv"
        path.write_text(HEADER + "\nfig1_arms,arms=5,0,1,0,x,0,,0,0,0\n")
        with pytest.raises(SchemaMismatch):
            load_results(path)

    def test_param_values_sorted(self, make_csv):
        table = load_results(make_csv("fig1_arms"))
        assert table.param_values("arms") == [5.0, 10.0, 20.0, 50.0]

    def test_param_values_missing_key(self, make_csv):
        table = load_results(make_csv("fig1_arms"))
        with pytest.raises(MissingSweepPoint):
            table.param_values("estimability")

    def test_select(self, make_csv):
        table = load_results(make_csv("fig2_estimability"))
        assert table.select(estimability=0.25, explore_scale=0.0) == ["estimability=0.25,explore_scale=0"]
        assert len(table.select(explore_scale=0.0)) == 4
        with pytest.raises(MissingSweepPoint):
            table.select(explore_scale=7.0)
