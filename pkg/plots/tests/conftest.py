import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from helpers_csv import fig_labels, write_results_csv


@pytest.fixture
def make_csv(tmp_path):
    def _make(preset, **kwargs):
        return write_results_csv(tmp_path / f"{preset}.csv", preset, fig_labels(preset), **kwargs)

    return _make
