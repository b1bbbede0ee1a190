import numpy as np
import pytest


def make_spd(rng: np.random.Generator, n: int, jitter: float = 0.5) -> np.ndarray:
    g = rng.standard_normal((n, n))
    return g @ g.T + jitter * np.eye(n)


@pytest.fixture
def np_rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
