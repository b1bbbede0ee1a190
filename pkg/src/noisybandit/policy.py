"""Posterior-sampling learner operating in observation space.

The policy never models the hidden contexts. It regresses rewards on
observations: after each pull the precision matrix gains a rank-one term and
the mean solves the resulting ridge system,

    precision(t+1) = precision(t) + y y^T
    mean(t+1)      = precision(t+1)^-1 (precision(t) mean(t) + y r)

starting from precision = I and mean = 0. Arm choice maximizes y @ sample
where sample comes from N(mean, explore_scale * precision^-1); explore_scale
zero is the greedy policy. Even then the posterior draw is consumed from the
stream so greedy and exploring runs sharing a seed see identical environment
randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .numerics import (
    SVD_RANK_REL_TOL,
    DimensionMismatch,
    NotPositiveDefinite,
    RngStream,
)


class EmptyArmSet(ValueError):
    """Arm selection needs at least one observation."""


@dataclass(frozen=True, eq=False)
class PosteriorState:
    """Immutable posterior over the observation-space reward parameter."""

    precision: np.ndarray  # (obs_dim, obs_dim) SPD, eigenvalues >= 1
    mean: np.ndarray  # (obs_dim,)
    explore_scale: float  # >= 0; posterior covariance is explore_scale * inv(precision)
    chol: np.ndarray  # cached lower Cholesky factor of precision

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def init_state(obs_dim: int, explore_scale: float) -> PosteriorState:
    """Fresh posterior: identity precision, zero mean."""
    if obs_dim < 1:
        raise ValueError("obs_dim must be at least 1")
    if explore_scale < 0:
        raise ValueError("explore_scale must be nonnegative")
    eye = np.eye(obs_dim)
    return PosteriorState(precision=eye, mean=np.zeros(obs_dim), explore_scale=float(explore_scale), chol=eye.copy())


def sample_parameter(state: PosteriorState, rng: RngStream) -> np.ndarray:
    """Draw from N(mean, explore_scale * inv(precision)).

    Always consumes obs_dim normals; with explore_scale == 0 the draw is
    discarded and the mean is returned exactly.
    """
    z = rng.standard_normals(state.dim)
    if state.explore_scale == 0.0:
        return state.mean.copy()
    spread = solve_triangular(state.chol.T, z, lower=False, check_finite=False)
    return state.mean + np.sqrt(state.explore_scale) * spread


def select_arm(weights, observations) -> int:
    """Index of the observation maximizing y @ weights (lowest index on ties)."""
    w = np.asarray(weights, dtype=np.float64)
    obs = np.asarray(observations, dtype=np.float64)
    if obs.ndim != 2 or obs.shape[0] == 0:
        raise EmptyArmSet("need at least one observation to select an arm")
    if obs.shape[1] != w.shape[0]:
        raise DimensionMismatch(f"observations have dim {obs.shape[1]}, weights have {w.shape[0]}")
    return int(np.argmax(obs @ w))


def oracle_arm(obs_param, observations) -> int:
    """select_arm with the true observation-space parameter: the benchmark arm."""
    return select_arm(obs_param, observations)


def update(state: PosteriorState, y, r: float) -> PosteriorState:
    """Absorb one (observation, reward) pair and return the new posterior."""
    obs = np.asarray(y, dtype=np.float64)
    if obs.shape != (state.dim,):
        raise DimensionMismatch(f"observation shape {obs.shape} != ({state.dim},)")
    if not np.isfinite(r):
        raise ValueError("reward must be finite")
    new_precision = state.precision + np.outer(obs, obs)
    try:
        new_chol = np.linalg.cholesky(new_precision)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - precision >= I
        raise NotPositiveDefinite(str(exc)) from exc
    rhs = state.precision @ state.mean + obs * r
    new_mean = np.linalg.solve(new_precision, rhs)
    return PosteriorState(
        precision=new_precision, mean=new_mean, explore_scale=state.explore_scale, chol=new_chol
    )


class ParamRecovery:
    """Maps a posterior back to context space through a fixed gain matrix.

    The recovered parameter is pinv(G B G^T) G B mean for gain G and precision
    B, with the pseudo-inverse cut off at SVD_RANK_REL_TOL relative to the top
    singular value. Internally the solve runs in an orthonormal basis of the
    gain's column space, which the cutoff determines once at construction.
    """

    def __init__(self, gain: np.ndarray):
        g = np.asarray(gain, dtype=np.float64)
        u, s, _ = np.linalg.svd(g, full_matrices=False)
        if s.size == 0 or s[0] == 0.0:
            rank = 0
        else:
            rank = int(np.sum(s > SVD_RANK_REL_TOL * s[0]))
        self.basis = u[:, :rank]  # (context_dim, rank)
        self.lifted = g.T @ self.basis  # (obs_dim, rank)
        self.rank = rank

    def recover(self, precision: np.ndarray, weighted_mean: np.ndarray) -> np.ndarray:
        """Recovered parameter given precision B and the vector B @ mean."""
        if self.rank == 0:
            return np.zeros(self.basis.shape[0])
        e = self.lifted
        return self.solve_reduced(e.T @ precision @ e, e.T @ weighted_mean)

    def reduced_start(self) -> tuple[np.ndarray, np.ndarray]:
        """Reduced system for the fresh posterior (identity precision, zero mean).

        Rank-one data terms can then be accumulated in place: for each pull,
        add outer(w, w) to the matrix and w * reward to the vector, where
        w = lifted.T @ observation.
        """
        return self.lifted.T @ self.lifted, np.zeros(self.rank)

    def solve_reduced(self, g_small: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """Solve the reduced SPD system and lift back to context space."""
        if self.rank == 0:
            return np.zeros(self.basis.shape[0])
        return self.basis @ np.linalg.solve(g_small, rhs)


def recover_reward_param(state: PosteriorState, gain) -> np.ndarray:
    """Context-space estimate implied by the posterior and the gain matrix."""
    g = np.asarray(gain, dtype=np.float64)
    if g.shape[1] != state.dim:
        raise DimensionMismatch(f"gain has {g.shape[1]} columns, state dim is {state.dim}")
    rec = ParamRecovery(g)
    return rec.recover(state.precision, state.precision @ state.mean)
