"""Generative model: hidden contexts, noisy linear observations, rewards.

Each arm carries a hidden Gaussian context x ~ N(0, context_cov). The learner
only sees y = obs_matrix @ x + noise, noise ~ N(0, obs_noise_cov). Pulling an
arm pays x @ reward_param + N(0, reward_noise_var).

The conditional mean of x given y is gain @ y, where ``gain`` is the linear
map computed by :func:`context_gain`. The reward expected from an observation
is therefore y @ obs_param with obs_param = gain.T @ reward_param, and the
``estimability`` ratio measures what fraction of reward_param can ever be
pinned down from observations alone.

Draw-order contract (one :class:`~noisybandit.numerics.RngStream` per
scenario): every round consumes, in order, contexts for arms 0..N-1, then
observation noises 0..N-1, then reward noises 0..N-1; the policy's posterior
draw follows on the same stream. Any per-scenario setup (reward_param, the
observation matrix) is drawn before round one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .numerics import (
    DimensionMismatch,
    NotPositiveDefinite,
    RankDeficient,
    RngStream,
    cholesky,
    cholesky_psd,
    orthonormalize_rows,
    projection_onto_columns,
)

# Snap tolerance: full estimability is reported as exactly 1.0 when the
# unexplained component of reward_param is this small, relatively.
FULL_ESTIMABILITY_TOL = 1e-8

_CONSTRUCTOR_RETRIES = 8


class ArmOutOfRange(IndexError):
    """Arm index outside 0..num_arms-1."""


class InfeasibleTarget(ValueError):
    """Requested estimability cannot be met in the given dimensions."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class EnvironmentSpec:
    """Full description of one bandit environment.

    context_dim, obs_dim, num_arms fix the shapes; reward_param is the hidden
    linear reward parameter; obs_matrix maps contexts to observations;
    context_cov must be SPD, obs_noise_cov may be PSD (a zero matrix gives a
    noiseless channel); reward_noise_var must be positive.
    """

    context_dim: int
    obs_dim: int
    num_arms: int
    reward_param: np.ndarray
    obs_matrix: np.ndarray
    context_cov: np.ndarray
    obs_noise_cov: np.ndarray
    reward_noise_var: float

    def __post_init__(self):
        if self.context_dim < 1 or self.obs_dim < 1 or self.num_arms < 1:
            raise ValueError("dimensions and arm count must be at least 1")
        if self.reward_noise_var <= 0:
            raise ValueError("reward_noise_var must be positive")
        mu = np.asarray(self.reward_param, dtype=np.float64)
        A = np.asarray(self.obs_matrix, dtype=np.float64)
        sx = np.asarray(self.context_cov, dtype=np.float64)
        sy = np.asarray(self.obs_noise_cov, dtype=np.float64)
        if mu.shape != (self.context_dim,):
            raise ValueError(f"reward_param shape {mu.shape} != ({self.context_dim},)")
        if A.shape != (self.obs_dim, self.context_dim):
            raise ValueError(f"obs_matrix shape {A.shape} != ({self.obs_dim}, {self.context_dim})")
        if sx.shape != (self.context_dim,) * 2 or sy.shape != (self.obs_dim,) * 2:
            raise ValueError("covariance shapes do not match the declared dimensions")
        for name, arr in (("reward_param", mu), ("obs_matrix", A), ("context_cov", sx), ("obs_noise_cov", sy)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
        cholesky(sx)  # context_cov must be SPD
        cholesky_psd(sy)  # obs_noise_cov may be merely PSD
        object.__setattr__(self, "reward_param", _frozen(mu))
        object.__setattr__(self, "obs_matrix", _frozen(A))
        object.__setattr__(self, "context_cov", _frozen(sx))
        object.__setattr__(self, "obs_noise_cov", _frozen(sy))
        object.__setattr__(self, "reward_noise_var", float(self.reward_noise_var))


@dataclass(frozen=True, eq=False)
class DerivedModel:
    """Quantities implied by an EnvironmentSpec.

    gain: linear map from observation space to expected context.
    obs_param: reward parameter expressed in observation space.
    estimability: in [0, 1], the learnable fraction of reward_param
        (0 by convention when reward_param is the zero vector).
    conditional_mean_var: variance of the mean reward left after conditioning
        on an observation.
    snr_reward, snr_obs: signal-to-noise ratios of the reward channel and the
        observation channel.
    """

    gain: np.ndarray
    obs_param: np.ndarray
    estimability: float
    conditional_mean_var: float
    snr_reward: float
    snr_obs: float


@dataclass(frozen=True, eq=False)
class RoundData:
    """One round's hidden contexts, observations, and per-arm reward noises."""

    contexts: np.ndarray  # (num_arms, context_dim)
    observations: np.ndarray  # (num_arms, obs_dim)
    reward_noises: np.ndarray  # (num_arms,)


def _information_matrix(spec: EnvironmentSpec) -> tuple[np.ndarray, np.ndarray]:
    """Return (M, A_T_sy_inv) with M = A.T @ inv(obs_cov) @ A + inv(ctx_cov)."""
    A = spec.obs_matrix
    Ly = cholesky(spec.obs_noise_cov)
    sy_inv_A = _chol_solve(Ly, A)
    sx_inv = _chol_solve(cholesky(spec.context_cov), np.eye(spec.context_dim))
    M = A.T @ sy_inv_A + sx_inv
    return M, sy_inv_A.T


def _chol_solve(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    return solve_triangular(L.T, solve_triangular(L, b, lower=True), lower=False)


def context_gain(spec: EnvironmentSpec) -> np.ndarray:
    """The (context_dim, obs_dim) map sending an observation to E[x | y]."""
    M, At_sy_inv = _information_matrix(spec)
    L = cholesky(M)
    return _chol_solve(L, At_sy_inv)


def derive_model(spec: EnvironmentSpec) -> DerivedModel:
    """Compute gain, obs_param, estimability, conditional variance and SNRs."""
    mu = spec.reward_param
    M, At_sy_inv = _information_matrix(spec)
    L = cholesky(M)
    gain = _chol_solve(L, At_sy_inv)
    obs_param = gain.T @ mu

    mu_norm = np.linalg.norm(mu)
    if mu_norm == 0.0:
        estimability = 0.0
    else:
        proj = projection_onto_columns(gain)
        resid = np.linalg.norm(mu - proj @ mu)
        if resid <= FULL_ESTIMABILITY_TOL * mu_norm:
            estimability = 1.0
        else:
            estimability = min(1.0, float(np.linalg.norm(proj @ mu) / mu_norm))

    conditional_mean_var = float(mu @ _chol_solve(L, mu))
    snr_reward = float(mu @ spec.context_cov @ mu / spec.reward_noise_var)
    obs_signal = float(np.trace(spec.obs_matrix @ spec.context_cov @ spec.obs_matrix.T))
    obs_noise = float(np.trace(spec.obs_noise_cov))
    snr_obs = obs_signal / obs_noise if obs_noise > 0 else np.inf

    return DerivedModel(
        gain=_frozen(gain),
        obs_param=_frozen(obs_param),
        estimability=estimability,
        conditional_mean_var=conditional_mean_var,
        snr_reward=snr_reward,
        snr_obs=snr_obs,
    )


def conditional_reward_params(model: DerivedModel, spec: EnvironmentSpec, y) -> tuple[float, float]:
    """Mean and variance of the reward of an arm given its observation y."""
    obs = np.asarray(y, dtype=np.float64)
    if obs.shape != (spec.obs_dim,):
        raise DimensionMismatch(f"observation shape {obs.shape} != ({spec.obs_dim},)")
    mean = float(obs @ model.obs_param)
    variance = model.conditional_mean_var + spec.reward_noise_var
    return mean, variance


class RoundSampler:
    """Draws rounds for a fixed spec, with covariance factors cached."""

    def __init__(self, spec: EnvironmentSpec):
        self.spec = spec
        self._Lx_t = cholesky(spec.context_cov).T.copy()
        try:
            ly = cholesky(spec.obs_noise_cov)
        except NotPositiveDefinite:
            ly = cholesky_psd(spec.obs_noise_cov)
        self._Ly_t = ly.T.copy()
        self._A_t = spec.obs_matrix.T.copy()
        self._noise_sd = np.sqrt(spec.reward_noise_var)

    def sample(self, rng: RngStream) -> RoundData:
        # One block draw, sliced in the documented order: contexts for all
        # arms, then observation noises, then reward noises.
        n = self.spec.num_arms
        d_x, d_y = self.spec.context_dim, self.spec.obs_dim
        z = rng.standard_normals(n * (d_x + d_y + 1))
        contexts = z[: n * d_x].reshape(n, d_x) @ self._Lx_t
        obs_noise = z[n * d_x : n * (d_x + d_y)].reshape(n, d_y) @ self._Ly_t
        observations = contexts @ self._A_t + obs_noise
        reward_noises = self._noise_sd * z[n * (d_x + d_y) :]
        return RoundData(contexts=contexts, observations=observations, reward_noises=reward_noises)


def sample_round(spec: EnvironmentSpec, rng: RngStream) -> RoundData:
    """Draw one round: contexts for all arms, then observation and reward noises."""
    return RoundSampler(spec).sample(rng)


def realized_reward(spec: EnvironmentSpec, rnd: RoundData, arm: int) -> float:
    """The reward arm would pay this round: context @ reward_param + noise."""
    if not 0 <= arm < spec.num_arms:
        raise ArmOutOfRange(f"arm {arm} outside 0..{spec.num_arms - 1}")
    return float(rnd.contexts[arm] @ spec.reward_param + rnd.reward_noises[arm])


def orthonormal_obs_matrix(obs_dim: int, context_dim: int, rng: RngStream) -> np.ndarray:
    """Random matrix with orthonormal rows (obs_dim <= context_dim)."""
    if obs_dim > context_dim:
        raise RankDeficient(f"cannot fit {obs_dim} orthonormal rows in {context_dim} dimensions")
    for _ in range(_CONSTRUCTOR_RETRIES):
        raw = rng.standard_normals((obs_dim, context_dim))
        try:
            return orthonormalize_rows(raw)
        except RankDeficient:
            continue
    raise RankDeficient("repeated rank-deficient draws for the observation matrix")


def estimability_obs_matrix(
    reward_param, target: float, obs_dim: int, context_dim: int, rng: RngStream
) -> np.ndarray:
    """Orthonormal-row observation matrix hitting a requested estimability.

    Valid under identity context and observation-noise covariances: the first
    row is target * u + sqrt(1 - target^2) * w for u = reward_param normalized
    and w a random unit vector orthogonal to it; the remaining rows are
    orthonormal and orthogonal to both. The same number of draws is consumed
    for every target, so environments with different targets stay paired on
    a shared stream.
    """
    if not 0.0 < target <= 1.0:
        raise ValueError(f"estimability target must be in (0, 1], got {target}")
    if context_dim < obs_dim + 1:
        raise InfeasibleTarget(
            f"need context_dim >= obs_dim + 1 to place rows orthogonal to reward_param "
            f"(got obs_dim={obs_dim}, context_dim={context_dim})"
        )
    mu = np.asarray(reward_param, dtype=np.float64)
    mu_norm = np.linalg.norm(mu)
    if mu_norm == 0.0:
        raise ValueError("reward_param must be nonzero")
    u = mu / mu_norm

    for _ in range(_CONSTRUCTOR_RETRIES):
        w_raw = rng.standard_normals(context_dim)
        w = w_raw - u * (u @ w_raw)
        w_norm = np.linalg.norm(w)
        if w_norm < 1e-10:
            continue
        w /= w_norm
        first = target * u + np.sqrt(max(0.0, 1.0 - target * target)) * w
        rest = rng.standard_normals((obs_dim - 1, context_dim))
        rest -= np.outer(rest @ u, u) + np.outer(rest @ w, w)
        try:
            rest = orthonormalize_rows(rest) if obs_dim > 1 else rest
        except RankDeficient:
            continue
        return np.vstack([first[None, :], rest]) if obs_dim > 1 else first[None, :]
    raise RankDeficient("repeated degenerate draws while constructing the observation matrix")


def unit_row_obs_matrix(obs_dim: int, context_dim: int, rng: RngStream) -> np.ndarray:
    """Rows drawn i.i.d. standard normal and scaled to unit norm, not orthogonalized.

    obs_dim may exceed context_dim. Rows with negligible norm are redrawn.
    """
    rows = rng.standard_normals((obs_dim, context_dim))
    norms = np.linalg.norm(rows, axis=1)
    while np.any(norms < 1e-12):  # pragma: no cover - probability ~0
        bad = norms < 1e-12
        rows[bad] = rng.standard_normals((int(bad.sum()), context_dim))
        norms = np.linalg.norm(rows, axis=1)
    return rows / norms[:, None]
