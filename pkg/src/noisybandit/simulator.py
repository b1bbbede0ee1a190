"""Scenario runner and cross-scenario aggregation.

One scenario plays the posterior-sampling policy against a fixed environment
for ``horizon`` rounds and records, per round: the chosen and benchmark arms,
the realized regret increment, cumulative regret, estimation errors in both
observation and context space, and cumulative reward. Errors are recorded
after the round's posterior update, so row t reflects the state the learner
carries into round t+1.

Each scenario owns a single RngStream keyed by (master_seed, scenario_id);
see :mod:`noisybandit.environment` for the draw-order contract. Scenarios are
embarrassingly parallel and results are identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .environment import EnvironmentSpec, RoundSampler, derive_model, realized_reward
from .numerics import RngStream
from .policy import (
    ParamRecovery,
    PosteriorState,
    init_state,
    oracle_arm,
    sample_parameter,
    select_arm,
    update,
)

METRICS = ("obs_param_err", "param_err", "cum_regret", "norm_regret", "cum_reward")


class UndefinedAtT1(ValueError):
    """Normalized regret divides by log t and is undefined before t = 2."""


class InconsistentConfigs(ValueError):
    """Batch configs must agree on horizon and environment shape."""


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    spec: EnvironmentSpec
    explore_scale: float
    horizon: int
    master_seed: int
    scenario_id: int

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.explore_scale < 0:
            raise ValueError("explore_scale must be nonnegative")


@dataclass(frozen=True, eq=False)
class ScenarioTrace:
    """Per-round records of one scenario; arrays all have length horizon."""

    chosen_arm: np.ndarray
    oracle_arm: np.ndarray
    regret_increment: np.ndarray
    cum_regret: np.ndarray
    obs_param_err: np.ndarray
    param_err: np.ndarray
    cum_reward: np.ndarray

    @property
    def horizon(self) -> int:
        return self.cum_regret.shape[0]


@dataclass(frozen=True, eq=False)
class AggregateSeries:
    """Per-round mean and max of each metric across scenarios."""

    mean: dict[str, np.ndarray]
    max: dict[str, np.ndarray]
    scenarios: int
    horizon: int


def run_scenario(config: ScenarioConfig, rng: RngStream | None = None, initial_mean=None) -> ScenarioTrace:
    """Play one scenario and return its trace.

    ``rng`` defaults to a fresh stream at (master_seed, scenario_id); the
    experiment runner passes the stream it already used for environment
    setup. ``initial_mean`` seeds the posterior mean (a test hook; the
    standard start is the zero vector).
    """
    spec = config.spec
    if rng is None:
        rng = RngStream(config.master_seed, config.scenario_id)
    model = derive_model(spec)
    sampler = RoundSampler(spec)
    state = init_state(spec.obs_dim, config.explore_scale)
    if initial_mean is not None:
        state = PosteriorState(
            precision=state.precision,
            mean=np.asarray(initial_mean, dtype=np.float64).copy(),
            explore_scale=state.explore_scale,
            chol=state.chol,
        )
    recovery = ParamRecovery(model.gain)
    reduced_mat, reduced_rhs = recovery.reduced_start()
    lifted_t = recovery.lifted.T.copy()

    horizon = config.horizon
    chosen = np.zeros(horizon, dtype=np.int64)
    oracle = np.zeros(horizon, dtype=np.int64)
    regret_inc = np.zeros(horizon)
    cum_regret = np.zeros(horizon)
    obs_param_err = np.zeros(horizon)
    param_err = np.zeros(horizon)
    cum_reward = np.zeros(horizon)

    obs_param = model.obs_param
    reward_param = spec.reward_param
    regret_total = 0.0
    reward_total = 0.0

    for t in range(horizon):
        rnd = sampler.sample(rng)
        best = oracle_arm(obs_param, rnd.observations)
        tilde = sample_parameter(state, rng)
        pick = select_arm(tilde, rnd.observations)

        r_pick = realized_reward(spec, rnd, pick)
        r_best = r_pick if best == pick else realized_reward(spec, rnd, best)
        inc = r_best - r_pick
        regret_total += inc
        reward_total += r_pick

        y = rnd.observations[pick]
        state = update(state, y, r_pick)
        w = lifted_t @ y
        reduced_mat += np.outer(w, w)
        reduced_rhs += w * r_pick
        recovered = recovery.solve_reduced(reduced_mat, reduced_rhs)

        chosen[t] = pick
        oracle[t] = best
        regret_inc[t] = inc
        cum_regret[t] = regret_total
        obs_param_err[t] = np.linalg.norm(state.mean - obs_param)
        param_err[t] = np.linalg.norm(recovered - reward_param)
        cum_reward[t] = reward_total

    return ScenarioTrace(
        chosen_arm=chosen,
        oracle_arm=oracle,
        regret_increment=regret_inc,
        cum_regret=cum_regret,
        obs_param_err=obs_param_err,
        param_err=param_err,
        cum_reward=cum_reward,
    )


def normalized_regret(trace: ScenarioTrace, t: int) -> float:
    """cum_regret(t) / ln(t), defined for t >= 2."""
    if t < 2:
        raise UndefinedAtT1(f"normalized regret is undefined at t={t}")
    if t > trace.horizon:
        raise ValueError(f"t={t} beyond horizon {trace.horizon}")
    return float(trace.cum_regret[t - 1] / math.log(t))


def norm_regret_series(cum_regret: np.ndarray) -> np.ndarray:
    """Elementwise cum_regret / ln t with NaN at t = 1."""
    t = np.arange(1, cum_regret.shape[0] + 1, dtype=np.float64)
    out = np.full_like(cum_regret, np.nan)
    if cum_regret.shape[0] > 1:
        out[1:] = cum_regret[1:] / np.log(t[1:])
    return out


def _check_batch(configs) -> None:
    if not configs:
        raise InconsistentConfigs("empty batch")
    first = configs[0]
    for c in configs[1:]:
        same = (
            c.horizon == first.horizon
            and c.spec.context_dim == first.spec.context_dim
            and c.spec.obs_dim == first.spec.obs_dim
            and c.spec.num_arms == first.spec.num_arms
            and c.explore_scale == first.explore_scale
        )
        if not same:
            raise InconsistentConfigs("configs disagree on horizon, shape, or explore_scale")


def _run_one(args) -> ScenarioTrace:
    config, rng = args
    return run_scenario(config, rng)


def run_scenarios(configs, rngs=None, workers: int = 1) -> list[ScenarioTrace]:
    """Run scenarios in declared order, optionally across processes.

    Results are ordered like ``configs`` and independent of worker count.
    """
    configs = list(configs)
    _check_batch(configs)
    if rngs is None:
        rngs = [None] * len(configs)
    rngs = list(rngs)
    if len(rngs) != len(configs):
        raise InconsistentConfigs("rngs must match configs one-to-one")
    jobs = list(zip(configs, rngs))
    if workers <= 1 or len(jobs) == 1:
        return [_run_one(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))


def aggregate_traces(traces) -> AggregateSeries:
    """Per-round mean and max of every metric across the given traces."""
    traces = list(traces)
    if not traces:
        raise InconsistentConfigs("no traces to aggregate")
    horizon = traces[0].horizon
    if any(tr.horizon != horizon for tr in traces):
        raise InconsistentConfigs("traces disagree on horizon")
    stacks = {
        "obs_param_err": np.stack([tr.obs_param_err for tr in traces]),
        "param_err": np.stack([tr.param_err for tr in traces]),
        "cum_regret": np.stack([tr.cum_regret for tr in traces]),
        "norm_regret": np.stack([norm_regret_series(tr.cum_regret) for tr in traces]),
        "cum_reward": np.stack([tr.cum_reward for tr in traces]),
    }
    mean = {k: v.mean(axis=0) for k, v in stacks.items()}
    mx = {k: v.max(axis=0) for k, v in stacks.items()}
    return AggregateSeries(mean=mean, max=mx, scenarios=len(traces), horizon=horizon)


def run_batch(configs, rngs=None, workers: int = 1) -> AggregateSeries:
    """Run every scenario and aggregate; order- and parallelism-independent."""
    return aggregate_traces(run_scenarios(configs, rngs=rngs, workers=workers))
