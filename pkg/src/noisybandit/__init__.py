"""Contextual bandits with noisy, partial context observations.

The learner never sees arm contexts, only noisy linear images of them, and
runs posterior sampling on the observation-space reward parameter. The
package bundles the generative model, the policy, a deterministic scenario
simulator, and an experiment harness with CSV output.
"""

__version__ = "0.1.0"

from .environment import (
    DerivedModel,
    EnvironmentSpec,
    RoundData,
    conditional_reward_params,
    context_gain,
    derive_model,
    estimability_obs_matrix,
    orthonormal_obs_matrix,
    realized_reward,
    sample_round,
    unit_row_obs_matrix,
)
from .numerics import RngStream
from .policy import (
    PosteriorState,
    init_state,
    oracle_arm,
    recover_reward_param,
    sample_parameter,
    select_arm,
    update,
)
from .simulator import (
    AggregateSeries,
    ScenarioConfig,
    ScenarioTrace,
    aggregate_traces,
    normalized_regret,
    run_batch,
    run_scenario,
    run_scenarios,
)

__all__ = [
    "AggregateSeries",
    "DerivedModel",
    "EnvironmentSpec",
    "PosteriorState",
    "RngStream",
    "RoundData",
    "ScenarioConfig",
    "ScenarioTrace",
    "aggregate_traces",
    "conditional_reward_params",
    "context_gain",
    "derive_model",
    "estimability_obs_matrix",
    "init_state",
    "normalized_regret",
    "oracle_arm",
    "orthonormal_obs_matrix",
    "realized_reward",
    "recover_reward_param",
    "run_batch",
    "run_scenario",
    "run_scenarios",
    "sample_parameter",
    "sample_round",
    "select_arm",
    "unit_row_obs_matrix",
    "update",
]
