"""Synthetic results.csv builders shared by the plot tests."""

import math

HEADER = (
    "experiment,sweep,scenario_id,t,chosen_arm,regret_increment,"
    "cum_regret,norm_regret,obs_param_err,param_err,cum_reward"
)


def write_results_csv(path, experiment, labels, scenarios=2, horizon=4):
    """Schema-conforming CSV with simple deterministic per-label values."""
    lines = [HEADER]
    for i, label in enumerate(labels):
        field = f'"{label}"' if "," in label else label
        for s in range(scenarios):
            cum_regret = 0.0
            cum_reward = 0.0
            for t in range(1, horizon + 1):
                inc = 0.1 * (i + 1) + 0.01 * s
                cum_regret += inc
                cum_reward += float(i + 1)
                norm = "" if t == 1 else repr(cum_regret / math.log(t))
                obs_err = (i + 1) / t
                param_err = 2.0 * (i + 1) / t
                lines.append(
                    f"{experiment},{field},{s},{t},0,{inc!r},{cum_regret!r},{norm},"
                    f"{obs_err!r},{param_err!r},{cum_reward!r}"
                )
    path.write_text("\n".join(lines) + "\n")
    return path


def fig_labels(preset):
    if preset == "fig1_arms":
        return [f"arms={n}" for n in (5, 10, 20, 50)]
    if preset == "fig2_estimability":
        return [
            f"estimability={e:g},explore_scale={c:g}"
            for e in (0.25, 0.5, 0.75, 1.0)
            for c in (0.0, 1.0, 10.0, 100.0)
        ]
    if preset == "fig3_snr":
        return [f"snr_reward={r:g},snr_obs={o:g}" for r in (0.25, 1.0, 4.0) for o in (0.25, 1.0, 4.0)]
    if preset == "fig4_dimension":
        return [f"obs_dim={d}" for d in (5, 20, 100)]
    raise ValueError(preset)
