"""Training loop, trial runner and convergence-rate estimation.

One iteration sweeps the layers from the output backwards; each layer's
update uses the downstream weights as already updated in this sweep,
while the forward trace stays the one computed at the top of the
iteration.  Floating-point trouble is not masked: non-finite errors,
singular Newton systems and degenerate steplengths each terminate the
trial with a distinct outcome.

Outcomes, in classification precedence order:
  non_finite      E or an update became NaN/inf, or a steplength divided
                  by (almost) zero
  singular_matrix a Newton or pseudo-Newton solve hit a singular system
  success         E fell below the error target
  blow_up         E exceeded the blow-up threshold
  local_minimum   the iteration budget ran out; `stalled` records whether
                  the last two errors differed by at most the stall
                  tolerance
"""

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .gradient import cogradient_conj, delta_hidden, delta_output, gd_update
from .linalg import SingularMatrix
from .network import error_from_trace, forward, init_weights
from .newton import (
    assemble_h_ww,
    assemble_h_wbar_w,
    conj_curvature_hidden,
    conj_curvature_output,
    curvature_hidden,
    curvature_output,
    newton_update,
    pseudo_newton_update,
    residual_curvature_hidden,
    residual_curvature_output,
)
from .steplength import DegenerateStep, StepConfig, apply_update, one_step_mu

__all__ = [
    "METHODS",
    "OUTCOMES",
    "FAILURE_OUTCOMES",
    "TrainConfig",
    "TrialRecord",
    "TrialStats",
    "train",
    "classify_outcome",
    "run_trials",
    "summarize",
    "r_factor_estimate",
    "write_trials_csv",
    "write_stats_json",
    "format_summary",
]

METHODS = ("gradient_descent", "newton", "pseudo_newton")
FAILURE_OUTCOMES = ("local_minimum", "blow_up", "non_finite", "singular_matrix")
OUTCOMES = ("success",) + FAILURE_OUTCOMES

DEFAULT_MAX_ITERS = {"gradient_descent": 50000, "newton": 5000, "pseudo_newton": 5000}


class _NonFiniteSweep(Exception):
    """Internal: a cogradient or Hessian stopped being finite mid-sweep."""


@dataclass(frozen=True)
class TrainConfig:
    method: str = "gradient_descent"
    step: StepConfig = field(default_factory=StepConfig)
    error_target: float = 0.001
    max_iters: Optional[int] = None
    blowup_threshold: float = 1e10
    stall_tolerance: float = 1e-10
    init_range: float = 1.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method {self.method!r} not in {METHODS}")
        if self.method == "gradient_descent" and self.step.mode == "one_step_newton":
            raise ValueError("gradient descent needs a constant steplength")
        if not self.error_target > 0:
            raise ValueError("error target must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("iteration budget must be at least 1")
        if not self.blowup_threshold > 0:
            raise ValueError("blow-up threshold must be positive")
        if self.stall_tolerance < 0:
            raise ValueError("stall tolerance must be non-negative")
        if not self.init_range > 0:
            raise ValueError("init range must be positive")

    @property
    def iteration_budget(self):
        return self.max_iters if self.max_iters is not None else DEFAULT_MAX_ITERS[self.method]


@dataclass
class TrialRecord:
    seed: int
    outcome: str
    iterations: int
    final_error: float
    stalled: Optional[bool] = None
    error_history: Optional[list] = None
    weight_history: Optional[list] = None
    final_weights: Optional[list] = None


@dataclass
class TrialStats:
    n_trials: int
    successes: int
    mean_iterations_over_successes: Optional[float]
    failure_counts: dict


def _flat_weights(weights):
    return np.concatenate([w.ravel() for w in weights])


def _finite(*arrays):
    return all(np.all(np.isfinite(a)) for a in arrays)


def _sweep_gradient(topology, weights, trace, targets, config):
    mu = config.step.constant_mu
    delta = delta_output(topology, trace, targets)
    for p in range(topology.n_layers, 0, -1):
        if p < topology.n_layers:
            delta = delta_hidden(topology, trace, delta, weights[p], p)
        cograd = cogradient_conj(delta, trace, p)
        apply_update(weights, p, gd_update(cograd), mu)


def _sweep_newton(topology, weights, trace, targets, config):
    step = config.step
    for p in range(topology.n_layers, 0, -1):
        if p == topology.n_layers:
            delta = delta_output(topology, trace, targets)
            curv = curvature_output(topology, trace)
            resid = residual_curvature_output(topology, trace, targets)
            cconj = conj_curvature_output(topology, trace)
        else:
            w_next = weights[p]
            delta, delta_up = delta_hidden(topology, trace, delta, w_next, p), delta
            curv = curvature_hidden(topology, trace, curv, w_next, p)
            cconj = conj_curvature_hidden(topology, trace, cconj, resid, w_next, p)
            resid = residual_curvature_hidden(topology, trace, delta_up, w_next, p)
        cograd = cogradient_conj(delta, trace, p)
        h_ww = assemble_h_ww(curv, trace, p)
        h_wbar_w = assemble_h_wbar_w(cconj, resid, trace, p)
        if not _finite(cograd, h_ww, h_wbar_w):
            raise _NonFiniteSweep
        if config.method == "newton":
            dw = newton_update(h_ww, h_wbar_w, cograd, topology.widths[p])
        else:
            dw = pseudo_newton_update(h_ww, cograd, topology.widths[p])
        if step.mode == "one_step_newton":
            mu = one_step_mu(cograd, dw, h_ww, h_wbar_w)
        else:
            mu = step.constant_mu
        apply_update(weights, p, dw, mu, step.omega)


def train(topology, dataset, config, seed, keep_history=True, record_weights=False):
    """Train from the seeded initialization until success, failure or budget."""
    weights = init_weights(topology, seed, config.init_range)
    budget = config.iteration_budget
    history = []
    weight_history = [_flat_weights(weights)] if record_weights else None
    singular = False
    nonfinite = False
    iterations = 0
    sweep = _sweep_gradient if config.method == "gradient_descent" else _sweep_newton
    with np.errstate(all="ignore"):
        while True:
            trace = forward(topology, weights, dataset.inputs)
            e = error_from_trace(trace, dataset.targets)
            history.append(e)
            if not np.isfinite(e):
                nonfinite = True
                break
            if e < config.error_target or e > config.blowup_threshold:
                break
            if iterations >= budget:
                break
            try:
                sweep(topology, weights, trace, dataset.targets, config)
            except SingularMatrix:
                singular = True
                break
            except (DegenerateStep, _NonFiniteSweep):
                nonfinite = True
                break
            iterations += 1
            if record_weights:
                weight_history.append(_flat_weights(weights))
    outcome = classify_outcome(history, config, singular, nonfinite)
    stalled = None
    if outcome == "local_minimum":
        stalled = len(history) >= 2 and abs(history[-1] - history[-2]) <= config.stall_tolerance
    return TrialRecord(
        seed=seed,
        outcome=outcome,
        iterations=iterations,
        final_error=history[-1],
        stalled=stalled,
        error_history=history if keep_history else None,
        weight_history=weight_history,
        final_weights=weights,
    )


def classify_outcome(error_history, config, singular_flag=False, nonfinite_flag=False):
    """Map a finished trial onto the outcome taxonomy (see module docstring)."""
    last = error_history[-1]
    if nonfinite_flag or not np.isfinite(last):
        return "non_finite"
    if singular_flag:
        return "singular_matrix"
    if last < config.error_target:
        return "success"
    if last > config.blowup_threshold:
        return "blow_up"
    return "local_minimum"


def _trial_worker(args):
    topology, dataset, config, seed, record_weights = args
    return train(topology, dataset, config, seed, keep_history=False, record_weights=record_weights)


def run_trials(topology, dataset, config, n_trials, base_seed, jobs=1, record_weights=False):
    """Run trials with seeds base_seed..base_seed+n-1, optionally in parallel.

    Trial k's result depends only on its seed and the configuration, and
    results are collected in seed order, so the output is identical for
    any job count.
    """
    if n_trials < 1:
        raise ValueError("need at least one trial")
    args = [(topology, dataset, config, base_seed + k, record_weights) for k in range(n_trials)]
    if jobs <= 1:
        records = [_trial_worker(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_trial_worker, args, chunksize=8))
    return summarize(records), records


def summarize(records):
    successes = [r for r in records if r.outcome == "success"]
    counts = {name: 0 for name in FAILURE_OUTCOMES}
    for r in records:
        if r.outcome != "success":
            counts[r.outcome] += 1
    mean_iters = float(np.mean([r.iterations for r in successes])) if successes else None
    return TrialStats(
        n_trials=len(records),
        successes=len(successes),
        mean_iterations_over_successes=mean_iters,
        failure_counts=counts,
    )


def r_factor_estimate(weight_history):
    """Estimate the R-convergence factor of a weight iterate sequence.

    Takes the final iterate as the limit and returns the largest
    ||z(n) - z_hat||^(1/n) over the trailing half of the history (the
    final point itself excluded).  A value below 1 indicates at least
    R-linear convergence; an exhausted history of identical iterates
    gives 0.
    """
    if len(weight_history) < 4:
        raise ValueError("need at least 4 iterates to estimate a rate")
    z_hat = weight_history[-1]
    last = len(weight_history) - 1
    start = max(1, last // 2)
    worst = 0.0
    for n in range(start, last):
        dist = float(np.linalg.norm(weight_history[n] - z_hat))
        worst = max(worst, dist ** (1.0 / n))
    return worst


def _activation_label(topology):
    names = list(dict.fromkeys(topology.activations))
    return names[0] if len(names) == 1 else "+".join(topology.activations)


def write_trials_csv(path, records, config, topology):
    """One row per trial; byte-stable for a fixed configuration and seeds."""
    label = _activation_label(topology)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["seed", "method", "activation", "outcome", "iterations", "final_error", "stalled"]
        )
        for r in records:
            stalled = ""
            if r.outcome == "local_minimum":
                stalled = "true" if r.stalled else "false"
            writer.writerow(
                [r.seed, config.method, label, r.outcome, r.iterations, repr(r.final_error), stalled]
            )


def stats_to_dict(stats):
    return {
        "n_trials": stats.n_trials,
        "successes": stats.successes,
        "mean_iterations_over_successes": stats.mean_iterations_over_successes,
        "failure_counts": dict(stats.failure_counts),
    }


def write_stats_json(path, stats):
    with open(path, "w") as fh:
        json.dump(stats_to_dict(stats), fh, indent=1, sort_keys=True)
        fh.write("\n")


def format_summary(stats, config, topology):
    mean = stats.mean_iterations_over_successes
    mean_txt = "n/a" if mean is None else f"{mean:.1f}"
    fails = " ".join(f"{k}={stats.failure_counts[k]}" for k in FAILURE_OUTCOMES)
    return (
        f"method={config.method} activation={_activation_label(topology)} "
        f"trials={stats.n_trials}\n"
        f"successes={stats.successes} mean_iterations_over_successes={mean_txt}\n"
        f"failures: {fails}"
    )
