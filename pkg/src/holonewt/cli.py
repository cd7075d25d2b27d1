"""Command line front end.

Three subcommands share one JSON config format:

  train    one training run; writes a weights checkpoint, an error
           history CSV and a trial record JSON
  trials   a batch of seeded runs; writes per-trial CSV and summary
           stats JSON, prints a short summary
  verify   finite-difference cross-check of the analytic derivatives;
           prints (or writes) a JSON report

Exit codes: 0 on success, 1 for usage or configuration problems, 2 for
numerical failures (a failed training run, verification out of
tolerance).
"""

import argparse
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

from . import __version__
from .fdcheck import FDConfig, NonFiniteEvaluation, verify_report
from .network import (
    Dataset,
    NetworkTopology,
    init_weights,
    load_dataset,
    save_checkpoint,
)
from .steplength import StepConfig
from .training import (
    TrainConfig,
    format_summary,
    run_trials,
    train,
    write_stats_json,
    write_trials_csv,
)

__all__ = ["main", "ConfigError", "load_config"]

VERIFY_DEFAULTS = {"cogradient_tol": 1e-5, "hessian_tol": 1e-5, "quadratic_form_tol": 1e-4}


class ConfigError(Exception):
    pass


def _builtin_dataset(name):
    ref = resources.files("holonewt").joinpath(f"data/{name}.json")
    if not ref.is_file():
        raise ConfigError(f"no builtin dataset named {name!r}")
    with resources.as_file(ref) as path:
        return load_dataset(path)


def _get(doc, key, kind, default=None, required=False):
    if key not in doc:
        if required:
            raise ConfigError(f"config is missing required key {key!r}")
        return default
    value = doc[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigError(f"config key {key!r} should be {kind.__name__}, got {type(value).__name__}")
    return value


def load_config(path):
    """Parse and validate a config file; returns (topology, dataset, train_config, doc)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")

    known = {"topology", "activations", "dataset_path", "method", "steplength", "trial", "verify"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    widths = _get(doc, "topology", list, required=True)
    activations = _get(doc, "activations", list, required=True)
    try:
        topology = NetworkTopology(tuple(widths), tuple(activations))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(str(exc)) from None

    dataset_path = _get(doc, "dataset_path", str, required=True)
    try:
        if dataset_path.startswith("builtin:"):
            dataset = _builtin_dataset(dataset_path.split(":", 1)[1])
        else:
            dataset = load_dataset((path.parent / dataset_path).resolve())
    except OSError as exc:
        raise ConfigError(f"cannot read dataset: {exc}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad dataset: {exc}") from None
    if dataset.inputs.shape[1] != topology.widths[0]:
        raise ConfigError(
            f"dataset input width {dataset.inputs.shape[1]} does not match topology {topology.widths}"
        )
    if dataset.targets.shape[1] != topology.widths[-1]:
        raise ConfigError(
            f"dataset target width {dataset.targets.shape[1]} does not match topology {topology.widths}"
        )

    sl = _get(doc, "steplength", dict, default={})
    extra = set(sl) - {"mode", "omega", "mu"}
    if extra:
        raise ConfigError(f"unknown steplength keys: {sorted(extra)}")
    tr = _get(doc, "trial", dict, default={})
    extra = set(tr) - {"error_target", "max_iters", "blowup_threshold", "stall_tolerance", "init_range"}
    if extra:
        raise ConfigError(f"unknown trial keys: {sorted(extra)}")
    try:
        step = StepConfig(
            mode=_get(sl, "mode", str, default="one_step_newton"),
            omega=_get(sl, "omega", float, default=0.5),
            constant_mu=_get(sl, "mu", float, default=1.0),
        )
        config = TrainConfig(
            method=_get(doc, "method", str, required=True),
            step=step,
            error_target=_get(tr, "error_target", float, default=0.001),
            max_iters=_get(tr, "max_iters", int, default=None),
            blowup_threshold=_get(tr, "blowup_threshold", float, default=1e10),
            stall_tolerance=_get(tr, "stall_tolerance", float, default=1e-10),
            init_range=_get(tr, "init_range", float, default=1.0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    return topology, dataset, config, doc


def _verify_tolerances(doc):
    section = doc.get("verify", {})
    extra = set(section) - set(VERIFY_DEFAULTS)
    if extra:
        raise ConfigError(f"unknown verify keys: {sorted(extra)}")
    tols = dict(VERIFY_DEFAULTS)
    for key in section:
        tols[key] = _get(section, key, float)
    return tols


def _resolve_jobs(value):
    if value is None:
        env = os.environ.get("HOLONEWT_JOBS", "")
        if not env:
            return 1
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"HOLONEWT_JOBS={env!r} is not an integer") from None
    if value < 1:
        raise ConfigError("jobs must be at least 1")
    return value


def _write_manifest(outdir, command, doc, artifacts, started):
    manifest = {
        "command": command,
        "config": doc,
        "artifacts": [str(Path(a).name) for a in artifacts],
        "version": __version__,
        "duration_seconds": round(time.monotonic() - started, 3),
    }
    with open(Path(outdir) / "run_manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")


def cmd_train(args):
    started = time.monotonic()
    topology, dataset, config, doc = load_config(args.config)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    record = train(topology, dataset, config, args.seed)

    ckpt = outdir / "weights.json"
    save_checkpoint(ckpt, topology, record.final_weights)
    history = outdir / "error_history.csv"
    with open(history, "w", newline="") as fh:
        fh.write("iteration,error\n")
        for n, e in enumerate(record.error_history):
            fh.write(f"{n},{e!r}\n")
    record_path = outdir / "trial_record.json"
    with open(record_path, "w") as fh:
        json.dump(
            {
                "seed": record.seed,
                "outcome": record.outcome,
                "iterations": record.iterations,
                "final_error": record.final_error,
                "stalled": record.stalled,
            },
            fh,
            indent=1,
        )
        fh.write("\n")
    _write_manifest(outdir, "train", doc, [ckpt, history, record_path], started)
    print(f"outcome={record.outcome} iterations={record.iterations} final_error={record.final_error:.6g}")
    return 0 if record.outcome == "success" else 2


def cmd_trials(args):
    started = time.monotonic()
    topology, dataset, config, doc = load_config(args.config)
    jobs = _resolve_jobs(args.jobs)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    stats, records = run_trials(topology, dataset, config, args.trials, args.seed, jobs=jobs)
    csv_path = outdir / "trials.csv"
    write_trials_csv(csv_path, records, config, topology)
    stats_path = outdir / "stats.json"
    write_stats_json(stats_path, stats)
    _write_manifest(outdir, "trials", doc, [csv_path, stats_path], started)
    print(format_summary(stats, config, topology))
    return 0


def cmd_verify(args):
    topology, dataset, config, doc = load_config(args.config)
    tols = _verify_tolerances(doc)
    weights = init_weights(topology, args.seed, config.init_range)
    try:
        report = verify_report(topology, weights, dataset, FDConfig())
    except NonFiniteEvaluation as exc:
        print(f"verification aborted: {exc}", file=sys.stderr)
        return 2
    ok = (
        report["max_cogradient_rel"] <= tols["cogradient_tol"]
        and report["max_h_ww_rel"] <= tols["hessian_tol"]
        and report["max_h_wbar_w_rel"] <= tols["hessian_tol"]
        and report["max_quadratic_form_rel"] <= tols["quadratic_form_tol"]
    )
    report["tolerances"] = tols
    report["within_tolerance"] = ok
    text = json.dumps(report, indent=1, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0 if ok else 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; this tool reserves 2
    # for numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def build_parser():
    parser = _Parser(prog="holonewt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"holonewt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run one training trial")
    p_train.add_argument("--config", required=True)
    p_train.add_argument("--out", required=True, help="output directory")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.set_defaults(func=cmd_train)

    p_trials = sub.add_parser("trials", help="run a batch of seeded trials")
    p_trials.add_argument("--config", required=True)
    p_trials.add_argument("--out", required=True, help="output directory")
    p_trials.add_argument("--trials", type=int, default=100, metavar="N")
    p_trials.add_argument("--seed", type=int, default=0, help="base seed; trial k uses seed+k")
    p_trials.add_argument("--jobs", type=int, default=None, help="parallel workers (env HOLONEWT_JOBS)")
    p_trials.set_defaults(func=cmd_trials)

    p_verify = sub.add_parser("verify", help="finite-difference derivative check")
    p_verify.add_argument("--config", required=True)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--out", default=None, help="optional report path")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"holonewt: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"holonewt: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
