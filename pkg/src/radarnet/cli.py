"""Command-line entry point: ``radarnet <subcommand> [options]``.

Every subcommand writes its artifacts into ``--out`` under names built from
the subcommand and a hash of its inputs, so identical inputs give identical
files.  Exit codes: 0 success, 1 validation failure, 2 usage or input error.
"""

import argparse
import hashlib
import json
import os
import shutil
import sys
import tempfile

import numpy as np

from . import experiments, report
from ._validation import DomainError, NumericalError, ParameterError
from .detection import LinearClassifier, gen_synthetic_dataset, save_dataset
from .multiuser import divide_multi, divide_single, format_delay_poly, parse_delay_poly
from .traffic import EventLog, ScenarioConfig, Trajectories, run_scenario
from .worldline import cluster_worldlines, evaluate_tracks, save_clouds

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

DECOUPLE_FIXTURES = {
    "cases": [
        {"name": "two_echoes", "y": "z^-1 + 2 z^-2 + 3/2 z^-3 + z^-4 + 1/2 z^-5", "x0": "1 + 2 z^-1 + z^-2",
         "max_delay": 10},
        {"name": "identity", "y": "1 + 2 z^-1 + z^-2", "x0": "1 + 2 z^-1 + z^-2"},
        {"name": "two_waveforms", "y": "1 + z^-1 + z^-2 + z^-3", "basis": ["z^-2 + 1", "z^-1 + 1"]},
        {"name": "residue_left", "y": "z^-2 + 1", "basis": ["z^-2"]},
    ]
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _digest(obj):
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=report._json_default)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _load_config(path, seed):
    if path is None:
        cfg = ScenarioConfig()
    else:
        if not os.path.isfile(path):
            raise UsageError(f"config file not found: {path}")
        cfg = ScenarioConfig.load(path)
    if seed is not None:
        cfg = ScenarioConfig.from_dict({**cfg.to_dict(), "seed": seed})
    return cfg


def _need_file(path, what):
    if path is None:
        raise UsageError(f"--{what} is required")
    if not os.path.isfile(path):
        raise UsageError(f"{what} file not found: {path}")
    return path


class _Artifacts:
    """Stage files in a private directory and move them into place only on success."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.files = []

    def __enter__(self):
        os.makedirs(self.out_dir, exist_ok=True)
        self.stage = tempfile.mkdtemp(prefix=".staging-", dir=self.out_dir)
        return self

    def path(self, name):
        self.files.append(name)
        return os.path.join(self.stage, name)

    def text(self, name, text):
        with open(self.path(name), "w", newline="") as fh:
            fh.write(text)

    def __exit__(self, exc_type, exc, tb):
        try:
            if exc_type is None:
                for name in self.files:
                    os.replace(os.path.join(self.stage, name), os.path.join(self.out_dir, name))
        finally:
            shutil.rmtree(self.stage, ignore_errors=True)
        return False


def cmd_simulate(args):
    cfg = _load_config(args.config, args.seed)
    if args.duration is not None:
        cfg = ScenarioConfig.from_dict({**cfg.to_dict(), "sim_duration": args.duration})
    h = cfg.config_hash()
    log = run_scenario(cfg)
    summary = experiments.analyze_log(log, alpha=args.alpha, seed=cfg.seed, episode_gap=args.episode_gap)
    summary["config"] = cfg.to_dict()
    summary["n_vehicles"] = log.n_vehicles
    with _Artifacts(args.out) as art:
        log.to_csv(art.path(f"simulate-{h}-events.csv"))
        log.trajectories.to_csv(art.path(f"simulate-{h}-trajectories.csv"), log.header())
        art.text(f"simulate-{h}-report.json", report.dumps(summary))
    print(f"simulate: {len(log)} events, {log.n_vehicles} vehicles -> {args.out}")
    return EXIT_OK


def cmd_analyze(args):
    log = EventLog.from_csv(_need_file(args.log, "log"))
    seed = 0 if args.seed is None else args.seed
    h = _digest({"log": log.config_hash, "seed": log.seed, "mc_seed": seed, "alpha": args.alpha,
                 "gap": args.episode_gap})
    summary = experiments.analyze_log(log, alpha=args.alpha, seed=seed, episode_gap=args.episode_gap)
    summary["mc_seed"] = seed
    with _Artifacts(args.out) as art:
        art.text(f"analyze-{h}.json", report.dumps(summary))
    print(f"analyze: {summary['episodes']} episodes -> {args.out}")
    return EXIT_OK


def cmd_detect(args):
    from sklearn.metrics import confusion_matrix
    from sklearn.model_selection import train_test_split

    cfg = _load_config(args.config, args.seed)
    n = 500 if args.trials is None else args.trials
    snr = (args.snr_lo, args.snr_hi)
    h = _digest({"config": cfg.config_hash(), "n": n, "snr": snr})
    data = gen_synthetic_dataset(n, snr, cfg.chirp, cfg.if_config, cfg.seed)
    Xtr, Xte, ytr, yte = train_test_split(data.features, data.labels, test_size=0.5,
                                          random_state=cfg.seed, stratify=data.labels)
    clf = LinearClassifier().fit(Xtr, ytr)
    pred = clf.predict(Xte)
    labels = list(clf.classes_)
    metrics = {
        "config_hash": cfg.config_hash(), "seed": cfg.seed, "n_per_class": n, "snr_range_dB": list(snr),
        "test_accuracy": float(np.mean(pred == yte)),
        "train_accuracy": float(np.mean(clf.predict(Xtr) == ytr)),
        "labels": labels, "confusion": confusion_matrix(yte, pred, labels=labels).tolist(),
        "weights": clf.coef_.tolist(), "intercept": float(clf.intercept_),
    }
    with _Artifacts(args.out) as art:
        save_dataset(data, art.path(f"detect-{h}-dataset.csv"))
        art.text(f"detect-{h}-metrics.json", report.dumps(metrics))
    print(f"detect: held-out accuracy {metrics['test_accuracy']:.4f} -> {args.out}")
    return EXIT_OK


def _decouple_case(case):
    y = parse_delay_poly(case["y"])
    out = {"name": case.get("name", ""), "y": format_delay_poly(y)}
    if "x0" in case:
        x0 = parse_delay_poly(case["x0"])
        res = divide_single(y, x0, case.get("max_delay"))
        out.update(branches=[{"amplitude": str(b.amplitude), "delay": b.delay} for b in res.branches],
                   residue=format_delay_poly(res.residue), flagged=res.flagged)
        recon = sum((x0.shifted(b.delay, b.amplitude) for b in res.branches), res.residue)
    elif "basis" in case:
        basis = [parse_delay_poly(b) for b in case["basis"]]
        res = divide_multi(y, basis, case.get("order_bounds"))
        out.update(quotients=[format_delay_poly(q) for q in res.quotients],
                   residue=format_delay_poly(res.residue), improper=res.improper)
        recon = sum((q * b for q, b in zip(res.quotients, basis)), res.residue)
    else:
        raise ParameterError(f"case {out['name']!r} needs either 'x0' or 'basis'")
    out["reconstructs"] = bool(recon == y)
    return out


def cmd_decouple(args):
    if args.input is None:
        fixtures = DECOUPLE_FIXTURES
    else:
        with open(_need_file(args.input, "input")) as fh:
            try:
                fixtures = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParameterError(f"fixture file is not valid JSON: {exc}") from None
    if not isinstance(fixtures, dict) or set(fixtures) != {"cases"}:
        raise ParameterError("fixture file must be an object with a single 'cases' list")
    results = [_decouple_case(c) for c in fixtures["cases"]]
    h = _digest(fixtures)
    with _Artifacts(args.out) as art:
        art.text(f"decouple-{h}.json", report.dumps({"input_hash": h, "results": results}))
    ok = all(r["reconstructs"] for r in results)
    print(f"decouple: {len(results)} cases, reconstruction {'ok' if ok else 'FAILED'} -> {args.out}")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_worldline(args):
    log = EventLog.from_csv(_need_file(args.log, "log"))
    traj = Trajectories.from_csv(_need_file(args.trajectories, "trajectories"))
    cfg = _load_config(args.config, None)
    v_max = experiments.default_v_max(cfg.speed_limit) if args.v_max is None else args.v_max
    clouds = experiments.clouds_from_log(log, traj, cfg.n_array_elements)
    lines = cluster_worldlines(clouds, v_max)
    errors = evaluate_tracks(lines, experiments.truth_trajectories(traj))
    members = sorted(c for line in lines for c in line.members)
    result = {
        "config_hash": log.config_hash, "seed": log.seed, "v_max": v_max, "n_clouds": len(clouds),
        "partition_ok": members == sorted(c.cloud_id for c in clouds),
        "speed_ok": all(line.speed <= v_max + 1e-9 for line in lines),
        "pooled_median_error_m": experiments.finite_or_none(errors.pooled_median),
        "lines": [{"anchor": list(line.anchor), "anchor_time": line.anchor_time,
                   "velocity": list(line.velocity), "members": list(line.members),
                   "median_error_m": experiments.finite_or_none(float(e))}
                  for line, e in zip(lines, errors.per_line_median)],
    }
    h = _digest({"log": log.config_hash, "seed": log.seed, "v_max": v_max, "n": cfg.n_array_elements})
    with _Artifacts(args.out) as art:
        save_clouds(clouds, art.path(f"worldline-{h}-clouds.csv"))
        art.text(f"worldline-{h}.json", report.dumps(result))
    print(f"worldline: {len(lines)} lines from {len(clouds)} clouds -> {args.out}")
    return EXIT_OK if result["partition_ok"] and result["speed_ok"] else EXIT_FAILED


def cmd_verify(args):
    seed = 0 if args.seed is None else args.seed
    trials = 10_000 if args.trials is None else args.trials
    h = _digest({"seed": seed, "trials": trials, "quick": args.quick})
    oracles = report.run_oracle_suite(trials, seed, quick=args.quick)
    compat = report.compatibility_report(trials, seed)
    passed = all(bool(v["passed"]) for v in oracles.values())
    with _Artifacts(args.out) as art:
        art.text(f"verify-{h}-oracles.json", report.dumps({"seed": seed, "trials": trials, "passed": passed,
                                                           "checks": oracles}))
        art.text(f"verify-{h}-compatibility.json", report.dumps(compat))
    for name, res in sorted(oracles.items()):
        print(f"{'PASS' if res['passed'] else 'FAIL'} {name}")
    return EXIT_OK if passed else EXIT_FAILED


def build_parser():
    p = _Parser(prog="radarnet", description="Automotive radar interference experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, config=True):
        sp.add_argument("--out", default=".", help="artifact directory")
        sp.add_argument("--seed", type=int, default=None)
        if config:
            sp.add_argument("--config", default=None, help="scenario config (JSON)")

    s = sub.add_parser("simulate", help="run a traffic scenario and log interference events")
    common(s)
    s.add_argument("--duration", type=float, default=None, help="override sim_duration (s)")
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--episode-gap", type=float, default=experiments.DEFAULT_EPISODE_GAP)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("analyze", help="histograms, ECDFs and exponential tests for an event log")
    common(s, config=False)
    s.add_argument("--log")
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--episode-gap", type=float, default=experiments.DEFAULT_EPISODE_GAP)
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("detect", help="synthetic dataset and linear interference classifier")
    common(s)
    s.add_argument("--trials", type=int, default=None, help="frames per class")
    s.add_argument("--snr-lo", type=float, default=0.0)
    s.add_argument("--snr-hi", type=float, default=20.0)
    s.set_defaults(func=cmd_detect)

    s = sub.add_parser("decouple", help="delay-polynomial division of fixture signals")
    s.add_argument("--out", default=".")
    s.add_argument("--input", default=None, help="JSON fixture file (default: built-in cases)")
    s.set_defaults(func=cmd_decouple)

    s = sub.add_parser("worldline", help="cluster uncertainty clouds from a log into world lines")
    common(s)
    s.add_argument("--log")
    s.add_argument("--trajectories")
    s.add_argument("--v-max", type=float, default=None)
    s.set_defaults(func=cmd_worldline)

    s = sub.add_parser("verify", help="oracle suite and compatibility report")
    common(s, config=False)
    s.add_argument("--trials", type=int, default=None)
    s.add_argument("--quick", action="store_true", help="reduced sample counts")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"radarnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParameterError, DomainError, NumericalError) as exc:
        print(f"radarnet: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ParameterError) else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
