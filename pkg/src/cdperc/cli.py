"""Command line front end: JSON configs in, CSV results plus a
reproducibility manifest out.

Exit codes: 0 success, 2 invalid config, 3 budget exceeded, 4 internal
invariant violation.  Result rows are written by a single writer in a
deterministic order, so identical (config, seed) runs produce byte
identical CSV files regardless of --threads.  A manifest records the
resolved config and result digests and is itself accepted as a config,
which makes any finished run replayable verbatim.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .contours import BudgetError, enumerate_contours, verify_census
from .estimators import (ExperimentConfig, estimate_crossing, estimate_tc,
                         estimate_theta, k2_decay_experiment,
                         simulate_schedules, tree_red_density, tree_survival,
                         uniqueness_experiment)
from .exact import CORNER_CASES, corner_blocker_probability, peierls_eval
from .lattice import SizingError
from .trees import ORACLE_MAX_ARITY, red_edge_probability, red_edge_probability_oracle

CONFIG_SCHEMA = 1

MC_COMMANDS = ("simulate", "theta", "crossing", "tc", "k2", "uniqueness", "tree")
EXACT_COMMANDS = ("contours", "perm-oracle", "peierls", "red-prob")
COMMANDS = MC_COMMANDS + EXACT_COMMANDS


class ConfigError(ValueError):
    """Invalid configuration; message names the offending field."""


class InvariantViolation(RuntimeError):
    """An internal consistency check failed during a run."""


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def load_config(path: str, command: str, seed_override: int | None) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as err:
        raise ConfigError(f"config: cannot read {path}: {err}")
    except json.JSONDecodeError as err:
        raise ConfigError(f"config: invalid JSON in {path}: {err}")
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be an object")
    schema = raw.get("schema")
    if schema != CONFIG_SCHEMA:
        raise ConfigError(f"schema: expected {CONFIG_SCHEMA}, got {schema!r}")
    experiment = raw.get("experiment")
    if experiment != command:
        raise ConfigError(
            f"experiment: config says {experiment!r} but command is {command!r}")
    seed = seed_override if seed_override is not None else raw.get("seed")
    if not isinstance(seed, int):
        raise ConfigError("seed: a 64-bit integer master seed is required")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params: must be an object")
    return {"experiment": experiment, "seed": seed, "params": params}


def build_experiment_config(command: str, seed: int, params: dict,
                            threads: int) -> ExperimentConfig:
    allowed = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"params: unknown fields {sorted(unknown)}")
    merged = dict(params)
    for key in ("sizes", "t_grid"):
        if key in merged:
            merged[key] = tuple(merged[key])
    merged.pop("kind", None)
    merged.pop("seed", None)
    merged.pop("threads", None)
    try:
        cfg = ExperimentConfig(kind=command, seed=seed, threads=threads,
                               **merged)
        return cfg.validated()
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err))


# ---------------------------------------------------------------------------
# Per-command runners: return (header, rows)
# ---------------------------------------------------------------------------

def _run_simulate(cfg: ExperimentConfig, params: dict):
    rows = [(r, n_open, n_blocked)
            for (r, n_open, n_blocked) in simulate_schedules(cfg)]
    return ("replica", "open_edges", "blocked_edges"), sorted(rows)


def _run_theta(cfg: ExperimentConfig, params: dict):
    curve = estimate_theta(cfg)
    rows = [(float(t), float(p), float(hw), curve.replicas)
            for t, p, hw in zip(curve.ts, curve.estimates, curve.half_widths)]
    return ("t", "estimate", "half_width", "replicas"), rows


def _run_crossing(cfg: ExperimentConfig, params: dict):
    ts = params.get("ts") or ([cfg.t] if cfg.t is not None else [0.5])
    sizes = cfg.sizes if cfg.sizes else (cfg.L,)
    rows = []
    for L in sizes:
        sub = dataclasses.replace(cfg, L=L, sizes=())
        for t in ts:
            est = estimate_crossing(sub, float(t))
            rows.append((L, float(t), est.value, est.half_width,
                         est.successes, est.replicas))
    return ("L", "t", "estimate", "half_width", "successes", "replicas"), \
        sorted(rows)


def _run_tc(cfg: ExperimentConfig, params: dict):
    est = estimate_tc(cfg)
    rows = [(b.L, b.t_lo, b.t_hi, b.converged, len(b.evaluations),
             sum(n for (_t, _s, n) in b.evaluations))
            for b in est.brackets]
    return ("L", "t_lo", "t_hi", "converged", "evaluations", "total_replicas"), \
        sorted(rows)


def _run_k2(cfg: ExperimentConfig, params: dict):
    series = k2_decay_experiment(cfg)
    rows = []
    for i, n in enumerate(series.ns):
        if i < len(series.mean_increments):
            inc = series.mean_increments[i]
            inc_hw = series.increment_half_widths[i]
        else:
            inc, inc_hw = "", ""
        rows.append((int(n), float(series.mean_counts[i]),
                     float(series.count_half_widths[i]),
                     _fmt(inc) if inc != "" else "",
                     _fmt(inc_hw) if inc_hw != "" else "",
                     series.replicas))
    return ("n", "mean_count", "count_half_width",
            "mean_increment", "increment_half_width", "replicas"), rows


def _run_uniqueness(cfg: ExperimentConfig, params: dict):
    t = cfg.t if cfg.t is not None else 1.0
    sizes = cfg.sizes if cfg.sizes else (cfg.L,)
    rows = []
    for L in sizes:
        sub = dataclasses.replace(cfg, L=L, sizes=())
        hist = uniqueness_experiment(sub, t)
        for count, freq in hist.counts.items():
            rows.append((L, float(t), count, freq, hist.replicas))
    return ("L", "t", "crossing_clusters", "frequency", "replicas"), sorted(rows)


def _run_tree(cfg: ExperimentConfig, params: dict):
    t = cfg.t if cfg.t is not None else 1.0
    est = tree_survival(cfg, t)
    rows = [("survival", cfg.d, cfg.depth, float(t), est.value,
             est.half_width, est.replicas)]
    if params.get("red_density", True):
        mean, hw = tree_red_density(cfg)
        rows.append(("red_density", cfg.d, cfg.depth, float(t), mean, hw,
                     cfg.replicas))
    return ("metric", "d", "depth", "t", "value", "half_width", "replicas"), rows


def _run_contours(seed: int, params: dict, threads: int):
    n_max = params.get("n_max", 12)
    if not isinstance(n_max, int) or n_max < 4:
        raise ConfigError("n_max: need an integer >= 4")
    census = enumerate_contours(n_max)
    rows = []
    for cell in verify_census(census):
        rows.append((cell.n, cell.r, cell.m, cell.count, cell.bound,
                     cell.bound_strict, cell.bound_ok, cell.anomaly_checked,
                     len(cell.anomaly_failures)))
    return ("n", "r", "m", "count", "bound", "bound_strict", "bound_ok",
            "anomaly_checked", "anomaly_failures"), sorted(rows)


def _run_perm_oracle(seed: int, params: dict, threads: int):
    cases = params.get("cases", list(CORNER_CASES))
    rows = []
    for case in cases:
        if case not in CORNER_CASES:
            raise ConfigError(f"cases: unknown case {case!r}")
        prob = corner_blocker_probability(case)
        rows.append((case, prob.numerator, prob.denominator))
    return ("case", "numerator", "denominator"), rows


def _run_peierls(seed: int, params: dict, threads: int):
    ts = params.get("ts", [1.0])
    rows = []
    for t in ts:
        pp = peierls_eval(float(t))
        rows.append((pp.t, pp.eps, pp.p, pp.alpha, pp.beta, pp.delta,
                     pp.eps_tilde, pp.tail_ratio, pp.summable,
                     pp.stirling_gap))
    return ("t", "eps", "p", "alpha", "beta", "delta", "eps_tilde",
            "tail_ratio", "summable", "stirling_gap"), rows


def _run_red_prob(seed: int, params: dict, threads: int):
    arities = params.get("arities", [2, 3, 4, 5])
    with_oracle = params.get("oracle", True)
    rows = []
    for d in arities:
        if not isinstance(d, int) or d < 2:
            raise ConfigError("arities: need integers >= 2")
        prob = red_edge_probability(d)
        if with_oracle and d <= ORACLE_MAX_ARITY:
            oracle = red_edge_probability_oracle(d)
            rows.append((d, prob.numerator, prob.denominator,
                         oracle.numerator, oracle.denominator,
                         prob == oracle))
        else:
            rows.append((d, prob.numerator, prob.denominator, "", "", ""))
    return ("d", "numerator", "denominator", "oracle_numerator",
            "oracle_denominator", "agree"), rows


def run(config_path: str, command: str, out_dir: str = ".",
        seed_override: int | None = None, threads: int = 1) -> Path:
    """Execute one configured experiment; returns the manifest path."""
    conf = load_config(config_path, command, seed_override)
    seed, params = conf["seed"], conf["params"]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    started = time.time()
    if command in MC_COMMANDS:
        cfg = build_experiment_config(command, seed, params, threads)
        runner = {
            "simulate": _run_simulate,
            "theta": _run_theta,
            "crossing": _run_crossing,
            "tc": _run_tc,
            "k2": _run_k2,
            "uniqueness": _run_uniqueness,
            "tree": _run_tree,
        }[command]
        header, rows = runner(cfg, params)
    else:
        runner = {
            "contours": _run_contours,
            "perm-oracle": _run_perm_oracle,
            "peierls": _run_peierls,
            "red-prob": _run_red_prob,
        }[command]
        header, rows = runner(seed, params, threads)
    duration = time.time() - started

    csv_path = out / f"{command}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])

    digest = hashlib.sha256(csv_path.read_bytes()).hexdigest()
    manifest = {
        "schema": CONFIG_SCHEMA,
        "tool": "cdperc",
        "version": __version__,
        "experiment": command,
        "seed": seed,
        "params": params,
        "duration_s": round(duration, 3),
        "threads": threads,
        "results": [{"file": csv_path.name, "sha256": digest,
                     "rows": len(rows)}],
    }
    manifest_path = out / "manifest.json"
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cdperc",
        description="constrained-degree percolation experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config master seed")
        p.add_argument("--out-dir", default=".", help="result directory")
        p.add_argument("--threads", type=int, default=1,
                       help="parallel replica width; never affects results")
    args = parser.parse_args(argv)

    try:
        manifest = run(args.config, args.command, args.out_dir,
                       args.seed, args.threads)
    except ConfigError as err:
        print(f"invalid config: {err}", file=sys.stderr)
        return 2
    except (SizingError, BudgetError) as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return 3
    except (AssertionError, InvariantViolation) as err:
        print(f"internal invariant violation: {err}", file=sys.stderr)
        return 4
    print(manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
