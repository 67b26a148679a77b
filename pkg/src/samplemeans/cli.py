"""Command line interface.

Subcommands:
    kmeans       K-means++ plus Lloyd on the full dataset
    bigmeans     sequential Big-means on uniform samples
    competitive  parallel Big-means with competitive sample-size optimization
    bench        repeated runs of several algorithms with summary metrics
    synth        write a synthetic gaussian-blob dataset to CSV

Results are emitted as JSON (schema below, versioned via schema_version).
--format csv dumps centroids and labels as CSV instead and is only valid
for the three clustering subcommands. --no-timing strips all wall-clock
fields so that rerunning with the same seed gives byte-identical output.

Exit codes: 0 success, 1 runtime failure (I/O, parsing), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time

import numpy as np

from . import __version__, backend
from .bigmeans import StopCondition, big_means
from .competitive import CompetitiveConfig, derive_rng, run_competitive
from .core import as_points
from .ingest import IngestError, IngestSpec, load, synth_blobs
from .kmeans import (
    DEFAULT_MAX_ITER,
    DEFAULT_N_CANDIDATES,
    DEFAULT_REL_TOL,
    LloydConfig,
    fit_kmeans,
)
from .metrics import (
    AlgoStats,
    BenchReport,
    compute_baseline,
    multi_worker_baseline_time,
    relative_accuracy,
    success_counts,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
WORKERS_ENV_VAR = "SAMPLEMEANS_WORKERS"

# Stream domain for per-run seeds inside bench (see competitive.derive_rng).
_BENCH_DOMAIN = 3

RESULT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["schema_version", "command", "backend", "dataset", "params", "result"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"enum": ["kmeans", "bigmeans", "competitive", "bench"]},
        "backend": {"enum": ["numba", "numpy"]},
        "dataset": {
            "type": "object",
            "required": ["m", "n"],
            "properties": {
                "m": {"type": "integer", "minimum": 1},
                "n": {"type": "integer", "minimum": 1},
            },
        },
        "params": {"type": "object"},
        "result": {"type": "object"},
        "wall_time": {"type": "number", "minimum": 0},
    },
    "allOf": [
        {
            "if": {"properties": {"command": {"const": "competitive"}}},
            "then": {
                "properties": {
                    "result": {
                        "required": [
                            "centroids",
                            "labels",
                            "objective",
                            "s_opt",
                            "per_worker_f_hat",
                            "improvement_log",
                            "best_worker",
                        ]
                    }
                }
            },
        }
    ],
}


class UsageError(Exception):
    pass


def _positive(kind, name, value, minimum=1):
    if value < minimum:
        raise UsageError(f"{name} must be at least {minimum}, got {value}")
    return kind(value)


def _add_dataset_flags(p):
    p.add_argument("--input", required=True, help="delimited text file (.gz accepted)")
    p.add_argument("--delimiter", default=",", help="field delimiter; use \\t for tabs")
    p.add_argument("--skip-header", action="store_true", help="drop the first line")
    p.add_argument("--columns", default=None,
                   help="comma-separated column indices to keep, e.g. 0,1,3")
    p.add_argument("--normalize", action="store_true",
                   help="min-max scale each feature onto [0,1]")


def _add_output_flags(p):
    p.add_argument("--output", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--no-timing", action="store_true",
                   help="omit wall-clock fields for reproducible output")


def _add_lloyd_flags(p):
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL)
    p.add_argument("--n-candidates", type=int, default=DEFAULT_N_CANDIDATES)


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--f-star", type=float, default=None,
                   help="reference objective for relative accuracy")
    p.add_argument("--verbose", "-v", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="samplemeans",
        description="Big-data minimum-sum-of-squares clustering toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kmeans", help="K-means++ plus Lloyd on the full data")
    _add_dataset_flags(p)
    _add_output_flags(p)
    _add_lloyd_flags(p)
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--restarts", type=int, default=1)

    p = sub.add_parser("bigmeans", help="sequential Big-means")
    _add_dataset_flags(p)
    _add_output_flags(p)
    _add_lloyd_flags(p)
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True, help="sample size per step")
    p.add_argument("--max-samples", type=int, default=None)
    p.add_argument("--time-budget", type=float, default=None, help="seconds")

    p = sub.add_parser("competitive", help="competitive parallel Big-means")
    _add_dataset_flags(p)
    _add_output_flags(p)
    _add_lloyd_flags(p)
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, default=None,
                   help="base sample size; implies s_min=0.5*s, s_max=min(2*s, m)")
    p.add_argument("--s-min", type=int, default=None)
    p.add_argument("--s-max", type=int, default=None)
    p.add_argument("--p", "--passes", dest="p", type=int, default=10,
                   help="passes per epoch")
    p.add_argument("--T", "--epochs", dest="T", type=int, required=True,
                   help="epochs per worker")
    p.add_argument("--workers", type=int, default=None,
                   help=f"worker count (default ${WORKERS_ENV_VAR} or 4)")
    p.add_argument("--max-samples", type=int, default=None,
                   help="per-worker pass budget")
    p.add_argument("--time-budget", type=float, default=None, help="seconds")
    p.add_argument("--sequential", action="store_true",
                   help="simulate the workers one by one on a single thread")

    p = sub.add_parser("bench", help="repeated-run benchmark with summary metrics")
    _add_dataset_flags(p)
    _add_output_flags(p)
    _add_lloyd_flags(p)
    _add_common(p)
    p.add_argument("--algo", default="competitive,bigmeans",
                   help="comma-separated subset of: competitive,bigmeans")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True, help="Big-means sample size")
    p.add_argument("--s-min", type=int, default=None)
    p.add_argument("--s-max", type=int, default=None)
    p.add_argument("--p", "--passes", dest="p", type=int, default=10)
    p.add_argument("--T", "--epochs", dest="T", type=int, default=5)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--n-exec", type=int, default=5)
    p.add_argument("--max-samples", type=int, default=None,
                   help="Big-means step budget (default workers*T*p)")
    p.add_argument("--time-budget", type=float, default=None)
    p.add_argument("--succ-tol", type=float, default=1e-9,
                   help="relative tolerance when counting per-run successes")
    p.add_argument("--sequential", action="store_true")

    p = sub.add_parser("synth", help="generate a gaussian-blob CSV dataset")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--spread", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="CSV path for the points")
    p.add_argument("--centers-out", default=None, help="optional CSV path for true centers")
    p.add_argument("--verbose", "-v", action="count", default=0)

    return parser


def _parse_columns(text):
    if text is None:
        return None
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise UsageError(f"--columns must be comma-separated integers, got {text!r}") from None


def _ingest_spec(args) -> IngestSpec:
    delim = args.delimiter.replace("\\t", "\t")
    try:
        return IngestSpec(
            path=args.input,
            delimiter=delim,
            skip_header=args.skip_header,
            columns=_parse_columns(args.columns),
            normalize=args.normalize,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _default_workers(args) -> int:
    if getattr(args, "workers", None) is not None:
        return args.workers
    env = os.environ.get(WORKERS_ENV_VAR, "").strip()
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{WORKERS_ENV_VAR} must be an integer, got {env!r}") from None
    return 4


def _validate_common(args):
    if getattr(args, "k", None) is not None:
        _positive(int, "--k", args.k)
    if getattr(args, "seed", None) is not None and args.seed < 0:
        raise UsageError(f"--seed must be non-negative, got {args.seed}")
    if getattr(args, "f_star", None) is not None and args.f_star <= 0:
        raise UsageError(f"--f-star must be positive, got {args.f_star}")
    if getattr(args, "max_iter", None) is not None:
        _positive(int, "--max-iter", args.max_iter)
    if getattr(args, "rel_tol", None) is not None and args.rel_tol < 0:
        raise UsageError(f"--rel-tol must be non-negative, got {args.rel_tol}")
    if getattr(args, "n_candidates", None) is not None:
        _positive(int, "--n-candidates", args.n_candidates)
    if getattr(args, "format", "json") == "csv" and args.command == "bench":
        raise UsageError("--format csv supports centroid/label dumps only, not bench reports")
    if getattr(args, "format", "json") == "csv" and args.output == "-":
        raise UsageError("--format csv needs --output (two files are written)")


def _sample_range(args, m) -> tuple[int, int]:
    s_min, s_max = args.s_min, args.s_max
    if s_min is None or s_max is None:
        if args.s is None:
            raise UsageError("give --s or both --s-min and --s-max")
        if s_min is None:
            s_min = max(1, int(math.floor(0.5 * args.s + 0.5)))
        if s_max is None:
            s_max = min(2 * args.s, m)
    return s_min, s_max


def _py(obj):
    # numpy-to-plain-python for json serialization; non-finite floats -> None
    if isinstance(obj, np.ndarray):
        return _py(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [_py(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _py(v) for k, v in obj.items()}
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _trace_doc(trace, with_timing):
    if with_timing:
        return {"events": _py([[t, v] for t, v in trace.events]),
                "segment_starts": list(trace.segment_starts)}
    return {"objectives": _py(trace.values()),
            "segment_starts": list(trace.segment_starts)}


def _emit_json(doc, args) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)


def _emit_csv(centroids, labels, args) -> None:
    np.savetxt(args.output, centroids, delimiter=",", fmt="%.17g")
    root, ext = os.path.splitext(args.output)
    labels_path = f"{root}_labels{ext or '.csv'}"
    np.savetxt(labels_path, labels, fmt="%d")
    log.info("wrote %s and %s", args.output, labels_path)


def _envelope(args, command, m, n, params, result, wall_time):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "backend": backend.name(),
        "dataset": {"path": args.input, "m": int(m), "n": int(n)},
        "params": _py(params),
        "result": _py(result),
    }
    if not args.no_timing and wall_time is not None:
        doc["wall_time"] = wall_time
    return doc


def _maybe_epsilon(objective, args):
    if args.f_star is None:
        return {}
    return {"epsilon": relative_accuracy(objective, args.f_star)}


def _cmd_kmeans(args) -> int:
    _validate_common(args)
    _positive(int, "--restarts", args.restarts)
    spec = _ingest_spec(args)
    X = as_points(load(spec))
    if args.k > X.shape[0]:
        raise UsageError(f"--k {args.k} exceeds the number of points {X.shape[0]}")
    cfg = LloydConfig(args.max_iter, args.rel_tol)
    t0 = time.perf_counter()
    res = fit_kmeans(X, args.k, np.random.default_rng(args.seed), cfg,
                     args.n_candidates, args.restarts)
    wall = time.perf_counter() - t0
    result = {
        "objective": res.objective,
        "iterations": res.iterations,
        "centroids": res.centroids.centers,
        "degenerate": res.centroids.degenerate,
        "labels": res.labels,
        **_maybe_epsilon(res.objective, args),
    }
    if args.format == "csv":
        _emit_csv(res.centroids.centers, res.labels, args)
        return 0
    params = {"k": args.k, "seed": args.seed, "restarts": args.restarts,
              "max_iter": args.max_iter, "rel_tol": args.rel_tol,
              "n_candidates": args.n_candidates}
    _emit_json(_envelope(args, "kmeans", X.shape[0], X.shape[1], params, result, wall), args)
    return 0


def _cmd_bigmeans(args) -> int:
    _validate_common(args)
    if args.max_samples is None and args.time_budget is None:
        raise UsageError("give --max-samples, --time-budget, or both")
    spec = _ingest_spec(args)
    X = as_points(load(spec))
    try:
        stop = StopCondition(args.max_samples, args.time_budget)
        centroids, labels, trace = big_means(
            X, args.k, args.s, stop, LloydConfig(args.max_iter, args.rel_tol),
            np.random.default_rng(args.seed), args.n_candidates,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = {
        "objective": trace.final_full_objective,
        "best_sample_objective": trace.final_sample_objective,
        "steps": len(trace.events),
        "centroids": centroids.centers,
        "degenerate": centroids.degenerate,
        "labels": labels,
        "trace": _trace_doc(trace, not args.no_timing),
        **_maybe_epsilon(trace.final_full_objective, args),
    }
    if args.format == "csv":
        _emit_csv(centroids.centers, labels, args)
        return 0
    params = {"k": args.k, "s": args.s, "seed": args.seed,
              "max_samples": args.max_samples, "time_budget": args.time_budget,
              "max_iter": args.max_iter, "rel_tol": args.rel_tol,
              "n_candidates": args.n_candidates}
    wall = trace.events[-1][0] if trace.events else None
    _emit_json(_envelope(args, "bigmeans", X.shape[0], X.shape[1], params, result, wall), args)
    return 0


def _competitive_config(args, m) -> CompetitiveConfig:
    s_min, s_max = _sample_range(args, m)
    workers = _default_workers(args)
    stop = None
    if args.max_samples is not None or args.time_budget is not None:
        stop = StopCondition(args.max_samples, args.time_budget)
    return CompetitiveConfig(
        k=args.k,
        workers=workers,
        s_min=s_min,
        s_max=s_max,
        epochs=args.T,
        passes_per_epoch=args.p,
        stop=stop,
        lloyd=LloydConfig(args.max_iter, args.rel_tol),
        n_candidates=args.n_candidates,
        seed=args.seed,
    )


def _cmd_competitive(args) -> int:
    _validate_common(args)
    spec = _ingest_spec(args)
    X = as_points(load(spec))
    try:
        cfg = _competitive_config(args, X.shape[0])
        cfg.validate(X.shape[0])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = run_competitive(X, cfg, parallel=not args.sequential)
    result = {
        "objective": res.objective,
        "centroids": res.centroids.centers,
        "degenerate": res.centroids.degenerate,
        "labels": res.labels,
        "s_opt": res.s_opt,
        "s_opt_fallback": res.s_opt_fallback,
        "best_worker": res.best_worker,
        "per_worker_f_hat": res.per_worker_f_hat,
        # sorted: only the multiset is schedule-independent
        "improvement_log": sorted(res.log_entries),
        "traces": [_trace_doc(t, not args.no_timing) for t in res.traces],
        **_maybe_epsilon(res.objective, args),
    }
    if args.format == "csv":
        _emit_csv(res.centroids.centers, res.labels, args)
        return 0
    params = {"k": cfg.k, "s_min": cfg.s_min, "s_max": cfg.s_max,
              "p": cfg.passes_per_epoch, "T": cfg.epochs, "workers": cfg.workers,
              "seed": cfg.seed, "sequential": args.sequential,
              "max_samples": args.max_samples, "time_budget": args.time_budget,
              "max_iter": args.max_iter, "rel_tol": args.rel_tol,
              "n_candidates": args.n_candidates}
    wall = res.wall_time
    _emit_json(_envelope(args, "competitive", X.shape[0], X.shape[1], params, result, wall), args)
    return 0


def _bench_seed(master_seed, algo_idx, run_idx) -> int:
    ss = np.random.SeedSequence([int(master_seed), _BENCH_DOMAIN, algo_idx, run_idx])
    return int(ss.generate_state(1, np.uint32)[0])


def _cmd_bench(args) -> int:
    _validate_common(args)
    algos = [a.strip() for a in args.algo.split(",") if a.strip()]
    known = {"competitive", "bigmeans"}
    if not algos or any(a not in known for a in algos):
        raise UsageError(f"--algo must be a comma-separated subset of {sorted(known)}, got {args.algo!r}")
    _positive(int, "--n-exec", args.n_exec)
    spec = _ingest_spec(args)
    X = as_points(load(spec))
    m = X.shape[0]
    try:
        workers = _default_workers(args)
        s_min, s_max = _sample_range(args, m)
        budget = args.max_samples or workers * args.T * args.p
        lloyd_cfg = LloydConfig(args.max_iter, args.rel_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    runs = {a: [] for a in algos}  # per run: dict with objective/trace(s)
    for algo_idx, algo in enumerate(algos):
        for i in range(args.n_exec):
            if algo == "bigmeans":
                rng = derive_rng(args.seed, _BENCH_DOMAIN, algo_idx, i)
                stop = StopCondition(budget, args.time_budget)
                try:
                    _, _, trace = big_means(X, args.k, args.s, stop, lloyd_cfg,
                                            rng, args.n_candidates)
                except ValueError as exc:
                    raise UsageError(str(exc)) from None
                runs[algo].append({
                    "objective": trace.final_full_objective,
                    "final_sample_objective": trace.final_sample_objective,
                    "run_trace": trace,
                    "traces": [trace],
                })
            else:
                cfg = CompetitiveConfig(
                    k=args.k, workers=workers, s_min=s_min, s_max=s_max,
                    epochs=args.T, passes_per_epoch=args.p,
                    stop=StopCondition(None, args.time_budget) if args.time_budget else None,
                    lloyd=lloyd_cfg, n_candidates=args.n_candidates,
                    seed=_bench_seed(args.seed, algo_idx, i),
                )
                try:
                    cfg.validate(m)
                except ValueError as exc:
                    raise UsageError(str(exc)) from None
                res = run_competitive(X, cfg, parallel=not args.sequential)
                finals = [t.final_sample_objective for t in res.traces]
                best_trace = res.traces[int(np.argmin(finals))]
                runs[algo].append({
                    "objective": res.objective,
                    "final_sample_objective": min(finals),
                    "run_trace": best_trace,
                    "traces": res.traces,
                })
            log.info("bench %s run %d/%d done", algo, i + 1, args.n_exec)

    fbar = compute_baseline({a: [r["run_trace"] for r in runs[a]] for a in algos},
                            args.n_exec)
    objectives = {a: [r["objective"] for r in runs[a]] for a in algos}
    succ = success_counts(objectives, args.succ_tol)
    stats = []
    for algo in algos:
        t_bar = [multi_worker_baseline_time(r["traces"], fbar) for r in runs[algo]]
        eps = None
        if args.f_star is not None:
            eps = [relative_accuracy(o, args.f_star) for o in objectives[algo]]
        stats.append(AlgoStats(
            name=algo,
            objectives=objectives[algo],
            final_sample_objectives=[r["final_sample_objective"] for r in runs[algo]],
            t_bar=t_bar,
            eps=eps,
            succ=succ[algo],
        ))
    report = BenchReport(dataset=args.input, k=args.k, n_exec=args.n_exec,
                         baseline=fbar, algos=stats, f_star=args.f_star)
    result = report.to_dict()
    if args.no_timing:
        for a in result["algorithms"]:
            a.pop("baseline_time", None)
    else:
        result["traces"] = {
            a: [[_trace_doc(t, True) for t in r["traces"]] for r in runs[a]]
            for a in algos
        }
    params = {"algo": algos, "k": args.k, "s": args.s, "s_min": s_min,
              "s_max": s_max, "p": args.p, "T": args.T, "workers": workers,
              "n_exec": args.n_exec, "seed": args.seed,
              "max_samples": budget, "time_budget": args.time_budget,
              "succ_tol": args.succ_tol, "f_star": args.f_star}
    print(report.table(), file=sys.stderr)
    _emit_json(_envelope(args, "bench", m, X.shape[1], params, result, None), args)
    return 0


def _cmd_synth(args) -> int:
    for name in ("m", "n", "k"):
        _positive(int, f"--{name}", getattr(args, name))
    if args.m < args.k:
        raise UsageError(f"--m must be at least --k, got m={args.m}, k={args.k}")
    if args.spread < 0:
        raise UsageError(f"--spread must be non-negative, got {args.spread}")
    if args.seed < 0:
        raise UsageError(f"--seed must be non-negative, got {args.seed}")
    points, centers = synth_blobs(args.m, args.n, args.k, args.spread, args.seed)
    np.savetxt(args.output, points, delimiter=",", fmt="%.17g")
    if args.centers_out:
        np.savetxt(args.centers_out, centers.centers, delimiter=",", fmt="%.17g")
    log.info("wrote %d x %d points to %s", args.m, args.n, args.output)
    return 0


_HANDLERS = {
    "kmeans": _cmd_kmeans,
    "bigmeans": _cmd_bigmeans,
    "competitive": _cmd_competitive,
    "bench": _cmd_bench,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, IngestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # unexpected runtime failure
        log.exception("unhandled error")
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
