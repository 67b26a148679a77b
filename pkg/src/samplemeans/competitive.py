"""Competitive parallel Big-means with stochastic sample size optimization.

W workers run Big-means epochs concurrently. At the start of each epoch a
worker draws a fresh sample size uniformly from [s_min, s_max], re-measures
its incumbent on a fresh sample of that size, then performs p Big-means
passes at that size; every pass that improves the worker's best sample
objective appends the size to a shared improvement log. When all workers
have finished their epochs, the estimated best sample size s_opt is the
simple mean of the log (the expected improving sample size, range midpoint
if the log is empty), every worker is re-scored on one shared sample of
size s_opt, and the best worker's centroids are returned together with the
full-data assignment.

Workers share nothing except the append-only log, and all random draws a
worker makes in epoch t come from a stream derived from (seed, worker, t),
so scheduling cannot change what any worker computes: parallel and
sequential execution give identical results under an epoch-count stop. The
log is order-insensitive (only its multiset matters).
"""

from __future__ import annotations

import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .bigmeans import Incumbent, StopCondition, big_means_step, sample_rows
from .core import CentroidSet, as_points, evaluate_objective
from .kmeans import DEFAULT_N_CANDIDATES, LloydConfig
from .metrics import RunTrace

log = logging.getLogger(__name__)

# Stream domains under one master seed; keeps worker draws disjoint from the
# shared final-evaluation sample.
_WORKER_DOMAIN = 1
_SHARED_DOMAIN = 2


def derive_rng(seed, *path) -> np.random.Generator:
    """Independent generator for one labeled stream under a master seed."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, path)]))


def worker_rng(seed, worker_id, epoch) -> np.random.Generator:
    """Stream used by one worker for one epoch: all of the epoch's draws."""
    return derive_rng(seed, _WORKER_DOMAIN, worker_id, epoch)


def shared_rng(seed) -> np.random.Generator:
    """Stream for the shared final-evaluation sample."""
    return derive_rng(seed, _SHARED_DOMAIN)


@dataclass(eq=False)
class CompetitiveConfig:
    k: int
    workers: int
    s_min: int
    s_max: int
    epochs: int
    passes_per_epoch: int = 10
    stop: StopCondition | None = None
    lloyd: LloydConfig = field(default_factory=LloydConfig)
    n_candidates: int = DEFAULT_N_CANDIDATES
    seed: int = 0

    def validate(self, m: int):
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be at least 1, got {self.epochs}")
        if self.passes_per_epoch < 1:
            raise ValueError(f"passes_per_epoch must be at least 1, got {self.passes_per_epoch}")
        if not 1 <= self.s_min <= self.s_max <= m:
            raise ValueError(
                f"need 1 <= s_min <= s_max <= m, got s_min={self.s_min}, "
                f"s_max={self.s_max}, m={m}"
            )
        if self.s_min < self.k:
            raise ValueError(
                f"s_min={self.s_min} is smaller than k={self.k}; samples must "
                f"hold at least k points for K-means++ initialization"
            )
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


class ImprovementLog:
    """Thread-safe append-only multiset of improving sample sizes."""

    def __init__(self):
        self._entries = []
        self._lock = threading.Lock()

    def append(self, s: int):
        with self._lock:
            self._entries.append(int(s))

    def entries(self) -> tuple[int, ...]:
        with self._lock:
            return tuple(self._entries)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


@dataclass(eq=False)
class WorkerState:
    """One competitive worker: incumbent, current sample size, counters."""

    id: int
    incumbent: Incumbent = field(default_factory=Incumbent)
    s_w: int = 0
    t_w: int = 0
    p_w: int = 0
    total_passes: int = 0
    trace: RunTrace = field(default_factory=RunTrace)

    @property
    def centroids(self) -> CentroidSet | None:
        return self.incumbent.centroids

    @property
    def f_hat(self) -> float:
        return self.incumbent.f_hat


@dataclass(eq=False)
class CompetitiveResult:
    centroids: CentroidSet
    labels: np.ndarray
    s_opt: int
    objective: float
    best_worker: int
    per_worker_f_hat: np.ndarray
    log_entries: tuple[int, ...]
    s_opt_fallback: bool
    traces: list[RunTrace]
    workers: list[WorkerState]
    wall_time: float


def draw_sample_size(rng, s_min: int, s_max: int) -> int:
    """Uniform integer in [s_min, s_max], both endpoints inclusive."""
    if s_min > s_max:
        raise ValueError(f"s_min={s_min} exceeds s_max={s_max}")
    return int(rng.integers(s_min, s_max + 1))


def recalibrate(worker: WorkerState, new_s: int, X, rng) -> WorkerState:
    """Re-measure the worker's incumbent on a fresh sample of size new_s.

    A worker without an incumbent (f_hat infinite) only records the new
    sample size; no sample is drawn for it.
    """
    if new_s > X.shape[0]:
        raise ValueError(f"sample size {new_s} exceeds m={X.shape[0]}")
    worker.s_w = int(new_s)
    if worker.incumbent.initialized:
        sample = sample_rows(X, new_s, rng)
        f = evaluate_objective(worker.incumbent.centroids, sample)
        worker.incumbent = Incumbent(worker.incumbent.centroids, f)
    return worker


def run_worker_epoch(worker: WorkerState, X, cfg: CompetitiveConfig,
                     improvement_log: ImprovementLog, t0: float | None = None,
                     deadline: float | None = None,
                     max_passes: int | None = None) -> WorkerState:
    """One epoch: size draw, recalibration, then p passes at that size.

    Budgets (deadline, max_passes) are checked between passes; a worker's
    first-ever pass is exempt so every worker ends up with an incumbent.
    """
    if t0 is None:
        t0 = time.perf_counter()
    rng = worker_rng(cfg.seed, worker.id, worker.t_w)
    s_w = draw_sample_size(rng, cfg.s_min, cfg.s_max)
    recalibrate(worker, s_w, X, rng)
    worker.trace.mark_segment()
    if worker.incumbent.initialized:
        worker.trace.record(time.perf_counter() - t0, worker.f_hat)
    worker.p_w = 0
    while worker.p_w < cfg.passes_per_epoch:
        # the first-ever pass is exempt: every worker must gain an incumbent
        if worker.total_passes > 0:
            if deadline is not None and time.perf_counter() >= deadline:
                break
            if max_passes is not None and worker.total_passes >= max_passes:
                break
        inc, improved, _ = big_means_step(
            X, worker.incumbent, s_w, cfg.k, cfg.lloyd, rng, cfg.n_candidates
        )
        worker.incumbent = inc
        if improved:
            improvement_log.append(s_w)
        worker.p_w += 1
        worker.total_passes += 1
        worker.trace.record(time.perf_counter() - t0, worker.f_hat)
    worker.t_w += 1
    worker.p_w = 0
    log.debug("worker %d epoch %d done: s_w=%d f_hat=%.6g",
              worker.id, worker.t_w, s_w, worker.f_hat)
    return worker


def select_s_opt(improvement_log: ImprovementLog, cfg: CompetitiveConfig) -> int:
    """Simple mean of the improving sample sizes, rounded half-up and
    clamped to [s_min, s_max]; range midpoint (with a warning) when the log
    is empty."""
    entries = improvement_log.entries()
    if entries:
        raw = sum(entries) / len(entries)
    else:
        log.warning("improvement log is empty, falling back to the range midpoint")
        raw = (cfg.s_min + cfg.s_max) / 2
    rounded = int(math.floor(raw + 0.5))
    return int(min(max(rounded, cfg.s_min), cfg.s_max))


def final_evaluation(workers, s_opt: int, X, rng):
    """Score every worker on one shared sample of size s_opt.

    Returns (best_id, per_worker_f_hat); ties go to the lowest worker id.
    Worker f_hat values are updated in place, matching the recalibration
    the run ends with.
    """
    m = X.shape[0]
    s = min(int(s_opt), m)
    sample = sample_rows(X, s, rng)
    per_worker = np.full(len(workers), np.inf)
    for w in workers:
        if w.incumbent.initialized:
            f = evaluate_objective(w.incumbent.centroids, sample)
            w.incumbent = Incumbent(w.incumbent.centroids, f)
            per_worker[w.id] = f
    return int(np.argmin(per_worker)), per_worker


def run_competitive(X, cfg: CompetitiveConfig, parallel: bool = True) -> CompetitiveResult:
    """Run the full competitive algorithm and assign the full data.

    parallel=False runs the workers one by one on the calling thread and
    produces identical output under an epoch-count stop (sample-count stops
    included); only wall-clock budgets make the two modes diverge.
    """
    pts = as_points(X)
    cfg.validate(pts.shape[0])
    t0 = time.perf_counter()
    deadline = None
    max_passes = None
    if cfg.stop is not None:
        if cfg.stop.time_budget is not None:
            deadline = t0 + cfg.stop.time_budget
        max_passes = cfg.stop.max_samples
    improvement_log = ImprovementLog()
    workers = [WorkerState(id=w) for w in range(cfg.workers)]

    def drive(worker: WorkerState) -> WorkerState:
        for _ in range(cfg.epochs):
            if worker.total_passes > 0:
                if deadline is not None and time.perf_counter() >= deadline:
                    break
                if max_passes is not None and worker.total_passes >= max_passes:
                    break
            run_worker_epoch(worker, pts, cfg, improvement_log, t0, deadline, max_passes)
        return worker

    if parallel and cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            list(pool.map(drive, workers))
    else:
        for worker in workers:
            drive(worker)

    if not any(w.incumbent.initialized for w in workers):
        raise RuntimeError("stop condition expired before any worker completed a pass")
    entries = improvement_log.entries()
    s_opt = select_s_opt(improvement_log, cfg)
    best_id, per_worker_f_hat = final_evaluation(workers, s_opt, pts, shared_rng(cfg.seed))
    best = workers[best_id]
    labels, dists = backend.assign_labels(pts, best.incumbent.centroids.centers)
    return CompetitiveResult(
        centroids=best.incumbent.centroids,
        labels=labels,
        s_opt=s_opt,
        objective=float(np.sum(dists)),
        best_worker=best_id,
        per_worker_f_hat=per_worker_f_hat,
        log_entries=entries,
        s_opt_fallback=not entries,
        traces=[w.trace for w in workers],
        workers=workers,
        wall_time=time.perf_counter() - t0,
    )
