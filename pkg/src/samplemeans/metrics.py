"""Evaluation quantities: relative accuracy, baseline time, run summaries.

relative_accuracy is the percentage gap to a reference objective f_star and
may be negative when a run beats the reference. baseline_time is the
earliest wall-clock moment a run's best sample objective reached a baseline
value; the baseline itself (compute_baseline) is the worst algorithm's
median final best sample objective, so every compared algorithm is timed
against an accuracy level all of them can reach.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(eq=False)
class RunTrace:
    """Timestamped trajectory of the best sample objective within one run.

    events holds (elapsed_seconds, best_sample_objective) pairs with elapsed
    measured from run start. segment_starts marks event indices where a new
    epoch began: the value may jump upward there (recalibration on a fresh
    sample), while within one segment it is non-increasing.
    """

    events: list[tuple[float, float]] = field(default_factory=list)
    segment_starts: list[int] = field(default_factory=list)
    final_full_objective: float | None = None

    def record(self, elapsed: float, value: float):
        self.events.append((float(elapsed), float(value)))

    def mark_segment(self):
        self.segment_starts.append(len(self.events))

    @property
    def final_sample_objective(self) -> float:
        if not self.events:
            raise ValueError("trace has no events")
        return self.events[-1][1]

    def values(self) -> list[float]:
        return [v for _, v in self.events]


def relative_accuracy(f: float, f_star: float) -> float:
    """Percentage gap 100*(f - f_star)/f_star; negative when f beats f_star."""
    if f_star <= 0:
        raise ValueError(f"f_star must be positive, got {f_star}")
    return 100.0 * (f - f_star) / f_star


def baseline_time(trace: RunTrace, f_baseline: float) -> float | None:
    """Earliest elapsed time at which the trace reached f_baseline, if ever."""
    if not trace.events:
        raise ValueError("trace has no events")
    for elapsed, value in trace.events:
        if value <= f_baseline:
            return elapsed
    return None


def multi_worker_baseline_time(traces, f_baseline: float) -> float | None:
    """Fastest worker's baseline time across a run's per-worker traces."""
    times = [t for t in (baseline_time(tr, f_baseline) for tr in traces) if t is not None]
    return min(times) if times else None


def compute_baseline(traces_per_algo, n_exec: int) -> float:
    """Baseline sample objective: max over algorithms of the median (over
    n_exec runs) of the run-final best sample objective."""
    if not traces_per_algo:
        raise ValueError("need at least one algorithm")
    medians = []
    for name, traces in traces_per_algo.items():
        if len(traces) != n_exec:
            raise ValueError(f"algorithm {name!r} has {len(traces)} traces, expected {n_exec}")
        finals = [tr.final_sample_objective for tr in traces]
        medians.append(float(np.median(finals)))
    return max(medians)


def summarize(values) -> tuple[float, float, float]:
    """(min, median, max); an even count medians as the mean of the middle two."""
    vals = np.asarray(list(values), dtype=np.float64)
    if vals.size == 0:
        raise ValueError("cannot summarize an empty sequence")
    return float(vals.min()), float(np.median(vals)), float(vals.max())


def success_counts(objectives_per_algo, rel_tol: float = 1e-9) -> dict[str, int]:
    """Per-algorithm count of runs matching the best result for that run.

    Run i is compared across algorithms; algorithm a succeeds on run i when
    its objective is within rel_tol (relative) of the minimum over all
    algorithms for run i.
    """
    names = list(objectives_per_algo)
    if not names:
        return {}
    lengths = {len(objectives_per_algo[a]) for a in names}
    if len(lengths) != 1:
        raise ValueError("all algorithms must have the same number of runs")
    counts = dict.fromkeys(names, 0)
    for i in range(lengths.pop()):
        best = min(objectives_per_algo[a][i] for a in names)
        for a in names:
            if objectives_per_algo[a][i] <= best * (1.0 + rel_tol):
                counts[a] += 1
    return counts


@dataclass(eq=False)
class AlgoStats:
    """Per-algorithm benchmark numbers over n_exec runs."""

    name: str
    objectives: list[float]
    final_sample_objectives: list[float]
    t_bar: list[float | None]
    eps: list[float] | None = None
    succ: int = 0

    def to_dict(self) -> dict:
        reached = [t for t in self.t_bar if t is not None]
        d = {
            "name": self.name,
            "succ": self.succ,
            "objective": {"values": self.objectives,
                          "summary": summarize(self.objectives)},
            "final_sample_objective": {"values": self.final_sample_objectives,
                                       "summary": summarize(self.final_sample_objectives)},
            "baseline_time": {"values": self.t_bar,
                              "n_reached": len(reached),
                              "summary": summarize(reached) if reached else None},
        }
        if self.eps is not None:
            d["epsilon"] = {"values": self.eps, "summary": summarize(self.eps)}
        return d


@dataclass(eq=False)
class BenchReport:
    """Aggregated benchmark results for one (dataset, k) pair."""

    dataset: str
    k: int
    n_exec: int
    baseline: float
    algos: list[AlgoStats]
    f_star: float | None = None

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "k": self.k,
            "n_exec": self.n_exec,
            "f_star": self.f_star,
            "baseline_sample_objective": self.baseline,
            "algorithms": [a.to_dict() for a in self.algos],
        }

    def table(self) -> str:
        """Human-readable summary with #Succ / Min / Median / Max columns."""

        def fmt(x):
            return "-" if x is None else f"{x:.4g}"

        lines = [
            f"dataset={self.dataset} k={self.k} n_exec={self.n_exec} "
            f"baseline={self.baseline:.6g}"
            + (f" f*={self.f_star:.6g}" if self.f_star is not None else ""),
            f"{'algorithm':<14}{'#Succ':>8} | {'eps Min':>10}{'Median':>10}{'Max':>10}"
            f" | {'t Min':>8}{'Median':>8}{'Max':>8}",
        ]
        for a in self.algos:
            if a.eps is not None:
                emin, emed, emax = summarize(a.eps)
                eps_cells = f"{emin:>10.2f}{emed:>10.2f}{emax:>10.2f}"
            else:
                eps_cells = f"{'-':>10}{'-':>10}{'-':>10}"
            reached = [t for t in a.t_bar if t is not None]
            if reached:
                tmin, tmed, tmax = summarize(reached)
                t_cells = f"{tmin:>8.2f}{tmed:>8.2f}{tmax:>8.2f}"
            else:
                t_cells = f"{'-':>8}{'-':>8}{'-':>8}"
            lines.append(
                f"{a.name:<14}{a.succ:>5}/{self.n_exec:<2} | {eps_cells} | {t_cells}"
            )
        return "\n".join(lines)
