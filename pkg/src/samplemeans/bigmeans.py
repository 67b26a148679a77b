"""Sequential Big-means: iterated K-means on uniform random samples.

Every step draws a fresh uniform sample without replacement (the shaking
move), reseeds any degenerate centroids of the incumbent with K-means++ on
that sample, runs Lloyd, and adopts the result as the new incumbent when
its sample objective beats the best sample objective seen so far. The
comparison is across samples: each side of it was measured on the sample
that produced it.

Parameters follow the usual Big-means conventions:
    s             points drawn per sample, k <= s <= m
    k             number of clusters
    stop          sample-count and/or wall-clock budget
    lloyd_cfg     per-sample iteration cap and relative tolerance
    n_candidates  K-means++ candidates per new center
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import backend
from .core import CentroidSet, as_points
from .kmeans import (
    DEFAULT_N_CANDIDATES,
    LloydConfig,
    kmeanspp_init,
    kmeanspp_reseed,
    lloyd,
)
from .metrics import RunTrace


@dataclass
class StopCondition:
    """Run budget: a sample count, a wall-clock limit in seconds, or both."""

    max_samples: int | None = None
    time_budget: float | None = None

    def __post_init__(self):
        if self.max_samples is None and self.time_budget is None:
            raise ValueError("set max_samples, time_budget, or both")
        if self.max_samples is not None and self.max_samples < 1:
            raise ValueError(f"max_samples must be at least 1, got {self.max_samples}")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError(f"time_budget must be positive, got {self.time_budget}")


@dataclass(eq=False)
class Incumbent:
    """Best centroid set found so far and its sample objective f_hat."""

    centroids: CentroidSet | None = None
    f_hat: float = math.inf

    @property
    def initialized(self) -> bool:
        return self.centroids is not None


def sample_rows(X, s, rng) -> np.ndarray:
    """Uniform sample of s distinct rows of X, in ascending row order.

    The canonical order makes a full-size draw (s = m) reproduce X row for
    row, so objectives on such a "sample" match the full data exactly.
    """
    m = X.shape[0]
    if not 1 <= s <= m:
        raise ValueError(f"sample size must be in [1, {m}], got {s}")
    idx = np.sort(rng.choice(m, size=s, replace=False))
    return X[idx]


def big_means_step(X, inc: Incumbent, s, k, lloyd_cfg, rng,
                   n_candidates=DEFAULT_N_CANDIDATES):
    """One Big-means pass: sample, reseed degenerates, K-means, compare.

    Returns (incumbent, improved, sample_objective). The incumbent object is
    replaced, not mutated, when the new sample objective beats inc.f_hat.
    """
    sample = sample_rows(X, s, rng)
    if not inc.initialized:
        C0 = kmeanspp_init(sample, k, rng, n_candidates)
    elif inc.centroids.degenerate.any():
        C0 = kmeanspp_reseed(sample, inc.centroids, rng, n_candidates)
    else:
        C0 = inc.centroids
    res = lloyd(sample, C0, lloyd_cfg)
    improved = res.objective < inc.f_hat
    if improved:
        inc = Incumbent(res.centroids, res.objective)
    return inc, improved, res.objective


def big_means(X, k, s, stop: StopCondition, lloyd_cfg: LloydConfig | None = None,
              rng=None, n_candidates=DEFAULT_N_CANDIDATES):
    """Run Big-means until the stop condition and assign the full data.

    Returns (centroids, labels, trace). trace records (elapsed, f_hat) after
    every step and carries the final full-data objective.
    """
    pts = as_points(X)
    m = pts.shape[0]
    if not 1 <= k <= s <= m:
        raise ValueError(f"need 1 <= k <= s <= m, got k={k}, s={s}, m={m}")
    lloyd_cfg = lloyd_cfg or LloydConfig()
    rng = rng if rng is not None else np.random.default_rng()
    t0 = time.perf_counter()
    inc = Incumbent()
    trace = RunTrace()
    steps = 0
    elapsed = 0.0  # time budget is checked after each step, so the first
    while True:    # step always runs and an incumbent always exists
        if stop.max_samples is not None and steps >= stop.max_samples:
            break
        if stop.time_budget is not None and elapsed >= stop.time_budget:
            break
        inc, _, _ = big_means_step(pts, inc, s, k, lloyd_cfg, rng, n_candidates)
        steps += 1
        elapsed = time.perf_counter() - t0
        trace.record(elapsed, inc.f_hat)
    labels, dists = backend.assign_labels(pts, inc.centroids.centers)
    trace.final_full_objective = float(np.sum(dists))
    return inc.centroids, labels, trace
