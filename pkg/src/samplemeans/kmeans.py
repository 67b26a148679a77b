"""Lloyd iterations and greedy K-means++ seeding.

K-means++ draws each new center from the data with probability proportional
to D^2, the squared distance to the nearest already chosen center. With
n_candidates > 1 it draws that many candidates per step and keeps the one
whose adoption gives the lowest total D^2 over the data (the greedy
variant). The first center is a uniform draw.

Lloyd alternates assignment and mean-update steps. A cluster that receives
no points keeps its previous center and is flagged degenerate in the result;
reseeding degenerate centers is the caller's responsibility (see bigmeans).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .core import CentroidSet, as_points, _check_dims

log = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 300
DEFAULT_REL_TOL = 1e-4
DEFAULT_N_CANDIDATES = 3

# Guard for the relative-change convergence test when the objective hits 0.
_TINY = np.finfo(np.float64).tiny


@dataclass
class LloydConfig:
    max_iter: int = DEFAULT_MAX_ITER
    rel_tol: float = DEFAULT_REL_TOL

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.rel_tol < 0:
            raise ValueError(f"rel_tol must be non-negative, got {self.rel_tol}")


@dataclass(eq=False)
class LloydResult:
    centroids: CentroidSet
    objective: float
    iterations: int
    labels: np.ndarray
    # objective under the initial centroids followed by the objective after
    # each completed iteration; non-increasing
    objective_trace: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))


def _d2_candidate_draw(X, d2, pot, n_candidates, rng):
    """Draw candidate rows with probability d2/pot, keep the greedy best.

    Returns the chosen row index and the updated D^2 array after adopting
    that row as a center. Candidate ties keep the earliest drawn candidate.
    """
    r = rng.random(n_candidates) * pot
    cand = np.searchsorted(np.cumsum(d2), r)
    np.clip(cand, None, len(d2) - 1, out=cand)
    best_idx = -1
    best_pot = np.inf
    best_d2 = None
    for c in cand:
        nd = np.minimum(d2, backend.sqdist_to_point(X, X[c]))
        p = float(np.sum(nd))
        if p < best_pot:
            best_pot = p
            best_idx = int(c)
            best_d2 = nd
    return best_idx, best_d2


def kmeanspp_init(X, k, rng, n_candidates=DEFAULT_N_CANDIDATES) -> CentroidSet:
    """Greedy K-means++ initialization with k centers drawn from X.

    When X holds fewer than k distinct points the remaining centers are
    uniform duplicates flagged degenerate, so the result is always total.
    """
    pts = as_points(X)
    m = pts.shape[0]
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if k > m:
        raise ValueError(f"k={k} exceeds the number of points m={m}")
    if n_candidates < 1:
        raise ValueError(f"n_candidates must be at least 1, got {n_candidates}")
    centers = np.empty((k, pts.shape[1]), dtype=np.float64)
    degenerate = np.zeros(k, dtype=bool)
    first = int(rng.integers(m))
    centers[0] = pts[first]
    d2 = backend.sqdist_to_point(pts, centers[0])
    for j in range(1, k):
        pot = float(np.sum(d2))
        if pot <= 0.0:
            # every point already coincides with a chosen center
            centers[j] = pts[int(rng.integers(m))]
            degenerate[j] = True
            continue
        idx, d2 = _d2_candidate_draw(pts, d2, pot, n_candidates, rng)
        centers[j] = pts[idx]
    return CentroidSet(centers, degenerate)


def kmeanspp_reseed(X, C: CentroidSet, rng, n_candidates=DEFAULT_N_CANDIDATES) -> CentroidSet:
    """Replace the degenerate centers of C with K-means++ draws from X.

    Non-degenerate centers are kept verbatim and, together with centers
    already replaced, define the D^2 weights; stale degenerate positions do
    not suppress reseeding near them. All flags are cleared in the result.
    If X cannot supply enough distinct points, the remainder are uniform
    draws (duplicates allowed) and a warning is logged.
    """
    pts = as_points(X)
    _check_dims(C, pts)
    if not C.degenerate.any():
        raise ValueError("no degenerate centroids to reseed")
    m = pts.shape[0]
    centers = C.centers.copy()
    d2 = None
    for j in np.flatnonzero(~C.degenerate):
        dj = backend.sqdist_to_point(pts, centers[j])
        d2 = dj if d2 is None else np.minimum(d2, dj)
    for j in np.flatnonzero(C.degenerate):
        if d2 is None:
            idx = int(rng.integers(m))
            centers[j] = pts[idx]
            d2 = backend.sqdist_to_point(pts, centers[j])
            continue
        pot = float(np.sum(d2))
        if pot <= 0.0:
            idx = int(rng.integers(m))
            centers[j] = pts[idx]
            log.warning("reseed ran out of distinct points, duplicating a uniform draw")
            continue
        idx, d2 = _d2_candidate_draw(pts, d2, pot, n_candidates, rng)
        centers[j] = pts[idx]
    return CentroidSet(centers)


def lloyd(X, C0: CentroidSet, cfg: LloydConfig | None = None) -> LloydResult:
    """Run Lloyd's algorithm from the given initial centroids.

    Stops at max_iter iterations, when the relative objective improvement
    falls below rel_tol (an objective of exactly 0 counts as converged), or
    at an exact fixed point (assignment unchanged; this is what terminates
    runs with rel_tol=0). Empty clusters keep their previous center and are
    never reseeded here. The per-iteration objective sequence is
    non-increasing.
    """
    cfg = cfg or LloydConfig()
    pts = as_points(X)
    _check_dims(C0, pts)
    k = C0.k
    centers = C0.centers.copy()
    labels, dists = backend.assign_labels(pts, centers)
    f = float(np.sum(dists))
    trace = [f]
    iterations = 0
    while iterations < cfg.max_iter:
        sums, counts = backend.label_sums(pts, labels, k)
        occupied = counts > 0
        new_centers = centers.copy()
        new_centers[occupied] = sums[occupied] / counts[occupied, None]
        new_labels, dists = backend.assign_labels(pts, new_centers)
        f_new = float(np.sum(dists))
        iterations += 1
        trace.append(f_new)
        fixed_point = bool(np.array_equal(new_labels, labels))
        centers = new_centers
        labels = new_labels
        converged = (
            f_new == 0.0
            or (f - f_new) / max(f_new, _TINY) < cfg.rel_tol
            or fixed_point
        )
        f = f_new
        if converged:
            break
    final_counts = np.bincount(labels, minlength=k)
    result_centroids = CentroidSet(centers, final_counts == 0)
    return LloydResult(result_centroids, f, iterations, labels, np.asarray(trace))


def fit_kmeans(X, k, rng, cfg: LloydConfig | None = None,
               n_candidates=DEFAULT_N_CANDIDATES, restarts=1) -> LloydResult:
    """K-means++ initialization followed by Lloyd, best of `restarts` runs."""
    if restarts < 1:
        raise ValueError(f"restarts must be at least 1, got {restarts}")
    pts = as_points(X)
    best = None
    for _ in range(restarts):
        C0 = kmeanspp_init(pts, k, rng, n_candidates)
        res = lloyd(pts, C0, cfg)
        if best is None or res.objective < best.objective:
            best = res
    return best
