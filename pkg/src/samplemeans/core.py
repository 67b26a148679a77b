"""Point storage, distance primitives, and the clustering objective.

The objective of a centroid set C on a point set X is the sum over all
points of the squared euclidean distance to the nearest centroid. Per-point
distances come from the active kernel backend and are accumulated with
numpy's pairwise float64 summation; summation order is implementation
defined, so cross-run comparisons should use a relative tolerance of 1e-9.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend


def as_points(X) -> np.ndarray:
    """Coerce a point set to a C-contiguous float64 array of shape (m, n)."""
    pts = np.ascontiguousarray(X, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError(f"points must form a 2-D array, got shape {pts.shape}")
    if pts.shape[0] < 1 or pts.shape[1] < 1:
        raise ValueError(f"point set must be non-empty, got shape {pts.shape}")
    return pts


@dataclass(eq=False)
class CentroidSet:
    """k x n centroid coordinates plus per-centroid degeneracy flags.

    A degenerate centroid is one that no point was assigned to in the
    assignment step that produced it. It keeps its last valid coordinates
    and stays eligible for nearest-centroid queries; reseeding happens
    lazily, at the next sampling step.
    """

    centers: np.ndarray
    degenerate: np.ndarray | None = None

    def __post_init__(self):
        self.centers = np.ascontiguousarray(self.centers, dtype=np.float64)
        if self.centers.ndim != 2 or self.centers.shape[0] < 1:
            raise ValueError(f"centers must be a non-empty 2-D array, got shape {self.centers.shape}")
        if not np.isfinite(self.centers).all():
            raise ValueError("centers must be finite")
        if self.degenerate is None:
            self.degenerate = np.zeros(self.centers.shape[0], dtype=bool)
        else:
            self.degenerate = np.asarray(self.degenerate, dtype=bool).copy()
            if self.degenerate.shape != (self.centers.shape[0],):
                raise ValueError("degenerate flags must have one entry per centroid")

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @property
    def n(self) -> int:
        return self.centers.shape[1]

    def copy(self) -> "CentroidSet":
        return CentroidSet(self.centers.copy(), self.degenerate.copy())


def _check_dims(C: CentroidSet, X: np.ndarray):
    if C.n != X.shape[1]:
        raise ValueError(f"dimension mismatch: centroids have n={C.n}, points have n={X.shape[1]}")


def squared_euclidean(x, y) -> float:
    """Squared euclidean distance between two equal-dimension vectors."""
    a = np.asarray(x, dtype=np.float64).ravel()
    b = np.asarray(y, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    d = a - b
    return float(np.dot(d, d))


def nearest_centroid(x, C: CentroidSet) -> tuple[int, float]:
    """Index of the closest centroid and the squared distance to it.

    Ties break to the lowest index. Degenerate centroids are eligible.
    """
    pt = np.ascontiguousarray(x, dtype=np.float64).reshape(1, -1)
    _check_dims(C, pt)
    labels, dists = backend.assign_labels(pt, C.centers)
    return int(labels[0]), float(dists[0])


def evaluate_objective(C: CentroidSet, X) -> float:
    """Sum of squared distances from every point to its nearest centroid."""
    pts = as_points(X)
    _check_dims(C, pts)
    _, dists = backend.assign_labels(pts, C.centers)
    return float(np.sum(dists))


def assign_all(X, C: CentroidSet) -> np.ndarray:
    """Nearest-centroid label for every point, ties to the lowest index."""
    pts = as_points(X)
    _check_dims(C, pts)
    labels, _ = backend.assign_labels(pts, C.centers)
    return labels
