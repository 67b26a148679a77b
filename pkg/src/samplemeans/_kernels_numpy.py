"""Pure numpy implementations of the hot kernels.

Reference backend: no compilation step, slower than the numba twins in
_kernels_numba. Selected via SAMPLEMEANS_BACKEND=numpy (see backend.py).
"""

import numpy as np

# Cap on the number of float64 elements in the (rows, k, n) difference
# temporary built per block of assign_labels.
_BLOCK_ELEMENTS = 4 << 20


def assign_labels(X, C):
    # Nearest-centroid index and squared distance per row. Ties go to the
    # lowest centroid index (np.argmin keeps the first minimum).
    m, n = X.shape
    k = C.shape[0]
    labels = np.empty(m, dtype=np.int64)
    dists = np.empty(m, dtype=np.float64)
    block = max(16, _BLOCK_ELEMENTS // max(1, k * n))
    for start in range(0, m, block):
        stop = min(start + block, m)
        diff = X[start:stop, None, :] - C[None, :, :]
        d = np.einsum("ijk,ijk->ij", diff, diff)
        idx = np.argmin(d, axis=1)
        labels[start:stop] = idx
        dists[start:stop] = d[np.arange(stop - start), idx]
    return labels, dists


def label_sums(X, labels, k):
    # Per-cluster coordinate sums and member counts. bincount accumulates
    # in row order, matching the numba kernel bit for bit.
    n = X.shape[1]
    sums = np.empty((k, n), dtype=np.float64)
    for j in range(n):
        sums[:, j] = np.bincount(labels, weights=X[:, j], minlength=k)
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    return sums, counts


def sqdist_to_point(X, y):
    diff = X - y
    return np.einsum("ij,ij->i", diff, diff)
