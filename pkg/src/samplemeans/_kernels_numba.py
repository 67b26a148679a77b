"""Numba-compiled hot kernels (default backend, see backend.py).

Mirrors _kernels_numpy function for function. The kernels are sequential on
purpose: parallelism lives at the worker level (competitive.py), nogil lets
worker threads overlap, and sequential accumulation keeps results bit-stable
for a given backend.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def assign_labels(X, C):
    m, n = X.shape
    k = C.shape[0]
    labels = np.empty(m, np.int64)
    dists = np.empty(m, np.float64)
    for i in range(m):
        best = 0
        best_d = np.inf
        for j in range(k):
            d = 0.0
            for t in range(n):
                diff = X[i, t] - C[j, t]
                d += diff * diff
            if d < best_d:  # strict: ties keep the lowest index
                best_d = d
                best = j
        labels[i] = best
        dists[i] = best_d
    return labels, dists


@njit(cache=True, nogil=True)
def label_sums(X, labels, k):
    m, n = X.shape
    sums = np.zeros((k, n), np.float64)
    counts = np.zeros(k, np.int64)
    for i in range(m):
        j = labels[i]
        counts[j] += 1
        for t in range(n):
            sums[j, t] += X[i, t]
    return sums, counts


@njit(cache=True, nogil=True)
def sqdist_to_point(X, y):
    m, n = X.shape
    out = np.empty(m, np.float64)
    for i in range(m):
        d = 0.0
        for t in range(n):
            diff = X[i, t] - y[t]
            d += diff * diff
        out[i] = d
    return out
