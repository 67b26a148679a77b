"""Delimited-text ingestion and synthetic blob generation.

load() reads CSV/TSV-style numeric files (gzip accepted by extension) into
a float64 matrix, rejecting non-numeric and non-finite values with row and
column diagnostics. Optional min-max normalization maps each feature onto
[0, 1], with constant features mapped to 0.
"""

from __future__ import annotations

import csv
import gzip
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .core import CentroidSet


class IngestError(ValueError):
    """Parse or validation failure, annotated with file position."""


@dataclass
class IngestSpec:
    path: str
    delimiter: str = ","
    skip_header: bool = False
    columns: tuple[int, ...] | None = None
    normalize: bool = False

    def __post_init__(self):
        if len(self.delimiter) != 1:
            raise ValueError(f"delimiter must be a single character, got {self.delimiter!r}")
        if self.columns is not None:
            self.columns = tuple(int(c) for c in self.columns)
            if any(c < 0 for c in self.columns):
                raise ValueError("column indices must be non-negative")
            if len(set(self.columns)) != len(self.columns):
                raise ValueError("column indices must be distinct")


def _open_text(path: str):
    if str(path).endswith(".gz"):
        return io.TextIOWrapper(gzip.open(path, "rb"), newline="")
    return open(path, "rt", newline="")


def _load_diagnostic(spec: IngestSpec) -> np.ndarray:
    # Slow path: re-read row by row to pinpoint the failure.
    rows = []
    with _open_text(spec.path) as fh:
        reader = csv.reader(fh, delimiter=spec.delimiter)
        for row in reader:
            lineno = reader.line_num
            if spec.skip_header and lineno == 1:
                continue
            if not row or all(f.strip() == "" for f in row):
                continue
            if spec.columns is not None:
                if max(spec.columns) >= len(row):
                    raise IngestError(
                        f"line {lineno}: requested column {max(spec.columns)} "
                        f"but the row has only {len(row)} fields"
                    )
                fields = [row[c] for c in spec.columns]
            else:
                fields = row
            parsed = []
            for col, tok in enumerate(fields):
                try:
                    parsed.append(float(tok))
                except ValueError:
                    raise IngestError(
                        f"line {lineno}, column {col}: {tok.strip()!r} is not numeric"
                    ) from None
            if rows and len(parsed) != len(rows[0]):
                raise IngestError(
                    f"line {lineno}: expected {len(rows[0])} fields, got {len(parsed)}"
                )
            rows.append(parsed)
    if not rows:
        raise IngestError(f"{spec.path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def load(spec: IngestSpec) -> np.ndarray:
    """Load the file described by spec into an (m, n) float64 matrix."""
    try:
        with _open_text(spec.path) as fh, warnings.catch_warnings():
            # empty input warns before returning a 0-row array; the size
            # check below turns that into a proper error
            warnings.simplefilter("ignore")
            data = np.loadtxt(
                fh,
                delimiter=spec.delimiter,
                skiprows=1 if spec.skip_header else 0,
                usecols=spec.columns,
                ndmin=2,
                comments=None,
            )
    except OSError:
        raise
    except Exception:
        data = _load_diagnostic(spec)
    if data.size == 0 or data.shape[0] == 0:
        raise IngestError(f"{spec.path}: no data rows")
    if not np.isfinite(data).all():
        r, c = np.argwhere(~np.isfinite(data))[0]
        raise IngestError(
            f"{spec.path}: non-finite value {data[r, c]!r} at data row {r + 1}, column {c}"
        )
    if spec.normalize:
        data = minmax_scale(data)
    return np.ascontiguousarray(data)


def minmax_scale(X) -> np.ndarray:
    """Map each feature onto [0, 1]; constant features map to 0."""
    X = np.asarray(X, dtype=np.float64)
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    span[span == 0.0] = 1.0
    return (X - lo) / span


def synth_blobs(m: int, n: int, k: int, spread: float, seed: int):
    """k gaussian blobs of (near) equal size with known centers.

    Centers are uniform in [-10, 10]^n; the first m mod k blobs get one
    extra point. Points are grouped by blob in the returned matrix, so the
    blob of row i is recoverable from the size layout. Fixed seeds give
    bit-identical output.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if m < k:
        raise ValueError(f"need m >= k, got m={m}, k={k}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if spread < 0:
        raise ValueError(f"spread must be non-negative, got {spread}")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-10.0, 10.0, size=(k, n))
    sizes = np.full(k, m // k)
    sizes[: m % k] += 1
    parts = [centers[j] + rng.normal(0.0, spread, size=(int(sizes[j]), n)) for j in range(k)]
    points = np.ascontiguousarray(np.vstack(parts))
    return points, CentroidSet(centers.copy())


def blob_sizes(m: int, k: int) -> np.ndarray:
    """Per-blob point counts used by synth_blobs for the same (m, k)."""
    sizes = np.full(k, m // k)
    sizes[: m % k] += 1
    return sizes
