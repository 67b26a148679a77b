import subprocess
import sys

import numpy as np
import pytest

import samplemeans as sm
from samplemeans import backend
from samplemeans._kernels_numba import assign_labels as nb_assign
from samplemeans._kernels_numba import label_sums as nb_sums
from samplemeans._kernels_numba import sqdist_to_point as nb_sqdist
from samplemeans._kernels_numpy import assign_labels as np_assign
from samplemeans._kernels_numpy import label_sums as np_sums
from samplemeans._kernels_numpy import sqdist_to_point as np_sqdist


@pytest.fixture
def restore_backend():
    current = backend.name()
    yield
    backend.use(current)


def random_case(seed, m=500, n=7, k=6):
    rng = np.random.default_rng(seed)
    X = np.ascontiguousarray(rng.normal(size=(m, n)))
    C = np.ascontiguousarray(rng.normal(size=(k, n)))
    return X, C, k


def test_backends_agree_on_labels():
    for seed in range(5):
        X, C, k = random_case(seed)
        la, da = nb_assign(X, C)
        lb, db = np_assign(X, C)
        assert np.array_equal(la, lb)
        np.testing.assert_allclose(da, db, rtol=1e-12)


def test_backends_agree_on_sums():
    X, C, k = random_case(3)
    labels, _ = np_assign(X, C)
    sa, ca = nb_sums(X, labels, k)
    sb, cb = np_sums(X, labels, k)
    assert np.array_equal(ca, cb)
    assert np.array_equal(sa, sb)


def test_backends_agree_on_sqdist():
    X, C, _ = random_case(4)
    np.testing.assert_allclose(nb_sqdist(X, C[0]), np_sqdist(X, C[0]), rtol=1e-12)


def test_numpy_assign_blocking_boundaries(monkeypatch):
    # force tiny blocks so the chunked path is exercised
    from samplemeans import _kernels_numpy

    monkeypatch.setattr(_kernels_numpy, "_BLOCK_ELEMENTS", 64)
    X, C, _ = random_case(9, m=103, n=3, k=4)
    la, da = _kernels_numpy.assign_labels(X, C)
    lb, db = nb_assign(X, C)
    assert np.array_equal(la, lb)
    np.testing.assert_allclose(da, db, rtol=1e-12)


def test_use_switches_active_backend(restore_backend):
    backend.use("numpy")
    assert backend.name() == "numpy"
    X, C, _ = random_case(1)
    labels, _ = backend.assign_labels(X, C)
    backend.use("numba")
    assert backend.name() == "numba"
    labels2, _ = backend.assign_labels(X, C)
    assert np.array_equal(labels, labels2)


def test_use_rejects_unknown():
    with pytest.raises(ValueError, match="unknown backend"):
        backend.use("cuda")


def test_available_lists_both_here():
    names = backend.available()
    assert names[0] == "numba"
    assert "numpy" in names


def test_env_flag_selects_backend():
    code = (
        "import samplemeans as sm; import sys; "
        "sys.exit(0 if sm.backend.name() == 'numpy' else 1)"
    )
    proc = subprocess.run([sys.executable, "-c", code],
                          env={"PATH": "/usr/bin:/bin", "SAMPLEMEANS_BACKEND": "numpy"},
                          capture_output=True)
    assert proc.returncode == 0


def test_full_run_agrees_across_backends(restore_backend):
    # identical RNG consumption keeps results equal up to float round-off
    pts, _ = sm.synth_blobs(800, 2, 3, 0.5, 17)
    cfg = dict(k=3, workers=2, s_min=80, s_max=200, epochs=2,
               passes_per_epoch=3, seed=13)
    backend.use("numba")
    a = sm.run_competitive(pts, sm.CompetitiveConfig(**cfg))
    backend.use("numpy")
    b = sm.run_competitive(pts, sm.CompetitiveConfig(**cfg))
    assert a.s_opt == b.s_opt
    assert sorted(a.log_entries) == sorted(b.log_entries)
    np.testing.assert_allclose(a.centroids.centers, b.centroids.centers, rtol=1e-9)
    assert abs(a.objective - b.objective) <= 1e-9 * a.objective
