import logging

import numpy as np
import pytest
from scipy import stats

import samplemeans as sm
from samplemeans.kmeans import LloydConfig

from _oracles import brute_force_mssc


def test_kmeanspp_two_distinct_points():
    # D^2 weighting forces the second pick to be the other point
    X = np.array([[0.0], [100.0]])
    for seed in range(20):
        C = sm.kmeanspp_init(X, 2, np.random.default_rng(seed))
        assert sorted(C.centers.ravel().tolist()) == [0.0, 100.0]
        assert not C.degenerate.any()


def test_kmeanspp_single_point():
    C = sm.kmeanspp_init(np.array([[5.0]]), 1, np.random.default_rng(0))
    assert C.centers.tolist() == [[5.0]]
    assert not C.degenerate.any()


def test_kmeanspp_k_exceeds_m():
    with pytest.raises(ValueError, match="exceeds"):
        sm.kmeanspp_init(np.array([[1.0], [2.0]]), 3, np.random.default_rng(0))


def test_kmeanspp_all_identical_points():
    X = np.zeros((5, 2))
    C = sm.kmeanspp_init(X, 3, np.random.default_rng(0))
    assert (C.centers == 0.0).all()
    assert C.degenerate.tolist() == [False, True, True]


def test_kmeanspp_centers_are_distinct_points():
    rng = np.random.default_rng(21)
    for _ in range(10):
        X = rng.normal(size=(30, 2))
        C = sm.kmeanspp_init(X, 4, rng)
        assert len({tuple(c) for c in C.centers}) == 4
        rows = {tuple(x) for x in X}
        assert all(tuple(c) in rows for c in C.centers)


def test_kmeanspp_second_center_frequency():
    # 99 points at 0 and one at 10. The first center is uniform over the
    # 100 rows. If it lands on a zero (p=0.99), every D^2 mass sits on the
    # far point, which is then drawn surely; if it lands on the far point
    # (p=0.01), all mass sits on the zeros. So P(second center = 10) = 0.99
    # exactly; binomial 3-sigma over 10000 draws is about +/-0.003.
    X = np.zeros((100, 1))
    X[-1, 0] = 10.0
    n_draws = 10_000
    rng = np.random.default_rng(2024)
    hits = 0
    for _ in range(n_draws):
        C = sm.kmeanspp_init(X, 2, rng, n_candidates=1)
        hits += C.centers[1, 0] == 10.0
    p = 0.99
    sigma = (p * (1 - p) / n_draws) ** 0.5
    assert abs(hits / n_draws - p) <= 3 * sigma


def test_kmeanspp_candidate_draw_matches_d2_weights():
    # Reseed with one kept center at 0 over points {1, 3}: D^2 weights are
    # 1:9, so the replacement is 3 with probability 0.9.
    X = np.array([[1.0], [3.0]])
    kept = sm.CentroidSet(np.array([[0.0], [999.0]]), degenerate=[False, True])
    n_draws = 10_000
    rng = np.random.default_rng(77)
    picks = np.zeros(2, dtype=int)
    for _ in range(n_draws):
        C = sm.kmeanspp_reseed(X, kept, rng, n_candidates=1)
        picks[int(C.centers[1, 0] == 3.0)] += 1
    res = stats.chisquare(picks, f_exp=[0.1 * n_draws, 0.9 * n_draws])
    assert res.pvalue > 0.01


def test_reseed_keeps_nondegenerate_verbatim():
    X = np.array([[0.0], [1.0], [10.0]])
    C = sm.CentroidSet(np.array([[0.0], [999.0]]), degenerate=[False, True])
    rng = np.random.default_rng(5)
    hits_10 = 0
    for _ in range(2000):
        out = sm.kmeanspp_reseed(X, C, rng, n_candidates=1)
        assert out.centers[0, 0] == 0.0
        assert out.centers[1, 0] in (1.0, 10.0)
        assert not out.degenerate.any()
        hits_10 += out.centers[1, 0] == 10.0
    # D^2 weights 1:100, so 10 dominates
    assert hits_10 / 2000 > 0.9


def test_reseed_requires_degenerate_flag():
    C = sm.CentroidSet(np.array([[0.0]]))
    with pytest.raises(ValueError, match="degenerate"):
        sm.kmeanspp_reseed(np.array([[1.0]]), C, np.random.default_rng(0))


def test_reseed_all_degenerate_single_point():
    C = sm.CentroidSet(np.array([[99.0]]), degenerate=[True])
    out = sm.kmeanspp_reseed(np.array([[3.0]]), C, np.random.default_rng(0))
    assert out.centers.tolist() == [[3.0]]
    assert not out.degenerate.any()


def test_reseed_duplicates_when_points_exhausted(caplog):
    X = np.array([[1.0], [2.0]])
    C = sm.CentroidSet(np.full((4, 1), 7.0), degenerate=[True] * 4)
    with caplog.at_level(logging.WARNING, logger="samplemeans.kmeans"):
        out = sm.kmeanspp_reseed(X, C, np.random.default_rng(1))
    assert set(out.centers.ravel().tolist()) == {1.0, 2.0}
    assert not out.degenerate.any()
    assert any("distinct" in r.message for r in caplog.records)


def test_lloyd_two_pair_instance():
    X = np.array([[0.0], [1.0], [9.0], [10.0]])
    res = sm.lloyd(X, sm.CentroidSet(np.array([[1.0], [9.0]])))
    assert res.centroids.centers.ravel().tolist() == [0.5, 9.5]
    assert res.objective == 1.0
    assert res.labels.tolist() == [0, 0, 1, 1]
    assert brute_force_mssc(X, 2) == 1.0


def test_lloyd_single_point_fixed():
    res = sm.lloyd(np.array([[4.0]]), sm.CentroidSet(np.array([[4.0]])))
    assert res.objective == 0.0
    assert res.iterations == 1
    assert res.centroids.centers.tolist() == [[4.0]]


def test_lloyd_empty_cluster_keeps_center():
    X = np.array([[0.0], [10.0]])
    res = sm.lloyd(X, sm.CentroidSet(np.array([[5.0], [100.0]])))
    assert res.centroids.centers.ravel().tolist() == [5.0, 100.0]
    assert res.centroids.degenerate.tolist() == [False, True]
    assert res.objective == 50.0


def test_lloyd_objective_matches_evaluate():
    rng = np.random.default_rng(31)
    for _ in range(10):
        X = rng.normal(size=(50, 3))
        res = sm.lloyd(X, sm.kmeanspp_init(X, 4, rng))
        assert res.objective == sm.evaluate_objective(res.centroids, X)
        assert np.array_equal(res.labels, sm.assign_all(X, res.centroids))


def test_lloyd_trace_monotone():
    rng = np.random.default_rng(13)
    for _ in range(30):
        X = rng.normal(size=(80, 2)) * 5
        res = sm.lloyd(X, sm.kmeanspp_init(X, 3, rng))
        t = res.objective_trace
        assert t[-1] == res.objective
        drops = np.diff(t)
        assert (drops <= 1e-12 * np.maximum(t[:-1], 1.0)).all()


def test_lloyd_fixed_point_of_own_output():
    rng = np.random.default_rng(17)
    X = rng.normal(size=(60, 2))
    res = sm.lloyd(X, sm.kmeanspp_init(X, 3, rng))
    again = sm.lloyd(X, res.centroids)
    assert abs(again.objective - res.objective) <= LloydConfig().rel_tol * res.objective
    assert again.iterations == 1


def test_lloyd_respects_max_iter():
    rng = np.random.default_rng(19)
    X = rng.normal(size=(200, 2))
    res = sm.lloyd(X, sm.kmeanspp_init(X, 5, rng), LloydConfig(max_iter=1))
    assert res.iterations == 1


def test_lloyd_rel_tol_zero_terminates_at_fixed_point():
    rng = np.random.default_rng(23)
    X = rng.normal(size=(40, 2))
    res = sm.lloyd(X, sm.kmeanspp_init(X, 3, rng), LloydConfig(max_iter=300, rel_tol=0.0))
    assert res.iterations < 300
    again = sm.lloyd(X, res.centroids, LloydConfig(max_iter=300, rel_tol=0.0))
    assert again.objective == res.objective


def test_lloyd_matches_brute_force_on_small_instances():
    rng = np.random.default_rng(101)
    for _ in range(5):
        m = int(rng.integers(4, 9))
        k = int(rng.integers(2, 4))
        X = rng.normal(size=(m, 2)) * 3
        opt = brute_force_mssc(X, k)
        best = sm.fit_kmeans(X, k, rng, LloydConfig(rel_tol=0.0), restarts=30)
        assert best.objective <= opt * (1 + 1e-9)
        assert best.objective >= opt * (1 - 1e-9)


def test_fit_kmeans_restarts_never_worse():
    rng = np.random.default_rng(41)
    X = rng.normal(size=(100, 2))
    one = sm.fit_kmeans(X, 4, np.random.default_rng(1), restarts=1)
    many = sm.fit_kmeans(X, 4, np.random.default_rng(1), restarts=10)
    assert many.objective <= one.objective


def test_lloyd_config_validation():
    with pytest.raises(ValueError):
        LloydConfig(max_iter=0)
    with pytest.raises(ValueError):
        LloydConfig(rel_tol=-1.0)
