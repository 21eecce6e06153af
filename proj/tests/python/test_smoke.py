import math

import numpy as np
import pytest

import lpcascade as lpc


def brute(data, y, eps, p):
    d = np.linalg.norm(data - y, ord=p, axis=1)
    return sorted(np.nonzero(d < eps)[0].tolist())


def test_norms():
    v = np.array([3.0, -4.0])
    assert lpc.lp_norm(v, 2) == pytest.approx(5.0)
    assert lpc.lp_norm(v, 1) == pytest.approx(7.0)
    assert lpc.lp_norm(v, "inf") == 4.0
    assert lpc.lp_norm(v, math.inf) == 4.0
    assert lpc.lp_distance(v, np.zeros(2), 2) == pytest.approx(5.0)
    assert lpc.dual_exponent(1) == math.inf
    assert lpc.dual_exponent(4) == pytest.approx(4.0 / 3.0)


def test_features():
    b = np.array([1.0, 2.0, 3.0, 4.0])
    assert lpc.orthogonal_feature(b, 2) == pytest.approx(2.0 * 2.5)
    assert lpc.q_mapping_norm(16, 4) == pytest.approx(4.0)
    z = np.ones(4) / 2.0
    assert lpc.adaptive_feature(b, z, 2) == pytest.approx(lpc.orthogonal_feature(b, 2))
    assert lpc.diversion(z) == pytest.approx(0.0, abs=1e-12)


def test_covariance_and_pca():
    rows = np.array([[1.0, 1.0], [3.0, 3.0]])
    c = lpc.covariance(rows, "centered")
    np.testing.assert_allclose(c, np.cov(rows.T))
    direction, value, converged = lpc.first_principal_component(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert converged
    assert value == pytest.approx(3.0)
    np.testing.assert_allclose(direction, [math.sqrt(0.5)] * 2, atol=1e-9)


@pytest.mark.parametrize("mode", ["orthogonal", "adaptive"])
@pytest.mark.parametrize("p", [1, 2, math.inf])
def test_index_matches_brute_force(mode, p, tmp_path):
    data = lpc.generate(800, 64, model="block", seed=3)
    queries = lpc.generate(5, 64, model="block", seed=4)
    eps = lpc.calibrate_epsilon(data, p, target_nn=10, sample_size=50, seed=1)
    index = lpc.Index.build(data, [64, 16, 4], mode=mode, p=p)
    assert len(index) == 800
    assert index.schedule == [64, 16, 4]
    for y in queries:
        rep = index.range_query(y, eps)
        assert rep["ids"] == brute(data, y, eps, p)
        assert rep["ids"] == lpc.brute_force_range(data, y, eps, p)["ids"]
        assert rep["cost_s"] == lpc.cascade_cost([64, 16, 4], rep["survivors"], 800)

    path = tmp_path / "idx.lpc"
    index.save(path)
    loaded = lpc.Index.load(path, data)
    assert loaded.mode == mode
    assert loaded.range_query(queries[0], eps)["ids"] == brute(data, queries[0], eps, p)


def test_errors(tmp_path):
    data = lpc.generate(10, 8)
    with pytest.raises(ValueError):
        lpc.Index.build(data, [8, 3])
    with pytest.raises(ValueError):
        lpc.lp_norm(np.array([1.0]), 0.5)
    with pytest.raises(lpc.InputError):
        lpc.load_vectors(tmp_path / "missing.fvecs")


def test_io_roundtrip(tmp_path):
    data = lpc.generate(20, 8, model="smooth", seed=2)
    lpc.save_fvecs(data, tmp_path / "d.fvecs")
    np.testing.assert_allclose(lpc.load_vectors(tmp_path / "d.fvecs"), data.astype(np.float32))
    lpc.save_csv(data, tmp_path / "d.csv")
    np.testing.assert_array_equal(lpc.load_vectors(tmp_path / "d.csv"), data)


def test_run_bench():
    rows = lpc.run_bench({"synthetic": "iid", "s": "500", "n": "32", "schedule": "32,8,2",
                          "norms": "2,inf", "queries": "4", "verify": "4", "epsilon": "calibrate",
                          "target_nn": "5", "calib_sample": "20"})
    assert len(rows) == 4
    assert rows[0]["mode"] == "orthogonal"
    assert all(r["queries"] == 4 for r in rows)
