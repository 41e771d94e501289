import numpy as np
import pytest

import intdim


def test_two_nearest_on_a_line():
    stats = intdim.two_nearest(np.array([[0.0], [1.0], [3.0]]))
    np.testing.assert_array_equal(stats["r1"], [1.0, 1.0, 2.0])
    np.testing.assert_array_equal(stats["r2"], [3.0, 2.0, 3.0])
    np.testing.assert_array_equal(stats["nn1"], [1, 0, 1])
    np.testing.assert_array_equal(stats["mu"], [3.0, 2.0, 1.5])


def test_float32_round_trip_keeps_precision(tmp_path):
    x = np.random.default_rng(0).random((20, 7), dtype=np.float32)
    intdim.save_matrix(tmp_path / "x.npy", x)
    y = intdim.load_matrix(tmp_path / "x.npy")
    assert y.dtype == np.float32
    np.testing.assert_array_equal(x, y)
    np.testing.assert_array_equal(np.load(tmp_path / "x.npy"), x)


def test_hypercube_estimate():
    x, true_id = intdim.gen_manifold("hypercube", 5, n=4000, seed=1)
    assert true_id == 5 and x.shape == (4000, 5)
    e = intdim.estimate(x, seed=3)
    assert e["schema_version"] == intdim.SCHEMA_VERSION
    assert abs(e["d_hat"] - 5) < 0.5
    assert e["repeats"] == 20


def test_estimate_is_seeded():
    x, _ = intdim.gen_manifold("hypersphere", 3, n=1000, seed=2)
    assert intdim.estimate(x, seed=7) == intdim.estimate(x, seed=7)


def test_ratio_estimators():
    rng = np.random.default_rng(5)
    mu = (1 - rng.random(20000)) ** (-1 / 4.0)
    assert abs(intdim.estimate_ratios(mu)["d_hat"] - 4) < 0.2
    assert abs(intdim.estimate_ratios(mu, "cumulate")["d_hat"] - 4) < 0.2


def test_swiss_roll_curvature_gap():
    x, _ = intdim.gen_manifold("swiss_roll", 2, n=3000, seed=4)
    assert 1.8 <= intdim.estimate(x, repeats=1, subsample_fraction=1.0)["d_hat"] <= 2.2
    assert intdim.spectrum(x)["pc_id"] == 3


def test_decimation_verdicts():
    flat, _ = intdim.gen_manifold("hypercube", 3, n=2000, seed=1)
    assert intdim.decimate(flat, k_max=10)["verdict"] == "well_defined"
    lifted = intdim.fourier_lift(intdim.gen_manifold("hypercube", 2, n=2000, seed=11)[0], 512, 8.0, seed=11)
    surrogate = intdim.gaussian_surrogate(lifted, seed=11)
    assert intdim.decimate(lifted, seed=3)["verdict"] == "well_defined"
    assert intdim.decimate(surrogate, seed=3)["verdict"] == "ill_defined"


def test_embedding_preserves_estimate():
    x, _ = intdim.gen_manifold("hypercube", 4, n=1500, seed=9)
    high = intdim.embed_orthogonal(x, 300, seed=2)
    a = intdim.two_nearest(x)["mu"]
    b = intdim.two_nearest(high)["mu"]
    np.testing.assert_allclose(a, b, rtol=1e-9)


def test_luminance_zero_is_identity():
    x, _ = intdim.gen_manifold("hypercube", 3, n=50, seed=0)
    np.testing.assert_array_equal(intdim.perturb_luminance(x, 0.0, seed=1), x)


def test_dedupe_keeps_first_copy():
    x = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 2.0]])
    kept, ids, removed = intdim.dedupe(x)
    assert removed == 1
    np.testing.assert_array_equal(ids, [0, 1, 3])
    assert kept.shape == (3, 2)


def test_small_helpers():
    assert intdim.min_id_bound(1000) == 10
    assert intdim.min_id_bound(1) == 0
    assert intdim.relative_depth(2, 8) == 0.25
    assert intdim.pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)


def test_errors_map_to_python_exceptions(tmp_path):
    with pytest.raises(intdim.DegenerateDataError):
        intdim.two_nearest(np.zeros((5, 2)))
    with pytest.raises(intdim.ConfigError):
        intdim.estimate(np.eye(10), method="median")
    with pytest.raises(intdim.ValidationError):
        intdim.two_nearest(np.array([[0.0], [np.nan], [1.0]]))
    with pytest.raises(intdim.IoError):
        intdim.load_matrix(tmp_path / "missing.npy")
    (tmp_path / "bad.npy").write_bytes(b"\x93NUMPY\x01\x00garbage")
    with pytest.raises(intdim.ParseError):
        intdim.load_matrix(tmp_path / "bad.npy")
    with pytest.raises(intdim.IntdimError):
        intdim.pearson([1, 1, 1], [1, 2, 3])
