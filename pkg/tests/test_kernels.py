import numpy as np
import pytest

from onebit import kernels


@pytest.fixture
def table_inputs():
    rng = np.random.default_rng(3)
    n, m = 50_000, 16
    return (rng.integers(0, m, n), rng.random(n),
            rng.random(m), rng.random(m) - 0.5, rng.random(m) + 0.5)


@pytest.fixture
def affine_inputs():
    rng = np.random.default_rng(4)
    return (rng.random(50_000), 0.37, 0.618, -0.25, 0.382, 0.1, 0.9)


def test_decode_table_paths_identical(table_inputs, monkeypatch):
    monkeypatch.setenv("ONEBIT_PURE_NUMPY", "1")
    a = kernels.decode_table(*table_inputs)
    monkeypatch.setenv("ONEBIT_PURE_NUMPY", "0")
    b = kernels.decode_table(*table_inputs)
    if kernels.HAVE_NUMBA:
        assert not kernels.use_pure_numpy()
    assert np.array_equal(a, b)


def test_threshold_affine_paths_identical(affine_inputs, monkeypatch):
    monkeypatch.setenv("ONEBIT_PURE_NUMPY", "1")
    a = kernels.threshold_affine(*affine_inputs)
    monkeypatch.setenv("ONEBIT_PURE_NUMPY", "0")
    b = kernels.threshold_affine(*affine_inputs)
    assert np.array_equal(a, b)


def test_decode_table_semantics():
    h = np.array([0, 1, 1, 0])
    r = np.array([0.2, 0.9, 0.1, 0.8])
    q1 = np.array([0.5, 0.5])
    v0 = np.array([10.0, 20.0])
    v1 = np.array([11.0, 21.0])
    out = kernels.decode_table(h, r, q1, v0, v1)
    assert list(out) == [11.0, 20.0, 21.0, 10.0]


def test_threshold_affine_semantics():
    u = np.array([0.1, 0.9])
    out = kernels.threshold_affine(u, 0.5, 1.0, -0.5, 1.0, -np.inf, np.inf)
    assert out == pytest.approx([0.6, 0.4])
    clipped = kernels.threshold_affine(u, 0.5, 1.0, -0.5, 1.0, 0.45, 0.55)
    assert clipped == pytest.approx([0.55, 0.45])


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv("ONEBIT_PURE_NUMPY", "1")
    assert kernels.use_pure_numpy()
    monkeypatch.delenv("ONEBIT_PURE_NUMPY")
    assert kernels.use_pure_numpy() == (not kernels.HAVE_NUMBA)
