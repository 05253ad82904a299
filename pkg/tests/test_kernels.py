import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from cuspflow import _fallback, kernels

compiled = pytest.importorskip("cuspflow._kernels")

finite = st.floats(-50, 50, allow_nan=False)


@given(hnp.arrays(float, st.integers(1, 200), elements=finite), st.data())
def test_weighted_moments_agree(phi, data):
    n = len(phi)
    tau = data.draw(hnp.arrays(float, n, elements=st.floats(0.1, 30)))
    delta = data.draw(hnp.arrays(float, n, elements=st.floats(-5, 5)))
    a = np.array(_fallback.weighted_moments(phi, tau, delta))
    b = np.array(compiled.weighted_moments(phi, tau, delta))
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@given(st.integers(1, 60), st.integers(1, 6), st.integers(0, 2 ** 31))
def test_roof_values_agree(n, k, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    kappa = rng.uniform(0, 10, n)
    eta = np.exp(1j * rng.uniform(0, 2 * np.pi, k))
    for x, y in zip(_fallback.roof_values(a, b, kappa, eta), compiled.roof_values(a, b, kappa, eta)):
        assert np.allclose(x, y, rtol=1e-12, atol=1e-12)


@given(st.integers(2, 12), st.integers(1, 15), st.integers(0, 2 ** 31))
def test_periodic_log_traces_agree(n, n_max, seed):
    rng = np.random.default_rng(seed)
    lq = np.log(rng.uniform(0.01, 1, (n, n)))
    lq[rng.uniform(size=(n, n)) < 0.2] = -np.inf
    start = int(rng.integers(0, n))
    x = _fallback.periodic_log_traces(lq, start, n_max)
    y = compiled.periodic_log_traces(lq, start, n_max)
    assert np.array_equal(np.isneginf(x), np.isneginf(y))
    ok = np.isfinite(x)
    assert np.allclose(x[ok], y[ok], rtol=1e-12, atol=1e-12)


@given(hnp.arrays(float, st.integers(1, 300), elements=finite), st.integers(1, 5), st.integers(0, 2 ** 31))
def test_block_logsums_agree(phi, nb, seed):
    idx = np.random.default_rng(seed).integers(-1, nb, len(phi))
    x = _fallback.block_logsums(phi, idx, nb)
    y = compiled.block_logsums(phi, idx, nb)
    assert np.array_equal(np.isneginf(x), np.isneginf(y))
    ok = np.isfinite(x)
    assert np.allclose(x[ok], y[ok], rtol=1e-12, atol=1e-12)


def test_periodic_traces_oracle():
    # full 2-shift with phi = 0: (Q^n)_{00} = 2^{n-1}
    lq = np.zeros((2, 2))
    out = _fallback.periodic_log_traces(lq, 0, 10)
    assert np.allclose(out, (np.arange(1, 11) - 1) * np.log(2.0))


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.weighted_moments is (compiled.weighted_moments if kernels.BACKEND == "cython"
                                        else _fallback.weighted_moments)
