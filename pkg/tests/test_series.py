import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuspflow.series import (
    decay_exponents,
    dyadic_blocks,
    geometric_log_sums,
    hurwitz_tail,
    power_log_sums,
    verdict_from_exponents,
)


def _mp_sums(x, a, b):
    """Hurwitz zeta oracle: sum_{a <= m < b} m^{-x} (log m)^k = (-d/dx)^k [zeta(x, a) - zeta(x, b)]."""
    with mpmath.workdps(40):
        s0 = mpmath.zeta(x, a)
        s1 = -mpmath.zeta(x, a, 1)
        if np.isfinite(b):
            s0 -= mpmath.zeta(x, b)
            s1 += mpmath.zeta(x, b, 1)
        return float(mpmath.log(s0)), float(s1 / s0)


@pytest.mark.parametrize("x,a,b", [(1.3, 1, np.inf), (2.0, 5, np.inf), (0.7, 1, 10 ** 6),
                                   (1.01, 3000, 10 ** 9), (-0.4, 1, 5000), (3.5, 10 ** 7, np.inf)])
def test_power_log_sums_match_mpmath(x, a, b):
    l0, mean = power_log_sums(x, a, b)
    r0, rmean = _mp_sums(x, a, b)
    assert l0 == pytest.approx(r0, abs=1e-10, rel=1e-10)
    assert mean == pytest.approx(rmean, rel=1e-9)


def test_power_log_sums_divergent_and_empty():
    assert power_log_sums(1.0, 1, np.inf)[0] == np.inf
    assert power_log_sums(2.0, 10, 10)[0] == -np.inf


def test_hurwitz_tail():
    assert hurwitz_tail(2.0, 1) == pytest.approx(np.pi ** 2 / 6)
    assert hurwitz_tail(1.0, 1) == np.inf


@given(st.floats(0.01, 5.0), st.integers(1, 50), st.one_of(st.integers(2, 400), st.just(None)))
def test_geometric_log_sums(rate, a, n):
    b = np.inf if n is None else a + n
    l0, mean = geometric_log_sums(rate, a, b)
    ms = np.arange(a, a + (n if n is not None else 20000))
    w = np.exp(-rate * ms)
    assert l0 == pytest.approx(np.log(w.sum()), abs=1e-9)
    assert mean == pytest.approx((w * ms).sum() / w.sum(), rel=1e-9)


def test_dyadic_blocks_layout():
    m = np.arange(1, 65)
    idx = dyadic_blocks(m, 64, 3)
    assert np.all(idx[(m > 32)] == 2) and np.all(idx[(m > 16) & (m <= 32)] == 1)
    assert np.all(idx[m <= 8] == -1)


@pytest.mark.parametrize("x,expected", [(1.5, "finite"), (0.6, "divergent"), (1.0, "inconclusive")])
def test_decay_verdicts(x, expected):
    M = 2 ** 16
    m = np.arange(1, M + 1)
    e = decay_exponents(-x * np.log(m), m, M)
    assert np.allclose(e, x - 1, atol=2e-3)
    assert verdict_from_exponents(e) == expected


def test_critical_reads_divergent():
    e = np.array([0.001, -0.002, 0.0])
    assert verdict_from_exponents(e) == "inconclusive"
    assert verdict_from_exponents(e, critical_divergent=True) == "divergent"
