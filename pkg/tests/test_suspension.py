import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuspflow.poincare import delta_p_max, group_exponent_bracket
from cuspflow.shift import CylinderPotential, FiniteSuspension, GroupShift, TauAffine, TruncatedAlphabet
from cuspflow.suspension import (
    abramov,
    cusp_constant,
    escape_sequence,
    flow_pressure,
    h_top,
    kac,
    s_infinity,
)


def constant_roof(k, c):
    A = TruncatedAlphabet.full_shift(k)
    return FiniteSuspension(A, CylinderPotential.from_letter_function(A, lambda b, m: c))


def test_zero_potential_gives_h_top(shift1, sinf1, htop1):
    r = flow_pressure(shift1, TauAffine.zero(2), 1.0, 1e-10, sinf1.upper)
    assert r.value == pytest.approx(htop1.value, abs=1e-8)
    assert abs(r.residual) <= 1e-8


@pytest.mark.parametrize("alpha", [-0.3, 0.0, 0.7])
def test_shift_identity(shift1, sinf1, alpha):
    # Delta = alpha tau: P(alpha tau - s tau) = 0 exactly at s = h_top + alpha
    h = flow_pressure(shift1, None, 1.0, 1e-10, sinf1.upper).value
    r = flow_pressure(shift1, TauAffine.roof_multiple(2, alpha), 1.0, 1e-10, sinf1.upper)
    assert abs(r.value - (h + alpha)) <= 2e-8


@given(st.integers(1, 6), st.floats(0.2, 5.0))
@settings(max_examples=25)
def test_constant_roof_closed_form(k, c):
    r = flow_pressure(constant_roof(k, c), None, 1.0, 1e-12)
    assert abs(r.value - np.log(k) / c) <= 1e-8


def test_bernoulli_abramov():
    sus = constant_roof(2, 2.0)
    s = flow_pressure(sus, None, 1.0, 1e-12).value
    md = sus.equilibrium(0.0, s)
    assert abramov(md) == pytest.approx(np.log(2) / 2, abs=1e-12)
    assert md.tau_mean == pytest.approx(2.0, abs=1e-14)


def test_point_mass_has_zero_entropy():
    sus = constant_roof(1, 1.5)
    md = sus.equilibrium(0.0, 0.0)
    assert abramov(md) == pytest.approx(0.0, abs=1e-14)


def test_kac(shift1):
    md = shift1.equilibrium(1.0, 0.8, TauAffine.roof_multiple(2, 1.0), 256)
    assert kac(md) == pytest.approx(1.0, abs=1e-12)
    md = shift1.equilibrium(1.0, 0.8, TauAffine.constant(2, 1.0), 256)
    assert kac(md) == pytest.approx(1.0 / md.tau_mean, abs=1e-12)


def test_abramov_at_h_top_is_variational(shift1, htop1):
    md = shift1.equilibrium(0.0, htop1.value)
    assert abramov(md) == pytest.approx(htop1.value, abs=1e-6)


@pytest.mark.parametrize("M", [8, 64, 512])
@pytest.mark.parametrize("t", [-1.0, 0.5, 2.0])
def test_variational_residual_on_truncations(shift1, spec61, sinf1, M, t):
    tol = 1e-8
    delta = spec61.delta(2)
    r = flow_pressure(shift1, delta, t, tol, M=M, scan=(sinf1.upper, sinf1.upper + 1.0))
    md = shift1.equilibrium(t, r.value, delta, M)
    assert abs(abramov(md) + t * kac(md) - r.value) <= 2 * tol


def test_s_infinity_matches_delta_p_max(grp2, sinf1):
    dp = delta_p_max(grp2)
    assert sinf1.contains(0.5)
    assert max(sinf1.lower, dp.lower) <= min(sinf1.upper, dp.upper)
    assert sinf1.width + dp.width <= 0.05


def test_s_infinity_three_generators(grp3):
    s = s_infinity(GroupShift(grp3))
    dp = delta_p_max(grp3)
    assert max(s.lower, dp.lower) <= min(s.upper, dp.upper)


def test_h_top_gap_and_bracket(grp2, sinf1, htop1):
    b = group_exponent_bracket(grp2)
    assert b.contains(htop1.value)
    assert htop1.info["consistent"]
    assert htop1.value - sinf1.upper >= 0.05
    assert abs(htop1.residual) <= 1e-8


def test_pressure_slope_bounded_by_min_roof(shift1):
    # d/ds P(-s tau) = -int tau dmu <= -tau_min
    s = np.linspace(0.55, 2.0, 30)
    p = np.array([shift1.pressure(0.0, x) for x in s])
    assert np.all(np.diff(p) / np.diff(s) <= -shift1.tau_min + 1e-9)


def test_cusp_constant_bound(shift1, sinf1, htop1, spec61):
    c = 0.5 * (sinf1.upper + htop1.value)
    cc = cusp_constant(shift1, c, sinf1, htop1.value)
    assert cc.stationarity <= 0.05
    delta = spec61.delta(2)
    n_checked = 0
    for M in (64, 4096, np.inf):
        for t in (-1.0, 0.0, 0.5, 1.0):
            for s in np.linspace(sinf1.upper + 0.01, 2.0, 25):
                md = shift1.equilibrium(t, s, delta, M)
                if abramov(md) >= c:
                    n_checked += 1
                    assert md.tau_mean <= cc.value
    assert n_checked > 0


def test_cusp_constant_grows_towards_s_infinity(shift1, sinf1, htop1):
    cs = np.linspace(htop1.value - 0.02, sinf1.upper + 0.01, 5)
    vals = [cusp_constant(shift1, c, sinf1, htop1.value).value for c in cs]
    assert np.all(np.diff(vals) > 0)
    with pytest.raises(ValueError):
        cusp_constant(shift1, htop1.value + 0.1, sinf1, htop1.value)


def test_escape_sequence(shift1, sinf1):
    t0 = time.perf_counter()
    terms = escape_sequence(shift1, 10, sinf1)
    assert time.perf_counter() - t0 < 120
    assert len(terms) == 10
    assert all(term.tau_mean >= term.n for term in terms)
    assert np.all(np.diff([term.tau_mean for term in terms]) > 0)
    h = terms[-1].h_flow
    assert max(sinf1.lower - h, h - sinf1.upper, 0.0) <= 0.1


def test_h_top_three_generators(grp3):
    shift = GroupShift(grp3)
    s = s_infinity(shift)
    h = h_top(shift, s)
    assert h.info["consistent"] and h.value > s.upper
