import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from cuspflow.hyperbolic import (
    BoundaryPoint,
    DegenerateGeometryWarning,
    DiskPoint,
    Isometry,
    apply,
    busemann,
    busemann_limit,
    cayley,
    classify,
    distance,
    from_halfplane,
    hyperbolic_generator,
    orbit_distances,
    parabolic_generator,
    power_entries,
)

radius = st.floats(0.0, 0.9)
angle = st.floats(0.0, 2 * np.pi)


@st.composite
def disk_points(draw):
    return draw(radius) * np.exp(1j * draw(angle))


@st.composite
def isometries(draw):
    """Random element: rotation composed with a translation to the origin."""
    w = draw(disk_points())
    return Isometry.rotation(draw(angle)) @ Isometry.translation_to_origin(w)


# -- oracles -----------------------------------------------------------------

def test_distance_examples():
    assert distance(0j, 0j) == 0.0
    # integrate the metric 2|dz| / (1 - |z|^2) along the radius
    oracle, _ = integrate.quad(lambda r: 2.0 / (1 - r * r), 0.0, 0.5)
    assert distance(0j, 0.5) == pytest.approx(oracle, abs=1e-12)
    assert oracle == pytest.approx(np.log(3.0), abs=1e-12)


def test_busemann_examples():
    xi = np.exp(0.7j)
    assert busemann(xi, 0.3 + 0.1j, 0.3 + 0.1j) == 0.0
    assert busemann(xi, 0j, 0.5 * xi) == pytest.approx(np.log(3.0), abs=1e-10)
    assert busemann_limit(xi, 0j, 0.5 * xi, T=30.0) == pytest.approx(np.log(3.0), abs=1e-9)


def test_busemann_closed_form_matches_truncated_limit():
    rng = np.random.default_rng(12)
    xi = np.exp(1j * rng.uniform(0, 2 * np.pi, 1000))
    x = rng.uniform(0, 0.9, 1000) * np.exp(1j * rng.uniform(0, 2 * np.pi, 1000))
    y = rng.uniform(0, 0.9, 1000) * np.exp(1j * rng.uniform(0, 2 * np.pi, 1000))
    assert np.max(np.abs(busemann(xi, x, y) - busemann_limit(xi, x, y, T=30.0))) <= 1e-6


def test_identity_and_cayley_examples():
    assert Isometry.identity()(0.3) == pytest.approx(0.3)
    g = from_halfplane(1.0, 1.0, 0.0, 1.0)
    assert g(cayley(1j)) == pytest.approx(complex(cayley(1 + 1j)), abs=1e-14)


def test_classify_examples():
    p = from_halfplane(1.0, 1.0, 0.0, 1.0)
    cls = classify(p)
    assert cls.kind == "parabolic" and len(cls.fixed_points) == 1
    # the fixed point is the image of infinity
    assert cls.fixed_points[0] == pytest.approx(1.0, abs=1e-12)
    h = from_halfplane(2.0, 0.0, 0.0, 0.5)
    ch = classify(h)
    assert ch.kind == "hyperbolic"
    # d(i, 4i) in the half-plane, measured in the disk
    oracle = float(distance(complex(cayley(1j)), complex(cayley(4j))))
    assert ch.translation_length == pytest.approx(oracle, abs=1e-12)
    assert oracle == pytest.approx(2 * np.log(2.0), abs=1e-12)
    assert classify(from_halfplane(1.0, 0.0, 0.0, 1.0)).kind == "identity"


def test_from_halfplane_rejects_bad_determinant():
    with pytest.raises(ValueError):
        from_halfplane(1.0, 1.0, 1.0, 1.0)


def test_apply_flags_degenerate_images():
    g = hyperbolic_generator(0.0, np.pi, 25.0)
    with pytest.warns(DegenerateGeometryWarning):
        apply(g, DiskPoint(0.1))
    b = apply(g, BoundaryPoint.from_angle(1.0))
    assert abs(abs(b.u) - 1) < 1e-12


def test_generator_constructors():
    h = hyperbolic_generator(0.3, 2.0, 1.7)
    c = classify(h)
    assert c.translation_length == pytest.approx(1.7, abs=1e-12)
    assert np.angle(c.attracting) == pytest.approx(0.3, abs=1e-10)
    p = parabolic_generator(np.pi / 2, 5.0)
    cp = classify(p)
    assert cp.kind == "parabolic"
    assert np.angle(cp.fixed_points[0]) == pytest.approx(np.pi / 2, abs=1e-10)


def _mp_power(g, m):
    """alpha, beta of g^m by repeated multiplication in 50-digit arithmetic."""
    with mpmath.workdps(50):
        a, b = mpmath.mpc(g.alpha), mpmath.mpc(g.beta)
        if m < 0:
            a, b = mpmath.conj(a), -b
        ra, rb = mpmath.mpc(1), mpmath.mpc(0)
        for _ in range(abs(m)):
            ra, rb = ra * a + rb * mpmath.conj(b), ra * b + rb * mpmath.conj(a)
        return ra, rb


@pytest.mark.parametrize("g", [hyperbolic_generator(-0.4, 2.2, 1.3), parabolic_generator(1.1, 3.0),
                               parabolic_generator(4.0, 0.7, orientation=-1)])
def test_power_entries_match_exact_products(g):
    ms = np.array([-37, -5, -1, 1, 2, 9, 40])
    pe = power_entries(g, ms)
    for k, m in enumerate(ms):
        ra, rb = _mp_power(g, int(m))
        with mpmath.workdps(50):
            d_exact = float(2 * mpmath.log(abs(ra) + abs(rb)))
            img = complex(rb / mpmath.conj(ra))
        assert pe.origin_distance()[k] == pytest.approx(d_exact, rel=1e-12, abs=1e-12)
        assert pe.origin_image()[k] == pytest.approx(img, abs=1e-12)


def test_parabolic_orbit_growth():
    g = parabolic_generator(0.5, 1.0)
    m = np.array([10 ** 3, 10 ** 6, 10 ** 9])
    d = orbit_distances(g, m)
    # d(o, p^m o) = 2 log m + O(1) with a bounded remainder
    rem = d - 2 * np.log(m)
    assert np.ptp(rem) < 1e-5


# -- properties ----------------------------------------------------------------

@given(isometries(), disk_points(), disk_points())
def test_distance_invariance(g, x, y):
    assert abs(distance(g(x), g(y)) - distance(x, y)) <= 1e-9 * max(1.0, distance(x, y))


@given(isometries(), angle, disk_points(), disk_points())
def test_busemann_equivariance(g, th, x, y):
    xi = np.exp(1j * th)
    gxi = g(xi)
    gxi = gxi / abs(gxi)
    assert abs(busemann(gxi, g(x), g(y)) - busemann(xi, x, y)) <= 1e-9


@given(angle, disk_points(), disk_points(), disk_points())
def test_busemann_cocycle_and_bound(th, x, y, z):
    xi = np.exp(1j * th)
    assert abs(busemann(xi, x, z) - busemann(xi, x, y) - busemann(xi, y, z)) <= 1e-9
    assert abs(busemann(xi, x, y)) <= distance(x, y) + 1e-9


@given(isometries(), disk_points())
def test_inverse_law(g, z):
    assert abs(g.inverse()(g(z)) - z) <= 1e-12


@given(isometries(), isometries())
def test_normal_form_closure(g, h):
    k = g @ h
    assert abs(abs(k.alpha) ** 2 - abs(k.beta) ** 2 - 1.0) <= 1e-10
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert abs(k(0.2j) - g(h(0.2j))) <= 1e-10
