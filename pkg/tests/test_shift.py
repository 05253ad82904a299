import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cuspflow.schottky import roof
from cuspflow.shift import (
    CylinderPotential,
    FiniteSuspension,
    IrreducibilityError,
    TauAffine,
    TruncatedAlphabet,
    base_matrix_pressure,
    gurevich_pressure,
    periodic_pressure,
    spectral_pressure,
)


def brute_pressure(alphabet, vals):
    """log spectral radius of the dense letter matrix by numpy's eigenvalue solver."""
    Q = alphabet.adjacency() * np.exp(vals)[None, :]
    return float(np.log(np.max(np.abs(np.linalg.eigvals(Q)))))


def test_full_two_shift():
    A = TruncatedAlphabet.full_shift(2)
    phi = CylinderPotential.from_letter_function(A, lambda b, m: 0.0)
    assert spectral_pressure(A, phi).value == pytest.approx(np.log(2), abs=1e-10)
    p0 = periodic_pressure(A, phi, 12, start=0)
    p1 = periodic_pressure(A, phi, 12, start=1)
    assert abs(p0.value - np.log(2)) <= 0.06
    assert abs(p0.value - p1.value) <= 0.06


@pytest.mark.parametrize("w", [0.3, 1.0, 2.5])
def test_three_bases_equal_weights(w):
    A = TruncatedAlphabet(((1,), (1,), (1,)), restricted=True)
    phi = CylinderPotential.from_letter_function(A, lambda b, m: np.log(w))
    exact = np.log(2 * w)
    assert brute_pressure(A, np.full(3, np.log(w))) == pytest.approx(exact, abs=1e-12)
    assert spectral_pressure(A, phi).value == pytest.approx(exact, abs=1e-10)
    assert abs(periodic_pressure(A, phi, 12).value - exact) <= 0.06


def test_full_shift_rank_one():
    w = np.array([0.2, 1.5, 3.0])
    A = TruncatedAlphabet.full_shift(3)
    phi = CylinderPotential.from_letter_function(A, lambda b, m: np.log(w[b]))
    assert spectral_pressure(A, phi).value == pytest.approx(np.log(w.sum()), abs=1e-10)


def test_irreducibility_error():
    A = TruncatedAlphabet(((1, -1, 2),), restricted=True)
    phi = CylinderPotential.from_letter_function(A, lambda b, m: 0.0)
    with pytest.raises(IrreducibilityError):
        spectral_pressure(A, phi)


def test_depth_two_potential_matches_dense():
    A = TruncatedAlphabet.uniform(3, 2)
    rng = np.random.default_rng(5)
    L = A.letters
    table = {(x, y): float(rng.normal()) for x in L for y in L}
    phi = CylinderPotential(2, table)
    lq = phi.log_matrix(A)
    dense = float(np.log(np.max(np.abs(np.linalg.eigvals(np.exp(lq))))))
    assert spectral_pressure(A, phi).value == pytest.approx(dense, abs=1e-9)


@st.composite
def small_systems(draw, lo=-3.0, hi=1.0):
    n_bases = draw(st.integers(2, 4))
    M = draw(st.integers(1, 5))
    A = TruncatedAlphabet.uniform(n_bases, M)
    vals = draw(st.lists(st.floats(lo, hi), min_size=len(A), max_size=len(A)))
    return A, np.array(vals)


@given(small_systems())
def test_spectral_matches_dense(sys_):
    A, vals = sys_
    phi = CylinderPotential(1, dict(zip(A.letters, vals)))
    assert spectral_pressure(A, phi).value == pytest.approx(brute_pressure(A, vals), abs=1e-9)


@given(small_systems(), st.integers(0, 3))
def test_periodic_traces_match_matrix_powers(sys_, start):
    from cuspflow.kernels import periodic_log_traces
    A, vals = sys_
    start = start % len(A)
    Q = A.adjacency() * np.exp(vals)[None, :]
    lq = CylinderPotential(1, dict(zip(A.letters, vals))).log_matrix(A)
    logs = periodic_log_traces(lq, start, 12)
    P = np.eye(len(A))
    for n in range(12):
        P = P @ Q
        want = np.log(P[start, start]) if P[start, start] > 0 else -np.inf
        assert logs[n] == pytest.approx(want, abs=1e-9)


@given(small_systems(-0.5, 0.5))
def test_periodic_agrees_with_spectral(sys_):
    # with a moderate potential the spectral gap makes n = 12 enough
    A, vals = sys_
    phi = CylinderPotential(1, dict(zip(A.letters, vals)))
    assert abs(periodic_pressure(A, phi, 12).value - spectral_pressure(A, phi).value) <= 0.06


@given(small_systems(), st.floats(0.0, 2.0))
def test_pressure_monotone_in_potential(sys_, bump):
    A, vals = sys_
    lo = spectral_pressure(A, CylinderPotential(1, dict(zip(A.letters, vals)))).value
    hi = spectral_pressure(A, CylinderPotential(1, dict(zip(A.letters, vals + bump)))).value
    assert hi >= lo - 1e-12


@given(small_systems())
def test_pressure_convex_in_t(sys_):
    A, vals = sys_
    ts = np.linspace(-2, 2, 9)
    p = np.array([base_matrix_pressure(np.array([np.log(np.exp(t * vals[A.bases == b]).sum())
                                                  for b in range(A.n_bases)]))[0] for t in ts])
    assert np.all(np.diff(p, 2) >= -1e-9)


def test_exhaustion_monotone(shift1):
    Ms = [2 ** k for k in range(1, 16)] + [np.inf]
    for s in (0.4, 0.6, 1.0):
        vals = [shift1.pressure(0.0, s, None, M) for M in Ms]
        assert np.all(np.diff(vals) >= -1e-12)


def test_group_shift_matches_dense_truncation(shift1):
    M = 12
    A = TruncatedAlphabet.uniform(shift1.n_bases, M)
    for t, s in ((0.0, 0.7), (0.0, 0.3), (1.0, 0.9)):
        delta = TauAffine.constant(shift1.n_bases, 1.0)
        vals = np.array([t * 1.0 - s * shift1.tau(b, m) for b, m in A.letters])
        assert shift1.pressure(t, s, delta, M) == pytest.approx(brute_pressure(A, vals), abs=1e-9)


def test_group_shift_equilibrium_matches_dense_markov_chain(shift1):
    M, s = 10, 0.8
    A = TruncatedAlphabet.uniform(shift1.n_bases, M)
    vals = np.array([-s * shift1.tau(b, m) for b, m in A.letters])
    Q = A.adjacency() * np.exp(vals)[None, :]
    ev, R = np.linalg.eig(Q)
    k = np.argmax(ev.real)
    rho = ev[k].real
    r = np.abs(R[:, k].real)
    evl, Lv = np.linalg.eig(Q.T)
    l = np.abs(Lv[:, np.argmax(evl.real)].real)
    P = Q * r[None, :] / (rho * r[:, None])
    mu = l * r / (l @ r)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.nansum(mu[:, None] * P * np.where(P > 0, np.log(P), 0.0))
    tau = np.array([shift1.tau(b, m) for b, m in A.letters])
    md = shift1.equilibrium(0.0, s, None, M)
    assert md.h_base == pytest.approx(h, abs=1e-9)
    assert md.tau_mean == pytest.approx(mu @ tau, abs=1e-9)
    assert md.entropy_check < 1e-9


def test_depth_one_roof_is_mean_over_continuations(grp2, shift1):
    for b in range(2):
        c = 1 - b
        for m in (1, -3, 40, 900):
            vals = [roof(grp2, [(b, m), (c, e)], depth=2).value for e in (1, -1)]
            assert shift1.tau(b, m) == pytest.approx(np.mean(vals), abs=1e-9)
    assert shift1.tau_min > 0


def test_tail_model_continues_table(grp2, shift1):
    T = shift1.table_size
    for b in range(2):
        c = 1 - b
        for m in (T + 1, 10 * T, 10 ** 9):
            vals = [roof(grp2, [(b, m), (c, e)], depth=2).value for e in (1, -1)]
            # the analytic tail drops an O(1/m) term; its constant is fixed at m = 1e8
            assert abs(shift1.tau(b, m) - np.mean(vals)) <= 0.05 / m + 1e-9


def test_gurevich_verdicts(shift1):
    assert gurevich_pressure(shift1, 0.0, 0.6).verdict == "finite"
    assert gurevich_pressure(shift1, 0.0, 0.4).verdict == "divergent"
    assert gurevich_pressure(shift1, 0.0, 0.0).verdict == "divergent"
    fin = gurevich_pressure(shift1, 0.0, 0.6)
    assert fin.value == pytest.approx(shift1.pressure(0.0, 0.6), abs=1e-12)
    assert np.all(np.diff([v for _, v in fin.history]) >= 0)


def test_tau_affine_segments():
    d = TauAffine(((((1, 0.0, 0.5), (10, 0.0, 0.25), (100, 1.0, 0.0))),))
    segs = d.segments(0, 5, 200)
    assert segs == [(5, 9, 0.0, 0.5), (10, 99, 0.0, 0.25), (100, 200, 1.0, 0.0)]
    d0, d1 = d.coefficients(0, np.array([1, 9, 10, 150]))
    assert list(d1) == [0.5, 0.5, 0.25, 0.0] and list(d0) == [0, 0, 0, 1.0]


def test_finite_suspension_constant_roof():
    A = TruncatedAlphabet.full_shift(2)
    sus = FiniteSuspension(A, CylinderPotential.from_letter_function(A, lambda b, m: 2.0))
    assert sus.pressure(0.0, 0.5) == pytest.approx(np.log(2) - 1.0, abs=1e-12)
    md = sus.equilibrium(0.0, 0.3)
    assert md.h_base == pytest.approx(np.log(2), abs=1e-12)
    with pytest.raises(ValueError):
        FiniteSuspension(A, CylinderPotential.from_letter_function(A, lambda b, m: -1.0))
