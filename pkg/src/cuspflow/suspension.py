"""Flow-level quantities of the suspension: pressure roots, h_top, s_infinity, Abramov/Kac,
the entropy-in-the-cusp constant and escaping measure sequences."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .poincare import BISECT_TOL, ExponentEstimate, group_exponent_bracket
from .series import DEFAULT_KAPPA
from .shift import GroupShift, MeasureData, TauAffine, gurevich_pressure

SCAN_OFFSET = 1e-3
SCAN_WIDTH = 50.0
ROOT_TOL = 1e-8


class NoSignChangeError(RuntimeError):
    pass


class InconsistencyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FlowPressureResult:
    value: float
    bracket: tuple
    residual: float
    M: float = np.inf
    info: dict = field(default_factory=dict)


def _finiteness_floor(system, delta, t, s_inf_upper):
    """Smallest s past which P(t Delta - s tau) is known finite on the whole alphabet.

    For Delta = d0 + d1 tau the tail letters of a cusp weigh e^{(t d1 - s) tau},
    so the threshold s_inf moves to s_inf + t d1 (last piece of each cusp base).
    """
    if not isinstance(system, GroupShift) or delta is None:
        return s_inf_upper
    shifts = [t * delta.pieces[b][-1][2] for b, kind in enumerate(system.kinds) if kind == "parabolic"]
    return s_inf_upper + (max(shifts) if shifts else 0.0)


def flow_pressure(system, delta=None, t=1.0, tol=ROOT_TOL, s_inf_upper=0.0, M=np.inf,
                  scan=None) -> FlowPressureResult:
    """P_Phi(f) = inf{s : P_sigma(t Delta_f - s tau) <= 0} by a bracketed root search.

    ``system`` is a ``GroupShift`` or ``FiniteSuspension``.  On the whole
    alphabet the scan range is [floor + 1e-3, floor + 50] with floor the
    finiteness threshold derived from ``s_inf_upper``; on a finite truncation
    the pressure is finite everywhere and the bracket is grown as needed.
    """
    P = lambda s: system.pressure(t, s, delta, M)
    if scan is None:
        floor = _finiteness_floor(system, delta, t, s_inf_upper)
        scan = (floor + SCAN_OFFSET, floor + SCAN_WIDTH)
    lo, hi = scan
    plo, phi = P(lo), P(hi)
    if np.isfinite(M) or not isinstance(system, GroupShift):
        k = 0
        while plo <= 0 and k < 200:
            lo -= max(1.0, abs(lo))
            plo = P(lo)
            k += 1
        while phi > 0 and k < 400:
            hi += max(1.0, abs(hi))
            phi = P(hi)
            k += 1
    if not (plo > 0 > phi or plo > 0 and phi == 0):
        raise NoSignChangeError(f"no sign change of P(t Delta - s tau) on [{lo}, {hi}]: "
                                f"P(lo)={plo}, P(hi)={phi}")
    n_bisect = 0
    while np.isposinf(plo):
        # divergent end of the bracket: move it inward until the pressure is finite
        mid = 0.5 * (lo + hi)
        pm = P(mid)
        if pm > 0:
            lo, plo = mid, pm
        else:
            hi, phi = mid, pm
        n_bisect += 1
        if hi - lo < tol * 1e-4:
            return FlowPressureResult(float(hi), (float(lo), float(hi)), float(phi), M,
                                      {"iterations": n_bisect, "at_divergence_edge": True})
    root, res = optimize.brentq(P, lo, hi, xtol=tol * 1e-4, rtol=4 * np.finfo(float).eps,
                                full_output=True)
    return FlowPressureResult(float(root), (float(lo), float(hi)), float(P(root)), M,
                              {"iterations": res.iterations + n_bisect})


def h_top(shift: GroupShift, s_inf: ExponentEstimate | None = None, tol=ROOT_TOL,
          bracket: ExponentEstimate | None = None) -> FlowPressureResult:
    """Topological entropy of the flow: the root of P(-s tau) = 0.

    The value is compared with the delta_Gamma bracket; a disagreement is
    flagged with an ``InconsistencyWarning`` and recorded in ``info``.
    """
    if s_inf is None:
        s_inf = s_infinity(shift)
    res = flow_pressure(shift, None, 1.0, tol, s_inf.upper)
    if bracket is None and isinstance(shift, GroupShift):
        bracket = group_exponent_bracket(shift.group)
    info = dict(res.info)
    if bracket is not None:
        ok = bracket.contains(res.value, tol)
        info.update(delta_bracket=(bracket.lower, bracket.upper), consistent=ok)
        if not ok:
            warnings.warn(f"h_top {res.value} outside the delta_Gamma bracket "
                          f"[{bracket.lower}, {bracket.upper}]", InconsistencyWarning)
    return FlowPressureResult(res.value, res.bracket, res.residual, res.M, info)


def s_infinity(shift: GroupShift, tol=BISECT_TOL, kappa=DEFAULT_KAPPA, t_range=(0.0, 2.0),
               M_max=2.0 ** 60) -> ExponentEstimate:
    """Bracket the threshold between divergent and finite P(-t tau) by bisection on verdicts.

    lower = last t read divergent, upper = first t read finite; the
    undecided band between them is kept, not collapsed.
    """
    seen = {}

    def verdict(t):
        if t not in seen:
            seen[t] = gurevich_pressure(shift, 0.0, t, None, M_max=M_max, kappa=kappa).verdict
        return seen[t]

    a, b = t_range
    if verdict(a) != "divergent" or verdict(b) != "finite":
        raise RuntimeError(f"s_infinity search range {t_range} does not straddle the threshold")
    lo, hi = a, b
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if verdict(mid) == "divergent":
            lo = mid
        else:
            hi = mid
    lo_div = lo
    lo, hi = a, b
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if verdict(mid) == "finite":
            hi = mid
        else:
            lo = mid
    up_fin = hi
    ts = sorted(seen)
    rank = {"divergent": 0, "inconclusive": 1, "finite": 2}
    r = [rank[seen[t]] for t in ts]
    if any(x > y for x, y in zip(r, r[1:])):
        raise RuntimeError("finite/divergent verdicts are not monotone in t")
    return ExponentEstimate(float(lo_div), float(up_fin), "gurevich-verdicts", M=int(M_max),
                            info={"kappa": kappa, "n_evaluations": len(seen)})


def abramov(md: MeasureData) -> float:
    """Flow entropy h_mu(sigma) / int tau dmu."""
    if not md.tau_mean > 0:
        raise ValueError("mean roof must be positive")
    return md.h_base / md.tau_mean


def kac(md: MeasureData) -> float:
    """Flow integral of f: int Delta_f dmu / int tau dmu."""
    if not md.tau_mean > 0:
        raise ValueError("mean roof must be positive")
    return md.deltaf_mean / md.tau_mean


@dataclass(frozen=True)
class CuspConstant:
    value: float
    s_min: float
    c: float
    stationarity: float
    measure: MeasureData


def cusp_constant(shift: GroupShift, c, s_inf: ExponentEstimate, h: float, tol=1e-10) -> CuspConstant:
    """C(c) = min over s in (s_inf, c) of P(-s tau) / (c - s).

    Any invariant measure with flow entropy >= c has int tau dmu <= C(c).
    The minimiser s_m satisfies c = h_mu / int tau dmu for the equilibrium
    measure of -s_m tau; the deviation is returned as ``stationarity``.
    """
    if not (s_inf.upper < c < h):
        raise ValueError(f"c={c} must lie in (s_inf upper, h_top) = ({s_inf.upper}, {h})")
    floor = s_inf.upper
    g = lambda s: shift.pressure(0.0, s) / (c - s)
    a, b = floor + 1e-9 * (c - floor), c - 1e-9 * (c - floor)
    grid = np.linspace(a, b, 41)[1:-1]
    vals = np.array([g(s) for s in grid])
    k = int(np.argmin(vals))
    lo = grid[k - 1] if k > 0 else a
    hi = grid[k + 1] if k + 1 < len(grid) else b
    if g(lo) > vals[k] < g(hi):
        res = optimize.minimize_scalar(g, bracket=(lo, grid[k], hi), method="golden", tol=tol)
    else:
        # minimum against the s_inf edge of the range
        res = optimize.minimize_scalar(g, bounds=(lo, hi), method="bounded",
                                       options={"xatol": tol * (c - floor)})
    s_m = float(res.x)
    md = shift.equilibrium(0.0, s_m)
    stat = abs(c - abramov(md))
    return CuspConstant(float(res.fun), s_m, float(c), float(stat), md)


@dataclass(frozen=True)
class EscapeTerm:
    n: int
    t: float
    M: float
    h_flow: float
    tau_mean: float


def escape_sequence(shift: GroupShift, n_terms=10, s_inf: ExponentEstimate | None = None,
                    M0=2.0 ** 10, M_cap=1e300, tol=1e-6):
    """Equilibrium measures on growing truncations whose mean roof exceeds n.

    Term n uses t_n = s_inf upper + 1/n and the least M (>= the previous
    one) with int tau dmu >= n.  When even M_cap does not push the mean roof
    past n, t is lowered inside [s_inf lower - 1/n, t_n] to the largest value
    that does.  Returns the list of terms; a partial list is returned with a
    warning if a term cannot be reached.
    """
    if s_inf is None:
        s_inf = s_infinity(shift)
    out = []
    M = float(M0)
    t_prev = np.inf
    for n in range(1, n_terms + 1):
        t = min(s_inf.upper + 1.0 / n, t_prev)
        tm = lambda tt, MM: shift.equilibrium(0.0, tt, None, MM).tau_mean
        MM = M
        while tm(t, MM) < n and MM * 2 <= M_cap:
            MM *= 2
        if tm(t, MM) < n:
            MM = M_cap
            lo = s_inf.lower - 1.0 / n
            if tm(lo, MM) < n:
                warnings.warn(f"escape term {n} not reached within the truncation cap")
                break
            hi = t
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if tm(mid, MM) >= n:
                    lo = mid
                else:
                    hi = mid
            t = lo
        md = shift.equilibrium(0.0, t, None, MM)
        out.append(EscapeTerm(n, float(t), float(MM), abramov(md), md.tau_mean))
        M, t_prev = MM, t
    return out
