"""Class-F potentials, the pressure curve t -> P_g(tf) and its phase transition."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .hyperbolic import classify, power_entries
from .poincare import ExponentEstimate
from .shift import GroupShift, MeasureData, TauAffine, gurevich_pressure
from .suspension import SCAN_WIDTH, NoSignChangeError, abramov, flow_pressure, kac

FLAT_TOL = 1e-6
N_CAP = 1e300
F2_THRESHOLD = 0.05


# ---------------------------------------------------------------------------
# epsilon_n with sum a_n^{t* + eps_n} < infinity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerMajorant:
    """a_n <= K n^{-q} for every n >= 1, with an optional exact rule for a_n."""

    K: float
    q: float
    rule: Callable | None = None

    def tail_bound(self, x, N):
        """Upper bound of sum_{n >= N} a_n^x  (needs q x > 1)."""
        qx = self.q * x
        if qx <= 1:
            return np.inf
        return self.K ** x * (N ** -qx + N ** (1 - qx) / (qx - 1))

    def log_tail_bound(self, x, logN):
        qx = self.q * x
        if qx <= 1:
            return np.inf
        return x * np.log(self.K) + np.logaddexp(-qx * logN, (1 - qx) * logN - np.log(qx - 1))

    @classmethod
    def orbit(cls, iso, n_exact=10 ** 4):
        """a_n = e^{-d(o, p^n o)} for a parabolic p, with a certified constant K."""
        if classify(iso).kind != "parabolic":
            raise ValueError("orbit majorant needs a parabolic isometry")
        ns = np.arange(1, n_exact + 1)
        a = np.exp(-power_entries(iso, ns).origin_distance())
        sgn = 1.0 if iso.trace > 0 else -1.0
        Kp = abs(sgn * iso.alpha - 1.0) + abs(iso.beta)
        # n > n_exact: |alpha_n| + |beta_n| >= n Kp - 1
        if n_exact * Kp <= 1:
            raise ValueError("parabolic too weak for the orbit majorant")
        K = max(float((a * ns ** 2).max()), 1.0 / (Kp - 1.0 / n_exact) ** 2)
        rule = lambda n: np.exp(-power_entries(iso, np.asarray(n)).origin_distance())
        return cls(K, 2.0, rule)

    @classmethod
    def power(cls, q, K=1.0):
        """a_n = K n^{-q} exactly."""
        return cls(K, q, lambda n: K * np.asarray(n, dtype=float) ** -q)


@dataclass(frozen=True)
class EpsilonSchedule:
    """eps_n = 1 for n < N_1 and eps_n = alpha_m = 1/m for N_m <= n < N_{m+1}."""

    starts: tuple
    alphas: tuple
    t_star: float

    def __call__(self, n):
        n = np.asarray(n, dtype=float)
        k = np.searchsorted(np.array(self.starts), n, side="right") - 1
        vals = np.where(k >= 0, np.array(self.alphas)[np.maximum(k, 0)], 1.0)
        return vals if vals.ndim else float(vals)

    def pieces(self):
        """(start, eps) pairs covering n >= 1."""
        out = []
        if self.starts[0] > 1:
            out.append((1, 1.0))
        out += list(zip(self.starts, self.alphas))
        return out


def epsilon_schedule(majorant: PowerMajorant, t_star, n_cap=N_CAP) -> EpsilonSchedule:
    """N_m = least N with sum_{n >= N} a_n^{t* + 1/m} < 1/m^2 (via the majorant)."""
    if majorant is None:
        raise ValueError("a tail majorant is required to build the schedule")
    starts, alphas = [], []
    m = 1
    prev = 1.0
    while True:
        alpha = 1.0 / m
        x = t_star + alpha
        target = -2 * np.log(m)
        if not np.isfinite(majorant.log_tail_bound(x, 0.0)):
            raise ValueError("majorant does not give a finite tail at t* + 1/m")
        if majorant.log_tail_bound(x, np.log(prev)) < target:
            N = prev
        else:
            lo, hi = np.log(prev), np.log(prev) + 1.0
            while majorant.log_tail_bound(x, hi) >= target:
                hi = lo + 2 * (hi - lo)
                if hi > np.log(n_cap) + 50:
                    break
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if majorant.log_tail_bound(x, mid) < target:
                    hi = mid
                else:
                    lo = mid
            N = float(np.ceil(np.exp(hi))) if hi < 690 else float(np.exp(hi))
        if N > n_cap:
            break
        if starts and N <= starts[-1]:
            alphas[-1] = alpha
        else:
            starts.append(N)
            alphas.append(alpha)
        prev = starts[-1]
        m += 1
    return EpsilonSchedule(tuple(starts), tuple(alphas), float(t_star))


def epsilon_sequence(majorant: PowerMajorant, t_star, count) -> np.ndarray:
    """eps_1 ... eps_count."""
    return epsilon_schedule(majorant, t_star)(np.arange(1, count + 1))


# ---------------------------------------------------------------------------
# potentials of class F
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PotentialSpecF:
    """Delta_f of a potential in class F.

    kind = "example61": Delta = eps_m tau on the cylinders of the target
    parabolic letters p^m and 1 elsewhere; "constant": Delta = 1;
    "custom-table": an explicit ``TauAffine``.
    """

    kind: str
    targets: tuple = ()
    schedules: dict = field(default_factory=dict)
    table: TauAffine | None = None

    @classmethod
    def example61(cls, group, targets=None, t_star=0.5):
        if targets is None:
            targets = tuple(i for i, g in enumerate(group.generators) if g.kind == "parabolic")
        scheds = {}
        for i in targets:
            g = group.generators[i]
            if g.kind != "parabolic":
                raise ValueError("example61 targets must be parabolic generators")
            scheds[i] = epsilon_schedule(PowerMajorant.orbit(g.iso), t_star)
        return cls("example61", tuple(targets), scheds)

    @classmethod
    def constant(cls):
        return cls("constant")

    @classmethod
    def custom(cls, table: TauAffine):
        return cls("custom-table", table=table)

    def delta(self, n_bases) -> TauAffine:
        if self.kind == "constant":
            return TauAffine.constant(n_bases, 1.0)
        if self.kind == "custom-table":
            return self.table
        pieces = []
        for b in range(n_bases):
            if b in self.targets:
                pieces.append(tuple((float(st), 0.0, float(e)) for st, e in self.schedules[b].pieces()))
            else:
                pieces.append(((1, 1.0, 0.0),))
        return TauAffine(tuple(pieces))


@dataclass(frozen=True)
class FCheck:
    f1: bool
    f2: bool
    f1_min: float
    profile: tuple


def check_F(spec: PotentialSpecF, shift: GroupShift, n_samples=60, threshold=F2_THRESHOLD) -> FCheck:
    """F1: Delta bounded away from 0 on cylinders; F2: sup Delta / inf tau -> 0.

    Cylinders C_{a^m} are ordered by d(o, a^m o); on each, sup Delta is
    bounded with tau <= d and inf tau with tau >= max(d - C, tau_min).
    """
    delta = spec.delta(shift.n_bases)
    C = shift.group.C
    f1_min = np.inf
    prof = []
    ms = np.unique(np.round(np.logspace(0, 299, n_samples)))
    for b in range(shift.n_bases):
        for sgn in (1, -1):
            tab = np.arange(1, shift.table_size + 1)
            d0, d1 = delta.coefficients(b, tab)
            tau = shift.tau(b, sgn * tab)
            f1_min = min(f1_min, float((d0 + d1 * tau).min()))
            for _, st0, st1 in delta.pieces[b]:
                if st0 < 0 or st1 < 0:
                    f1_min = -np.inf
            d0s, d1s = delta.coefficients(b, ms)
            dist = np.array([shift.distance(b, sgn * m) for m in ms])
            lo_tau = np.maximum(dist - C, shift.tau_min)
            ratio = (d0s + d1s * dist) / lo_tau
            prof.append(ratio)
    prof = np.max(np.array(prof), axis=0)
    tail = prof[-max(3, len(prof) // 4):]
    f2 = bool(tail.max() < threshold and prof[-1] <= prof[0])
    return FCheck(bool(f1_min > 0), f2, float(f1_min), tuple(zip(ms.tolist(), prof.tolist())))


# ---------------------------------------------------------------------------
# pressure curve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvePoint:
    t: float
    value: float
    flat_certified: bool
    M: float
    error: float
    note: str = ""


@dataclass(frozen=True)
class PressureCurve:
    points: tuple

    @property
    def t(self):
        return np.array([p.t for p in self.points])

    @property
    def values(self):
        return np.array([p.value for p in self.points])

    @property
    def flat(self):
        return np.array([p.flat_certified for p in self.points])


def curve_point(spec, shift, t, s_inf: ExponentEstimate, tol=FLAT_TOL, root_tol=1e-10) -> CurvePoint:
    """P_g(tf) at one t: s_inf if P(t Delta - (s_inf upper + tol) tau) <= 0, else the flow root."""
    delta = spec.delta(shift.n_bases)
    s0 = s_inf.upper + tol
    try:
        p0 = shift.pressure(t, s0, delta)
    except Exception as exc:  # recorded, not fatal
        return CurvePoint(t, np.nan, False, np.inf, np.inf, f"failed: {exc}")
    if p0 <= 0:
        return CurvePoint(t, s_inf.upper, True, np.inf, s_inf.width)
    try:
        res = flow_pressure(shift, delta, t, root_tol, scan=(s0, s0 + 50.0))
    except NoSignChangeError as exc:
        return CurvePoint(t, np.nan, False, np.inf, np.inf, f"failed: {exc}")
    return CurvePoint(t, res.value, False, np.inf, max(abs(res.residual), root_tol))


def pressure_curve(spec, shift, t_grid, s_inf: ExponentEstimate, tol=FLAT_TOL, threads=1) -> PressureCurve:
    """P_g(tf) on a grid (with extension by zero, P_g = P_{Omega_0})."""
    t_grid = [float(t) for t in t_grid]
    if threads and threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(threads) as ex:
            pts = list(ex.map(lambda t: curve_point(spec, shift, t, s_inf, tol), t_grid))
    else:
        pts = [curve_point(spec, shift, t, s_inf, tol) for t in t_grid]
    return PressureCurve(tuple(pts))


# ---------------------------------------------------------------------------
# transition detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransitionReport:
    t_prime: tuple
    classification: str
    evidence: tuple
    curve: PressureCurve | None
    consistent: bool

    @property
    def t_prime_finite(self):
        return np.isfinite(self.t_prime[0]) and np.isfinite(self.t_prime[1])


def evidence_verdict(spec, shift, t, s_inf: ExponentEstimate):
    """Finite/divergent verdict of P(t Delta - s_inf tau) at the bracket midpoint."""
    delta = spec.delta(shift.n_bases)
    return gurevich_pressure(shift, t, s_inf.midpoint, delta, critical_divergent=True).verdict


def detect_t_prime(spec, shift, s_inf: ExponentEstimate, t_grid=None, tol=1e-4,
                   curve: PressureCurve | None = None) -> TransitionReport:
    """Classify t -> P_g(tf) from the verdicts of P(t Delta - s_inf tau).

    Finite somewhere: phase transition, with t' bracketed by bisection on
    the flat certification of the curve.  Divergent at every grid point:
    real analytic on the scanned range (t' = -inf).
    """
    if t_grid is None:
        t_grid = np.concatenate([-np.logspace(2, -2, 17), [0.0], np.logspace(-2, 1, 7)])
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    ev = tuple((float(t), evidence_verdict(spec, shift, t, s_inf)) for t in t_grid)
    verdicts = [v for _, v in ev]
    flat = lambda t: curve_point(spec, shift, t, s_inf).flat_certified
    if "finite" in verdicts:
        cls = "phase-transition"
        t_fin = max(t for t, v in ev if v == "finite")
        lo = t_fin
        if not flat(lo):
            lo = min(t_grid)
            if not flat(lo):
                return TransitionReport((-np.inf, np.inf), "inconclusive", ev, curve, False)
        hi = lo + 1.0
        while flat(hi):
            lo, hi = hi, hi + 2 * (hi - lo)
            if hi > 1e6:
                break
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if flat(mid):
                lo = mid
            else:
                hi = mid
        t_prime = (float(lo), float(hi))
        consistent = not flat(hi + 1.0)
    elif all(v == "divergent" for v in verdicts):
        cls = "real-analytic-everywhere"
        t_prime = (-np.inf, -np.inf)
        consistent = not flat(max(0.0, t_grid.max()))
    else:
        cls = "inconclusive"
        t_prime = (-np.inf, np.inf)
        consistent = False
    return TransitionReport(t_prime, cls, ev, curve, bool(consistent))


def oscillation(spec, shift, t):
    """sup(t f) - inf(t f) estimated per cylinder by Delta / tau (Kac normalisation)."""
    delta = spec.delta(shift.n_bases)
    ratios = []
    for b in range(shift.n_bases):
        tab = np.arange(1, shift.table_size + 1)
        d0, d1 = delta.coefficients(b, tab)
        for sgn in (1, -1):
            tau = shift.tau(b, sgn * tab)
            ratios.append((d0 + d1 * tau) / tau)
        # tail limit as tau -> inf
        for _, dd0, dd1 in delta.pieces[b]:
            ratios.append(np.array([dd1]))
    r = np.concatenate(ratios)
    return abs(t) * float(r.max() - r.min())


def oscillation_check(spec, shift, t, h: float, s_inf: ExponentEstimate) -> bool:
    """True when sup tf - inf tf < h_top - s_inf (an equilibrium measure is predicted)."""
    return oscillation(spec, shift, t) < h - s_inf.upper


@dataclass(frozen=True)
class EquilibriumReport:
    exists: str
    measure: MeasureData | None
    pressure: float | None
    residual: float | None
    reason: str


def equilibrium_report(spec, shift, t, report: TransitionReport, s_inf: ExponentEstimate,
                       M=np.inf, tol=1e-8) -> EquilibriumReport:
    """Existence of an equilibrium measure for t f from the position of t relative to t'."""
    lo, hi = report.t_prime
    if report.classification == "real-analytic-everywhere" or t > hi:
        delta = spec.delta(shift.n_bases)
        if np.isfinite(M):
            res = flow_pressure(shift, delta, t, tol, M=M, scan=(s_inf.upper, s_inf.upper + 1.0))
        else:
            try:
                res = flow_pressure(shift, delta, t, tol, s_inf_upper=s_inf.upper)
            except NoSignChangeError:
                # root inside the s_infinity band: scan from the band's lower edge
                res = flow_pressure(shift, delta, t, tol, scan=(s_inf.lower, s_inf.upper + SCAN_WIDTH))
        md = shift.equilibrium(t, res.value, delta, M)
        resid = abs(abramov(md) + t * kac(md) - res.value)
        return EquilibriumReport("exists", md, res.value, resid,
                                 "pressure root with finite mean roof (right of t')")
    if t < lo:
        return EquilibriumReport("not-exists", None, s_inf.upper, None,
                                 "left of t' the curve is flat at s_infinity: no equilibrium measure")
    return EquilibriumReport("undetermined", None, None, None, "t lies inside the t' bracket")
