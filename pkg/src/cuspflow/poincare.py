"""Poincare series: critical exponents of cyclic groups, free-product brackets, subgroup limits."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .hyperbolic import Isometry, classify, power_entries
from .schottky import GeneratorSpec, SchottkyGroup, triangle_constant, validate
from .series import DEFAULT_KAPPA, decay_exponents, verdict_from_exponents
from .shift import base_matrix_pressure

DEFAULT_M = 10 ** 4
BISECT_TOL = 1e-4
EPS_DETECT = 0.01


@dataclass(frozen=True)
class ExponentEstimate:
    lower: float
    upper: float
    method: str
    L: int | None = None
    M: int | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (0 <= self.lower <= self.upper):
            raise ValueError(f"invalid exponent bracket [{self.lower}, {self.upper}]")

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def midpoint(self):
        return 0.5 * (self.lower + self.upper)

    def contains(self, x, tol=0.0):
        return self.lower - tol <= x <= self.upper + tol


def _iso(g):
    return g.iso if isinstance(g, GeneratorSpec) else g


def _log_terms_setup(iso, M):
    ms = np.concatenate([np.arange(1, M + 1), -np.arange(1, M + 1)])
    return np.abs(ms), power_entries(iso, ms).origin_distance()


def series_verdict(d, abs_m, M, s, kappa=DEFAULT_KAPPA, critical_divergent=False):
    """Verdict for sum e^{-s d} from the dyadic decay of its last blocks below M."""
    e = decay_exponents(-s * d, abs_m, M)
    return verdict_from_exponents(e[-3:], kappa, critical_divergent), e


def _bisect(pred, lo, hi, tol):
    """Boundary of a monotone predicate: pred(lo) is True, pred(hi) False."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def cyclic_exponent(g, M=DEFAULT_M, tol=BISECT_TOL, kappa=DEFAULT_KAPPA,
                    eps_detect=EPS_DETECT) -> ExponentEstimate:
    """Critical exponent bracket of the cyclic group <g>.

    Parabolic: the lower end is the last s where the dyadic tail test of
    sum_{|m|<=M} e^{-s d(o, g^m o)} reads divergent, the upper end the first
    s where it reads finite.  Hyperbolic: the orbit distance grows linearly,
    so the series converges for every s > 0; the test is run at ``eps_detect``
    and the bracket is [0, eps_detect].
    """
    iso = _iso(g)
    cls = classify(iso)
    abs_m, d = _log_terms_setup(iso, M)
    if cls.kind == "hyperbolic":
        verdict, e = series_verdict(d, abs_m, M, eps_detect, kappa)
        if verdict != "finite":
            raise RuntimeError(f"cyclic hyperbolic series not resolved as finite at s={eps_detect}; increase M")
        return ExponentEstimate(0.0, float(eps_detect), "cyclic-hyperbolic", M=M,
                                info={"translation_length": cls.translation_length})
    if cls.kind != "parabolic":
        raise ValueError(f"{cls.kind} generators are not supported")
    div = lambda s: series_verdict(d, abs_m, M, s, kappa)[0] == "divergent"
    fin = lambda s: series_verdict(d, abs_m, M, s, kappa)[0] == "finite"
    lo, _ = _bisect(div, 0.0, 2.0, tol)
    _, hi = _bisect(lambda s: not fin(s), 0.0, 2.0, tol)
    return ExponentEstimate(float(lo), float(hi), "cyclic-parabolic", M=M, info={"kappa": kappa})


def delta_p_max(group: SchottkyGroup, M=DEFAULT_M, tol=BISECT_TOL) -> ExponentEstimate:
    """Elementwise max of the parabolic cyclic brackets."""
    pars = [g for g in group.generators if g.kind == "parabolic"]
    if not pars:
        raise ValueError("group has no parabolic generator")
    ests = [cyclic_exponent(g, M, tol) for g in pars]
    return ExponentEstimate(max(e.lower for e in ests), max(e.upper for e in ests), "delta-p-max",
                            M=M, info={"brackets": [(e.lower, e.upper) for e in ests]})


# ---------------------------------------------------------------------------
# free-product bracket for delta_Gamma
# ---------------------------------------------------------------------------

def _tail_majorant(iso, M, s):
    """log of an upper bound for sum_{|m| > M} e^{-s d(o, g^m o)}."""
    cls = classify(iso)
    if cls.kind == "hyperbolic":
        # d(o, g^m o) >= |m| l (minimal displacement)
        r = s * cls.translation_length
        return np.log(2.0) - r * (M + 1) - np.log(-np.expm1(-r))
    sgn = 1.0 if iso.trace > 0 else -1.0
    K = abs(sgn * iso.alpha - 1.0) + abs(iso.beta)
    # |alpha_m| + |beta_m| >= |m| K - 1, sum_{m > M} f(m) <= int_M^inf f
    if 2 * s <= 1:
        return np.inf
    if M * K <= 1:
        raise ValueError("power cap too small for the tail majorant")
    return np.log(2.0) + (1 - 2 * s) * np.log(M * K - 1) - np.log(K * (2 * s - 1))


class _Weights:
    def __init__(self, group, M):
        self.group = group
        self.M = M
        self.d = []
        for g in group.generators:
            ms = np.concatenate([np.arange(1, M + 1), -np.arange(1, M + 1)])
            self.d.append(power_entries(g.iso, ms).origin_distance())

    def log_w(self, s, tail=False):
        out = []
        for g, d in zip(self.group.generators, self.d):
            lw = logsumexp(-s * d)
            if tail:
                lw = np.logaddexp(lw, _tail_majorant(g.iso, self.M, s))
            out.append(lw)
        return np.array(out)

    def log_rho(self, s, tail=False):
        return base_matrix_pressure(self.log_w(s, tail))[0]


def _decreasing_root(f, lo, hi, tol=1e-10):
    """Root of a nonincreasing f on [lo, hi] (f may be +inf near lo)."""
    flo, fhi = f(lo), f(hi)
    k = 0
    while fhi > 0:
        lo, hi = hi, hi * 2
        fhi = f(hi)
        k += 1
        if k > 60:
            return np.inf
    if flo <= 0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def group_exponent_bracket(group: SchottkyGroup, M=DEFAULT_M, C=None, M_cap=2 ** 20,
                           tol=BISECT_TOL) -> ExponentEstimate:
    """Bracket delta_Gamma by the base matrices R(a, b) = W_s(b)[b != a].

    Lower: d(o, g o) <= sum of the letter distances, so the Poincare series
    dominates the matrix series; delta^- is the root of rho(R_M(s)) = 1,
    raised to the largest cyclic lower bracket (a subgroup cannot have a
    larger exponent).  Upper: d(o, g o) >= sum of letter distances - (k-1) C,
    so delta^+ is the root of s C + log rho(R(s)) = 0 with the full letter
    sums (tails bounded by majorants).
    """
    if C is None:
        C = group.C
    while True:
        wts = _Weights(group, M)
        if wts.log_rho(0.0) > 0:
            break
        if M >= M_cap:
            raise RuntimeError("could not bracket the lower exponent root")
        M *= 2
    lower_m = _decreasing_root(lambda s: wts.log_rho(s), 0.0, 1.0)
    cyc = [cyclic_exponent(g, min(M, DEFAULT_M), tol) for g in group.generators]
    lower = max([lower_m] + [c.lower for c in cyc])
    upper = _decreasing_root(lambda s: s * C + wts.log_rho(s, tail=True), max(lower_m, 1e-6), 1.0)
    upper = max(upper, lower)
    return ExponentEstimate(float(lower), float(upper), "free-product-matrix", M=M,
                            info={"C": float(C), "matrix_lower": float(lower_m),
                                  "cyclic": [(c.lower, c.upper) for c in cyc]})


def word_sum_exponent(group: SchottkyGroup, L=12) -> ExponentEstimate:
    """Exponent from sums over reduced free-group words of fixed length.

    S_k(s) = sum over reduced words g of length k in the generators and their
    inverses of e^{-s d(o, g o)}; the estimate is the root of S_L(s) = S_{L-1}(s).
    Intended for groups without parabolics, where the sums grow geometrically.
    """
    gens = []
    for g in group.generators:
        gens += [g.iso, g.iso.inverse()]
    k = len(gens)
    A = np.array([g.alpha for g in gens])
    B = np.array([g.beta for g in gens])
    inv = np.array([i ^ 1 for i in range(k)])
    # level 1
    alpha, beta, last = A.copy(), B.copy(), np.arange(k)
    logd = []
    for level in range(1, L + 1):
        d = 2.0 * np.log(np.abs(alpha) + np.abs(beta))
        logd.append(d)
        if level == L:
            break
        na, nb, nl = [], [], []
        for j in range(k):
            keep = last != inv[j]
            a0, b0 = alpha[keep], beta[keep]
            # (g h) entries: alpha = a0 A + b0 conj(B), beta = a0 B + b0 conj(A)
            na.append(a0 * A[j] + b0 * np.conj(B[j]))
            nb.append(a0 * B[j] + b0 * np.conj(A[j]))
            nl.append(np.full(keep.sum(), j))
        alpha, beta, last = np.concatenate(na), np.concatenate(nb), np.concatenate(nl)
    dL, dL1 = logd[-1], logd[-2]
    f = lambda s: logsumexp(-s * dL) - logsumexp(-s * dL1)
    lo, hi = 0.0, 1.0
    while f(hi) > 0:
        hi *= 2
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if f(mid) > 0 else (lo, mid)
    est = 0.5 * (lo + hi)
    return ExponentEstimate(est, est, "word-sum", L=L, info={"n_words": int(dL.size)})


# ---------------------------------------------------------------------------
# Gamma_n = <p, h^n>
# ---------------------------------------------------------------------------

class PingPongError(ValueError):
    pass


def subgroup_group(p, h, n, margin=0.05) -> SchottkyGroup:
    """The two-generator group <p, h^n> with automatic arcs, validated."""
    hp = _iso(h).power(n)
    pspec = p if isinstance(p, GeneratorSpec) else GeneratorSpec.auto("p", p, margin)
    hspec = GeneratorSpec.auto("h", hp, margin)
    try:
        grp = SchottkyGroup((hspec, pspec))
    except ValueError as exc:
        raise PingPongError(f"<p, h^{n}> not in Schottky position ({exc}); try a larger n") from exc
    rep = validate(grp)
    if not rep.passed:
        raise PingPongError(f"<p, h^{n}> fails {', '.join(r.name for r in rep.failures())}; try a larger n")
    return grp


def subgroup_exponent(p, h, n, M=DEFAULT_M, margin=0.05) -> ExponentEstimate:
    """group_exponent_bracket of Gamma_n = <p, h^n>."""
    grp = subgroup_group(p, h, n, margin)
    est = group_exponent_bracket(grp, M, C=triangle_constant(grp))
    est.info["n"] = n
    return est


def divergence_heuristic(g, schedule=(10 ** 3, 10 ** 4, 10 ** 5), s=None, kappa=DEFAULT_KAPPA):
    """Reads the growth of partial sums of the parabolic series at s.

    s defaults to the midpoint of the cyclic bracket.  Logarithmic growth
    (flat dyadic blocks, |e| < kappa) is read as likely-divergent, blocks
    decaying at rate >= kappa as likely-convergent.  The slope of the
    partial sums against log M is returned for inspection.
    """
    iso = _iso(g)
    if classify(iso).kind != "parabolic":
        raise ValueError("divergence heuristic applies to parabolic generators")
    if s is None:
        s = cyclic_exponent(iso).midpoint
    M = int(max(schedule))
    abs_m, d = _log_terms_setup(iso, M)
    terms = np.exp(-s * d)
    partial = [terms[abs_m <= Mk].sum() for Mk in schedule]
    slope = np.polyfit(np.log(schedule), partial, 1)[0] if len(schedule) > 1 else np.nan
    e = decay_exponents(-s * d, abs_m, M)[-3:]
    if np.all(np.abs(e) < kappa):
        verdict = "likely-divergent"
    elif np.all(e >= kappa):
        verdict = "likely-convergent"
    elif np.all(e <= -kappa):
        verdict = "likely-divergent"
    else:
        verdict = "inconclusive"
    return {"verdict": verdict, "s": float(s), "partial_sums": partial, "slope_vs_logM": float(slope),
            "exponents": e.tolist()}
