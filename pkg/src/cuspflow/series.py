"""Series helpers: dyadic tail-decay test and sums of m^{-x} (log m)^k over long ranges."""
from __future__ import annotations

import numpy as np
from scipy import special

from .kernels import block_logsums

DEFAULT_KAPPA = 0.01
N_BLOCKS = 4


def dyadic_blocks(abs_m, M, n_blocks=N_BLOCKS):
    """Label |m| in (M/2^{j+1}, M/2^j] with j; larger labels first in time order.

    Returns block labels ordered so that label n_blocks-1 is the outermost block.
    """
    abs_m = np.asarray(abs_m)
    idx = np.full(abs_m.shape, -1, dtype=np.int64)
    hi = float(M)
    for j in range(n_blocks):
        lo = hi / 2
        sel = (abs_m > lo) & (abs_m <= hi)
        idx[sel] = n_blocks - 1 - j
        hi = lo
    return idx


def decay_exponents(log_terms, abs_m, M, n_blocks=N_BLOCKS):
    """Local decay exponents e_j = -log2(B_{j+1} / B_j) of dyadic block sums.

    For terms ~ |m|^{-x} the block sums scale like 2^{(1-x) j}, so e = x - 1:
    positive means the tail is summable at a resolvable rate, zero is the
    harmonic (logarithmically divergent) case.
    """
    idx = dyadic_blocks(abs_m, M, n_blocks)
    logs = block_logsums(np.asarray(log_terms, dtype=float), idx, n_blocks)
    with np.errstate(invalid="ignore"):
        e = -(np.diff(logs)) / np.log(2.0)
    e = np.where(np.isneginf(logs[1:]), np.inf, e)
    return e


def verdict_from_exponents(e, kappa=DEFAULT_KAPPA, critical_divergent=False):
    """'finite', 'divergent' or 'inconclusive' from the last decay exponents.

    With ``critical_divergent`` the harmonic band |e| < kappa counts as
    divergent: that is the reading at a critical exponent of divergence type.
    """
    e = np.asarray(e)
    if np.all(e >= kappa):
        return "finite"
    if np.all(e <= -kappa):
        return "divergent"
    if critical_divergent and np.all(e < kappa):
        return "divergent"
    return "inconclusive"


def _log_integral(y, la, lb, k):
    """log of int_{la}^{lb} u^k e^{y u} du (u = log m), k in {0, 1}, lb may be inf."""
    if np.isinf(lb):
        if y >= 0:
            return np.inf
        # closed forms, no cancellation for y < 0
        if k == 0:
            return y * la - np.log(-y)
        return y * la + np.log(la / (-y) + 1.0 / y ** 2)
    if lb <= la:
        return -np.inf
    top = max(y * la, y * lb)
    if k == 0:
        w = lb - la
        if abs(y * w) < 1e-8:
            return y * la + np.log(w)
        # (e^{y lb} - e^{y la}) / y computed stably
        if y > 0:
            return y * lb + np.log(-np.expm1(-y * w)) - np.log(y)
        return y * la + np.log(-np.expm1(y * w)) - np.log(-y)
    w = lb - la
    if abs(y) * w < 1.0:
        # nearly polynomial integrand: Gauss-Legendre
        x, wt = np.polynomial.legendre.leggauss(24)
        u = la + (x + 1) * w / 2
        return top + np.log(w / 2 * (wt @ (u * np.exp(y * u - top))))
    # int u e^{yu} du = e^{yu} (u/y - 1/y^2)
    hi = np.exp(y * lb - top) * (lb / y - 1 / y ** 2)
    lo = np.exp(y * la - top) * (la / y - 1 / y ** 2)
    return top + np.log(hi - lo)


def power_log_sums(x, a, b, direct=2048):
    """log S0 and S1/S0 for S0 = sum m^{-x}, S1 = sum m^{-x} log m over a <= m < b.

    ``b`` may be ``inf`` (then x > 1 is needed for finiteness).  Up to
    ``direct`` leading terms are summed explicitly (only while m is exactly
    representable), the rest by Euler-Maclaurin with the first derivative
    correction.  Everything is scaled by the largest term.
    """
    a = float(a)
    b = float(b)
    if b <= a:
        return -np.inf, 0.0
    if np.isinf(b) and x <= 1:
        return np.inf, np.inf
    la = np.log(a)
    lb = np.log(b) if np.isfinite(b) else np.inf
    top = -x * la if (x >= 0 or np.isinf(b)) else -x * lb
    cut = min(b, a + direct) if a < 1e7 else a
    head0 = head1 = 0.0
    if cut > a:
        ms = np.arange(a, cut)
        lm = np.log(ms)
        w = np.exp(-x * lm - top)
        head0, head1 = w.sum(), (w * lm).sum()
    if cut >= b:
        return top + np.log(head0), head1 / head0
    l0 = np.log(cut)
    i0 = _log_integral(1.0 - x, l0, lb, 0)
    i1 = _log_integral(1.0 - x, l0, lb, 1)

    # sum_{n0}^{b-1} f = int_{n0}^{b} f + (f(n0) - f(b))/2 - (f'(n0) - f'(b))/12 + ...
    def corr(n, ln, sgn):
        if np.isinf(n):
            return 0.0, 0.0
        base = np.exp(-x * ln - top)
        d0 = -x * base / n
        d1 = base * (1.0 - x * ln) / n
        return sgn * (base / 2 - d0 / 12), sgn * (base * ln / 2 - d1 / 12)

    ca = corr(cut, l0, 1.0)
    cb = corr(b, lb, -1.0)
    s0 = head0 + np.exp(i0 - top) + ca[0] + cb[0]
    s1 = head1 + np.exp(i1 - top) + ca[1] + cb[1]
    return top + np.log(s0), s1 / s0


def hurwitz_tail(x, start):
    """sum_{m >= start} m^{-x} for x > 1 via the Hurwitz zeta function."""
    if x <= 1:
        return np.inf
    return float(special.zeta(x, start))


def geometric_log_sums(rate, a, b):
    """log S0 and S1/S0 for S0 = sum e^{-rate m}, S1 = sum m e^{-rate m}, a <= m < b."""
    if b <= a:
        return -np.inf, 0.0
    if rate <= 0 and np.isinf(b):
        return np.inf, np.inf
    q = np.exp(-rate)
    n = np.inf if np.isinf(b) else b - a
    if np.isinf(n):
        log_s0 = -rate * a - np.log1p(-q)
        mean = a + q / (1 - q)
        return log_s0, mean
    if abs(rate) < 1e-12:
        return np.log(n), a + (n - 1) / 2
    log_s0 = -rate * a + np.log(-np.expm1(-rate * n)) - np.log(-np.expm1(-rate)) if rate > 0 else \
        -rate * (b - 1) + np.log(-np.expm1(rate * n)) - np.log(-np.expm1(rate))
    # mean of m under geometric weights on a finite window
    if rate > 0:
        qn = np.exp(-rate * n)
        mean = a + q / (1 - q) - n * qn / (1 - qn)
    else:
        r = -rate
        qn = np.exp(-r * n)
        mean = (b - 1) - (np.exp(-r) / (1 - np.exp(-r)) - n * qn / (1 - qn))
    return log_s0, mean
