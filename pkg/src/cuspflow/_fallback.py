"""Pure numpy implementations of the hot loops (used when the extension is absent)."""
import numpy as np


def weighted_moments(phi, tau, delta):
    """log sum e^phi and the e^phi-weighted means of tau, phi and delta."""
    phi = np.asarray(phi, dtype=float)
    if phi.size == 0:
        return -np.inf, 0.0, 0.0, 0.0
    top = phi.max()
    if not np.isfinite(top):
        return top, 0.0, 0.0, 0.0
    w = np.exp(phi - top)
    s = w.sum()
    return (top + np.log(s), float(w @ tau) / s, float(w @ phi) / s, float(w @ delta) / s)


def roof_values(a, b, kappa, eta):
    """Mean, min and max over eta of 2 kappa + 2 log |a eta + b|, row-wise."""
    v = 2.0 * np.log(np.abs(a[:, None] * eta[None, :] + b[:, None]))
    v += 2.0 * kappa[:, None]
    return v.mean(axis=1), v.min(axis=1), v.max(axis=1)


def periodic_log_traces(log_q, start, n_max):
    """log (Q^n)_{start,start} for n = 1..n_max, Q = exp(log_q), in the log domain."""
    n = log_q.shape[0]
    cur = np.full(n, -np.inf)
    cur[start] = 0.0
    out = np.empty(n_max)
    for k in range(n_max):
        z = cur[:, None] + log_q
        top = z.max(axis=0)
        safe = np.where(np.isfinite(top), top, 0.0)
        with np.errstate(divide="ignore"):
            cur = safe + np.log(np.exp(z - safe[None, :]).sum(axis=0))
        cur[~np.isfinite(top)] = -np.inf
        out[k] = cur[start]
    return out


def block_logsums(phi, block_index, n_blocks):
    """log sum e^phi over each block label in [0, n_blocks); -1 labels are skipped."""
    out = np.full(n_blocks, -np.inf)
    for j in range(n_blocks):
        sel = phi[block_index == j]
        if sel.size:
            top = sel.max()
            if np.isfinite(top):
                out[j] = top + np.log(np.exp(sel - top).sum())
    return out
