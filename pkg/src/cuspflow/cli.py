"""Command-line entry point: ``cuspflow <command> [--config PATH] [--out DIR] ...``.

Each command writes ``<command>.csv`` (header row, floats with 12
significant digits, +inf written as ``divergent``) and a text report
``<command>.txt`` into the output directory; the report is echoed to stdout.
"""
from __future__ import annotations

import argparse
import csv
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .poincare import (
    cyclic_exponent,
    delta_p_max,
    divergence_heuristic,
    group_exponent_bracket,
    subgroup_exponent,
)
from .schottky import ConditionViolation, check_c5, validate
from .shift import GroupShift, structural_checks
from .suspension import cusp_constant, escape_sequence, h_top, s_infinity
from .transitions import PotentialSpecF, detect_t_prime, pressure_curve

COMMANDS = ("check-group", "exponents", "s-infinity", "h-top", "pressure-curve",
            "phase-transition", "escape-mass", "cusp-constant", "subgroup-limit")


def fmt(x):
    """CSV cell: 12 significant digits for floats, ``divergent`` for +inf."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if np.isposinf(x):
            return "divergent"
        return "%.12g" % x
    return str(x)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


class _Ctx:
    """Lazily built objects shared by the commands of one run."""

    def __init__(self, cfg: RunConfig, tol):
        self.cfg = cfg
        self.tol = tol
        self._shift = self._s_inf = self._bracket = self._h = None

    @property
    def num(self):
        return self.cfg.numerics

    @property
    def cmd(self):
        return self.cfg.commands

    @property
    def shift(self):
        if self._shift is None:
            self._shift = GroupShift(self.cfg.group, int(self.num["table_size"]))
        return self._shift

    @property
    def s_inf(self):
        if self._s_inf is None:
            self._s_inf = s_infinity(self.shift, kappa=float(self.num["kappa"]),
                                     M_max=float(self.num["M_max"]))
        return self._s_inf

    @property
    def bracket(self):
        if self._bracket is None:
            self._bracket = group_exponent_bracket(self.cfg.group)
        return self._bracket

    @property
    def h(self):
        if self._h is None:
            with warnings.catch_warnings(record=True):
                warnings.simplefilter("always")
                self._h = h_top(self.shift, self.s_inf, bracket=self.bracket)
        return self._h

    def potential(self):
        kind = self.cmd.get("potential", "example61")
        if kind == "example61":
            return PotentialSpecF.example61(self.cfg.group, t_star=float(self.cmd.get("t_star", 0.5)))
        if kind == "constant":
            return PotentialSpecF.constant()
        raise ConfigError(f"unknown potential {kind!r} (expected 'example61' or 'constant')")


# ---------------------------------------------------------------------------
# commands: each returns (header, rows, report lines, exit status)
# ---------------------------------------------------------------------------

def cmd_check_group(ctx: _Ctx, args):
    g = ctx.cfg.group
    rep = validate(g, grid=int(ctx.num["validation_grid"]))
    rows = []
    for r in (rep.c1, rep.c2, rep.c3) + tuple(rep.extra):
        rows.append((r.name, r.passed, r.margin, r.generator or "", np.nan if r.witness is None else r.witness,
                     r.detail))
    for gen in g.generators:
        if gen.kind == "parabolic":
            v = divergence_heuristic(gen.iso)["verdict"]
            rows.append(("C4", v != "likely-convergent", np.nan, gen.label, np.nan, f"heuristic: {v}"))
    c5 = check_c5(g)
    rows.append(("C5", c5 > 0, c5, "", np.nan, "min Busemann B_xi(a o, o) over arcs"))
    n = len(g.generators)
    star = bool(c5 > 0 and n >= 3)
    rows.append(("star", star, c5, "", np.nan, f"C5 and N1+N2 >= 3 (N1+N2 = {n})"))
    st = structural_checks(g)
    rows.append(("BIP", st.bip, np.nan, "", np.nan, "witness: base alphabet"))
    rows.append(("mixing", st.mixing, np.nan, "", np.nan, "connector words verified" if st.mixing else
                 "needs N1+N2 >= 3"))
    required = [rep.c1, rep.c2, rep.c3] + list(rep.extra)
    ok = all(r.passed for r in required) and c5 > 0
    lines = [f"group: {', '.join(f'{x.label} ({x.kind})' for x in g.generators)}  xi0 = {g.xi0:.6f}"]
    for name, passed, margin, gen, _, detail in rows:
        m = "" if not np.isfinite(margin) else f"  margin {margin:.6g}"
        word = ("yes" if passed else "no") if name in ("star", "BIP", "mixing") else ("pass" if passed else "FAIL")
        lines.append(f"  {name:<26s} {word}{m}  {gen} {detail}".rstrip())
    lines.append(f"C1-C5: {'pass' if ok else 'FAIL'}   property (star): {'holds' if star else 'does not hold'}")
    status = 0
    if not ok:
        bad = [r[0] for r in rows if not r[1] and r[0] not in ("C4", "star", "BIP", "mixing")]
        lines.append("failed conditions: " + ", ".join(bad))
        status = 2
    return ("condition", "passed", "margin", "generator", "witness", "detail"), rows, lines, status


def cmd_exponents(ctx: _Ctx, args):
    g = ctx.cfg.group
    rows = []
    for gen in g.generators:
        e = cyclic_exponent(gen, tol=float(args.tol or 1e-4))
        rows.append((gen.label, gen.kind, e.lower, e.upper, e.method))
    b = ctx.bracket
    rows.append(("group", "free-product", b.lower, b.upper, b.method))
    dp = delta_p_max(g)
    rows.append(("delta_p_max", "parabolic", dp.lower, dp.upper, dp.method))
    lines = [f"  {r[0]:<12s} [{fmt(r[2])}, {fmt(r[3])}]  ({r[4]})" for r in rows]
    lines.append(f"triangle constant C = {fmt(b.info['C'])}")
    return ("name", "kind", "lower", "upper", "method"), rows, lines, 0


def cmd_s_infinity(ctx: _Ctx, args):
    s = ctx.s_inf
    dp = delta_p_max(ctx.cfg.group)
    overlap = max(s.lower, dp.lower) <= min(s.upper, dp.upper)
    width = max(s.upper, dp.upper) - min(s.lower, dp.lower)
    rows = [("s_infinity", s.lower, s.upper), ("delta_p_max", dp.lower, dp.upper)]
    lines = [f"s_infinity  in [{fmt(s.lower)}, {fmt(s.upper)}]",
             f"delta_p_max in [{fmt(dp.lower)}, {fmt(dp.upper)}]",
             f"brackets overlap: {overlap}; combined width {fmt(width)}"]
    return ("quantity", "lower", "upper"), rows, lines, 0


def cmd_h_top(ctx: _Ctx, args):
    h = ctx.h
    s = ctx.s_inf
    b = ctx.bracket
    gap = h.value - s.upper
    rows = [(h.value, h.residual, b.lower, b.upper, bool(h.info.get("consistent")), s.lower, s.upper, gap)]
    lines = [f"h_top = {fmt(h.value)}  (residual {h.residual:.2e})",
             f"delta_Gamma bracket [{fmt(b.lower)}, {fmt(b.upper)}]  contains h_top: {h.info.get('consistent')}",
             f"s_infinity bracket [{fmt(s.lower)}, {fmt(s.upper)}]; gap h_top - s_inf upper = {fmt(gap)}"]
    return ("h_top", "residual", "delta_lower", "delta_upper", "consistent", "s_inf_lower", "s_inf_upper",
            "gap"), rows, lines, 0


def _t_grid(ctx, args):
    t_min = args.t_min if args.t_min is not None else float(ctx.cmd["t_min"])
    t_max = args.t_max if args.t_max is not None else float(ctx.cmd["t_max"])
    steps = args.t_steps if args.t_steps is not None else int(ctx.cmd["t_steps"])
    return np.linspace(t_min, t_max, steps)


def cmd_pressure_curve(ctx: _Ctx, args):
    grid = _t_grid(ctx, args)
    threads = args.threads if args.threads is not None else int(ctx.num["threads"])
    tol = float(args.tol) if args.tol is not None else float(ctx.num["tol"])
    curve = pressure_curve(ctx.potential(), ctx.shift, grid, ctx.s_inf, tol=tol, threads=threads)
    rows = [(p.t, p.value, p.flat_certified, "inf" if np.isposinf(p.M) else p.M, p.error) for p in curve.points]
    flat = curve.flat
    lines = [f"{len(grid)} points on [{fmt(grid[0])}, {fmt(grid[-1])}]; s_infinity band "
             f"[{fmt(ctx.s_inf.lower)}, {fmt(ctx.s_inf.upper)}]",
             f"flat-certified points: {int(flat.sum())}"]
    if flat.any() and not flat.all():
        lines.append(f"last flat t = {fmt(curve.t[flat].max())}, first analytic t = {fmt(curve.t[~flat].min())}")
    failed = [p for p in curve.points if p.note.startswith("failed")]
    if failed:
        lines.append(f"{len(failed)} points failed: {failed[0].note}")
    return ("t", "value", "flat_certified", "M", "error"), rows, lines, 0


def cmd_phase_transition(ctx: _Ctx, args):
    rep = detect_t_prime(ctx.potential(), ctx.shift, ctx.s_inf)
    lo, hi = rep.t_prime
    edge = lambda x: x if np.isfinite(x) else ("-inf" if x < 0 else "inf")
    rows = [(rep.classification, edge(lo), edge(hi), rep.consistent)]
    lines = [f"classification: {rep.classification}",
             f"t' bracket: [{fmt(lo)}, {fmt(hi)}]",
             f"evidence consistent with the curve: {rep.consistent}",
             "evidence (t: verdict of P(t Delta - s_inf tau)):"]
    lines += [f"  {fmt(t)}: {v}" for t, v in rep.evidence]
    return ("classification", "t_prime_lower", "t_prime_upper", "consistent"), rows, lines, 0


def cmd_escape_mass(ctx: _Ctx, args):
    n_terms = int(ctx.cmd["n_terms"])
    terms = escape_sequence(ctx.shift, n_terms, ctx.s_inf)
    rows = [(e.n, e.t, e.M, e.h_flow, e.tau_mean) for e in terms]
    lines = [f"  n={e.n:<3d} t={fmt(e.t):<16s} M={fmt(e.M):<12s} h={fmt(e.h_flow):<16s} "
             f"int tau = {fmt(e.tau_mean)}" for e in terms]
    if terms:
        lines.append(f"final entropy {fmt(terms[-1].h_flow)} vs s_infinity band "
                     f"[{fmt(ctx.s_inf.lower)}, {fmt(ctx.s_inf.upper)}]")
    status = 0 if len(terms) == n_terms else 1
    return ("n", "t", "M", "h_flow", "tau_mean"), rows, lines, status


def cmd_cusp_constant(ctx: _Ctx, args):
    c = ctx.cmd.get("c")
    if c is None:
        c = 0.5 * (ctx.s_inf.upper + ctx.h.value)
    cc = cusp_constant(ctx.shift, float(c), ctx.s_inf, ctx.h.value)
    rows = [(cc.c, cc.value, cc.s_min, cc.stationarity)]
    lines = [f"c = {fmt(cc.c)}: C(c) = {fmt(cc.value)} attained at s = {fmt(cc.s_min)}",
             f"stationarity |c - h_mu / int tau| = {cc.stationarity:.3g}",
             "every invariant measure with flow entropy >= c has int tau dmu <= C(c)"]
    return ("c", "C", "s_min", "stationarity"), rows, lines, 0


def cmd_subgroup_limit(ctx: _Ctx, args):
    g = ctx.cfg.group
    powers = args.powers if args.powers is not None else [int(x) for x in ctx.cmd["powers"]]
    par = [x for x in g.generators if x.kind == "parabolic"]
    hyp = [x for x in g.generators if x.kind == "hyperbolic"]
    if not par or not hyp:
        raise ConfigError("subgroup-limit needs a parabolic and a hyperbolic generator")
    p, h = par[0].iso, hyp[0].iso
    rows = []
    for n in powers:
        e = subgroup_exponent(p, h, n)
        rows.append((n, e.lower, e.upper))
    lines = [f"  n={r[0]:<4d} delta in [{fmt(r[1])}, {fmt(r[2])}]" for r in rows]
    lines.append(f"Gamma_n = <{par[0].label}, {hyp[0].label}^n>; upper brackets decrease toward 0.5")
    return ("n", "delta_lower", "delta_upper"), rows, lines, 0


HANDLERS = {
    "check-group": cmd_check_group,
    "exponents": cmd_exponents,
    "s-infinity": cmd_s_infinity,
    "h-top": cmd_h_top,
    "pressure-curve": cmd_pressure_curve,
    "phase-transition": cmd_phase_transition,
    "escape-mass": cmd_escape_mass,
    "cusp-constant": cmd_cusp_constant,
    "subgroup-limit": cmd_subgroup_limit,
}


def _powers(text):
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("powers must be a comma-separated list of integers") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("powers must be positive integers")
    return vals


def build_parser():
    ap = argparse.ArgumentParser(prog="cuspflow", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", default="two-generator",
                    help="TOML config file or a built-in name (two-generator, three-generator)")
    ap.add_argument("--out", default=".", help="output directory for CSV and report")
    ap.add_argument("--tol", type=float, default=None, help="tolerance override")
    ap.add_argument("--threads", type=int, default=None, help="worker threads for grid evaluations")
    ap.add_argument("--t-min", type=float, default=None)
    ap.add_argument("--t-max", type=float, default=None)
    ap.add_argument("--t-steps", type=int, default=None)
    ap.add_argument("--powers", type=_powers, default=None, help="e.g. 1,2,4,8,16")
    return ap


def run(command, config: RunConfig, out=".", args=None) -> int:
    """Run one command; writes ``<command>.csv`` and ``<command>.txt`` under ``out``."""
    if args is None:
        args = build_parser().parse_args([command])
    ctx = _Ctx(config, args.tol)
    t0 = time.perf_counter()
    header, rows, lines, status = HANDLERS[command](ctx, args)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    stem = command.replace("-", "_")
    write_csv(out / f"{stem}.csv", header, rows)
    report = [f"cuspflow {command}  (config {config.source})"] + lines
    report.append(f"elapsed {time.perf_counter() - t0:.2f} s")
    (out / f"{stem}.txt").write_text("\n".join(report) + "\n")
    print("\n".join(report))
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, check=args.command != "check-group")
    except ConditionViolation as exc:
        print(f"error: condition {exc.result.name} violated: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    try:
        return run(args.command, cfg, args.out, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
