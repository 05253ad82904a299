"""Extended Schottky groups: ping-pong arcs, boundary coding and the roof function.

Boundary arcs are closed angular intervals stored as (center, half-width).
A letter is ``(base_index, m)`` with ``m != 0``; words are tuples of letters
whose consecutive bases differ.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import mpmath
import numpy as np

from .hyperbolic import (
    Isometry,
    busemann,
    classify,
    distance,
    power_entries,
)

TWO_PI = 2 * np.pi


def wrap(theta):
    """Angle difference mapped to (-pi, pi]."""
    return np.pi - (np.pi - np.asarray(theta)) % TWO_PI


@dataclass(frozen=True)
class Arc:
    center: float
    half_width: float

    def __post_init__(self):
        if not 0 < self.half_width < np.pi:
            raise ValueError("arcs must be nonempty proper sub-arcs of the circle")
        object.__setattr__(self, "center", float(self.center) % TWO_PI)
        object.__setattr__(self, "half_width", float(self.half_width))

    @classmethod
    def from_endpoints(cls, start, end):
        """Closed arc running counterclockwise from ``start`` to ``end``."""
        length = (end - start) % TWO_PI
        return cls(start + length / 2, length / 2)

    @property
    def start(self):
        return (self.center - self.half_width) % TWO_PI

    @property
    def end(self):
        return (self.center + self.half_width) % TWO_PI

    @property
    def length(self):
        return 2 * self.half_width

    def margin(self, theta):
        """Signed angular distance to the arc boundary, positive inside."""
        return self.half_width - np.abs(wrap(np.asarray(theta) - self.center))

    def contains(self, theta, tol=0.0):
        return self.margin(theta) >= -tol

    def widen(self, delta):
        return Arc(self.center, self.half_width + delta)

    def grid(self, n):
        return self.center + np.linspace(-self.half_width, self.half_width, n)

    def complement(self):
        return Arc(self.center + np.pi, np.pi - self.half_width)

    def gap_to(self, other):
        """Angular gap between two arcs, negative when they overlap."""
        return np.abs(wrap(other.center - self.center)) - self.half_width - other.half_width


def isometric_arc(g: Isometry) -> Arc:
    """Boundary arc of the isometric circle {|conj(beta) u + conj(alpha)| <= 1}.

    This is where ``g`` expands; equivalently the arc where
    ``B_u(g^{-1} o, o) <= 0``.
    """
    a, b = g.alpha, g.beta
    if abs(b) < 1e-15:
        raise ValueError("isometry fixes the origin")
    return Arc(np.pi - np.angle(a * np.conj(b)), np.arccos(abs(b) / abs(a)))


def _hull(a1: Arc, a2: Arc) -> Arc:
    """Smallest arc containing two arcs, going the short way between centers."""
    d = wrap(a2.center - a1.center)
    lo = min(-a1.half_width, d - a2.half_width)
    hi = max(a1.half_width, d + a2.half_width)
    return Arc(a1.center + (lo + hi) / 2, (hi - lo) / 2)


@dataclass(frozen=True)
class GeneratorSpec:
    label: str
    iso: Isometry
    kind: str
    arcs: tuple  # (C_a, C_{a^-1}) for hyperbolic, (C_p,) for parabolic

    def __post_init__(self):
        cls = classify(self.iso)
        if cls.kind != self.kind:
            raise ValueError(f"generator {self.label}: declared {self.kind} but isometry is {cls.kind}")
        expected = 2 if self.kind == "hyperbolic" else 1
        if len(self.arcs) != expected:
            raise ValueError(f"generator {self.label}: {self.kind} needs {expected} arcs")
        object.__setattr__(self, "arcs", tuple(self.arcs))

    @classmethod
    def auto(cls, label, iso, margin=0.0):
        """Generator with isometric-circle arcs, widened by ``margin`` radians."""
        kind = classify(iso).kind
        if kind == "hyperbolic":
            arcs = (isometric_arc(iso.inverse()).widen(margin), isometric_arc(iso).widen(margin))
        elif kind == "parabolic":
            arcs = (_hull(isometric_arc(iso), isometric_arc(iso.inverse())).widen(margin),)
        else:
            raise ValueError(f"generator {label} is {kind}")
        return cls(label, iso, kind, arcs)

    @property
    def info(self):
        return classify(self.iso)

    def arc_for(self, sign):
        """C_{a^sign}: the arc holding limit points of words starting with a^m, sign(m) = sign."""
        if self.kind == "parabolic" or sign > 0:
            return self.arcs[0]
        return self.arcs[1]

    def all_arcs(self):
        return self.arcs

    def in_own_arcs(self, theta, tol=0.0):
        return np.any([a.contains(theta, tol) for a in self.arcs], axis=0)

    def power(self, n):
        # closed-form entries keep a parabolic power inside the trace band
        pe = power_entries(self.iso, np.array([n]))
        scale = np.exp(pe.kappa[0])
        return replace(self, iso=Isometry(scale * pe.a[0], scale * pe.b[0]))


@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    margin: float
    generator: str | None = None
    witness: float | None = None
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    c1: ConditionResult
    c2: ConditionResult
    c3: ConditionResult
    extra: tuple = ()

    @property
    def passed(self):
        return all(r.passed for r in (self.c1, self.c2, self.c3) + tuple(self.extra))

    def failures(self):
        return [r for r in (self.c1, self.c2, self.c3) + tuple(self.extra) if not r.passed]

    def raise_if_failed(self):
        bad = self.failures()
        if bad:
            r = bad[0]
            raise ConditionViolation(r)


class ConditionViolation(ValueError):
    def __init__(self, result: ConditionResult):
        self.result = result
        where = f" generator {result.generator}" if result.generator else ""
        wit = f" witness angle {result.witness:.12g}" if result.witness is not None else ""
        super().__init__(f"{result.name} failed:{where}{wit} (margin {result.margin:.3g}) {result.detail}".strip())


class CodingError(ValueError):
    pass


class ExcludedPointError(CodingError):
    pass


@dataclass(frozen=True)
class SchottkyGroup:
    generators: tuple
    xi0: float | None = None
    origin: complex = 0j
    triangle_constant_C: float | None = None
    c5_margin: float | None = None

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        labels = [g.label for g in gens]
        if len(set(labels)) != len(labels):
            raise ValueError("generator labels must be distinct")
        if len(gens) < 2:
            raise ValueError("need N1 + N2 >= 2 generators")
        if self.origin != 0:
            raise ValueError("construct with origin 0; use SchottkyGroup.recentered for other base points")
        if self.xi0 is None:
            object.__setattr__(self, "xi0", self._largest_gap_midpoint())
        else:
            object.__setattr__(self, "xi0", float(self.xi0) % TWO_PI)

    @classmethod
    def recentered(cls, generators, origin, xi0=None):
        """Group whose base point is ``origin``: everything is conjugated so that origin -> 0."""
        t = Isometry.translation_to_origin(origin)
        new = []
        for g in generators:
            arcs = tuple(_map_arc(t, a) for a in g.arcs)
            new.append(GeneratorSpec(g.label, g.iso.conjugate_by(t), g.kind, arcs))
        if xi0 is not None:
            xi0 = float(np.angle(t(np.exp(1j * xi0))))
        return cls(tuple(new), xi0=xi0)

    # -- structure -----------------------------------------------------------
    @property
    def n_hyperbolic(self):
        return sum(g.kind == "hyperbolic" for g in self.generators)

    @property
    def n_parabolic(self):
        return sum(g.kind == "parabolic" for g in self.generators)

    @property
    def labels(self):
        return [g.label for g in self.generators]

    def index(self, label):
        return self.labels.index(label)

    def arc_list(self):
        """All 2 N1 + N2 arcs as (generator index, sign, arc)."""
        out = []
        for i, g in enumerate(self.generators):
            if g.kind == "hyperbolic":
                out += [(i, 1, g.arcs[0]), (i, -1, g.arcs[1])]
            else:
                out.append((i, 0, g.arcs[0]))
        return out

    def _largest_gap_midpoint(self):
        arcs = sorted((a for _, _, a in self.arc_list()), key=lambda a: a.start)
        best, best_mid = -np.inf, 0.0
        for k, a in enumerate(arcs):
            b = arcs[(k + 1) % len(arcs)]
            gap = (b.start - a.end) % TWO_PI
            if gap > best:
                best, best_mid = gap, a.end + gap / 2
        return float(best_mid % TWO_PI)

    def locate(self, theta):
        """Arc containing the angle: (generator index, sign) or None."""
        for i, s, a in self.arc_list():
            if a.contains(theta):
                return i, s
        return None

    def with_constants(self):
        """Copy with the triangle constant and C5 margin filled in."""
        return replace(self, triangle_constant_C=triangle_constant(self), c5_margin=check_c5(self))

    @property
    def C(self):
        if self.triangle_constant_C is None:
            object.__setattr__(self, "triangle_constant_C", triangle_constant(self))
        return self.triangle_constant_C


def _map_arc(g: Isometry, arc: Arc) -> Arc:
    s = np.angle(g(np.exp(1j * arc.start)))
    e = np.angle(g(np.exp(1j * arc.end)))
    return Arc.from_endpoints(s, e)


def image_arc(g: Isometry, arc: Arc) -> Arc:
    """Image of an arc under an orientation preserving isometry."""
    return _map_arc(g, arc)


def _map_angles(g: Isometry, theta):
    return np.angle(g(np.exp(1j * np.asarray(theta))))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _complement_grid(arcs: Sequence[Arc], n):
    theta = np.linspace(0, TWO_PI, n, endpoint=False)
    keep = np.ones(n, bool)
    for a in arcs:
        keep &= ~a.contains(theta)
    pts = [theta[keep]]
    for a in arcs:  # complement endpoints
        pts.append(np.array([a.start, a.end]))
    return np.concatenate(pts)


def _fixed_point_checks(group):
    results = []
    for g in group.generators:
        info = g.info
        if g.kind == "hyperbolic":
            m1 = float(g.arcs[0].margin(np.angle(info.attracting)))
            m2 = float(g.arcs[1].margin(np.angle(info.repelling)))
            m = min(m1, m2)
            wit = float(np.angle(info.attracting) if m1 <= m2 else np.angle(info.repelling))
        else:
            m = float(g.arcs[0].margin(np.angle(info.fixed_points[0])))
            wit = float(np.angle(info.fixed_points[0]))
        results.append((m, g.label, wit))
    return results


def validate(group: SchottkyGroup, grid=4096, n_check=100) -> ValidationReport:
    """Check C1 (hyperbolic ping-pong), C2 (parabolic ping-pong), C3 (disjoint arcs)."""
    # C1 plus fixed point placement
    c1 = ConditionResult("C1", True, np.inf)
    for g in group.generators:
        if g.kind != "hyperbolic":
            continue
        for sgn, (src_excl, dst) in ((1, (g.arcs[1], g.arcs[0])), (-1, (g.arcs[0], g.arcs[1]))):
            theta = _complement_grid([src_excl], grid)
            iso = g.iso if sgn > 0 else g.iso.inverse()
            img = _map_angles(iso, theta)
            marg = dst.margin(img)
            k = int(np.argmin(marg))
            if marg[k] < c1.margin:
                c1 = ConditionResult("C1", bool(marg[k] > 0), float(marg[k]), g.label, float(theta[k] % TWO_PI))
    # C2 with nesting
    c2 = ConditionResult("C2", True, np.inf)
    for g in group.generators:
        if g.kind != "parabolic":
            continue
        arc = g.arcs[0]
        theta = _complement_grid([arc], grid)
        fix = np.angle(g.info.fixed_points[0])
        for sgn in (1, -1):
            prev_len = np.inf
            step = g.iso if sgn > 0 else g.iso.inverse()
            cur = theta.copy()
            for n in range(1, n_check + 1):
                cur = _map_angles(step, cur)
                marg = arc.margin(cur)
                k = int(np.argmin(marg))
                if marg[k] < c2.margin:
                    c2 = ConditionResult("C2", bool(marg[k] > 0), float(marg[k]), g.label,
                                         float(theta[k] % TWO_PI), f"power {sgn * n}")
                spread = float(np.max(np.abs(wrap(cur - fix))))
                if spread > prev_len + 1e-12:
                    c2 = ConditionResult("C2", False, -(spread - prev_len), g.label, float(fix),
                                         f"images not nested at power {sgn * n}")
                    break
                prev_len = spread
    if c2.margin == np.inf:
        c2 = ConditionResult("C2", True, np.inf, detail="no parabolic generators")
    # C3
    arcs = group.arc_list()
    c3 = ConditionResult("C3", True, np.inf)
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            gap = arcs[i][2].gap_to(arcs[j][2])
            if gap < c3.margin:
                lab = f"{group.generators[arcs[i][0]].label}/{group.generators[arcs[j][0]].label}"
                c3 = ConditionResult("C3", bool(gap > 0), float(gap), lab, float(arcs[j][2].center))
    extra = []
    for m, lab, wit in _fixed_point_checks(group):
        extra.append(ConditionResult("fixed points inside arcs", m > 0, m, lab, wit))
    xi_m = min(float(-a.margin(group.xi0)) for _, _, a in arcs)
    extra.append(ConditionResult("xi0 outside arcs", xi_m > 0, xi_m, None, group.xi0))
    worst = min(extra, key=lambda r: r.margin)
    return ValidationReport(c1, c2, c3, (worst,) if not worst.passed else tuple(r for r in extra if not r.passed))


def check_c5(group: SchottkyGroup, grid=1024):
    """min over xi in C_{a1} and a2 != a1 of B_xi(a2^{+-1} o, o)."""
    best = np.inf
    for i, _, arc in group.arc_list():
        xi = np.exp(1j * arc.grid(grid))
        for j, g in enumerate(group.generators):
            if j == i:
                continue
            for iso in (g.iso, g.iso.inverse()):
                best = min(best, float(np.min(busemann(xi, iso(0j), 0j))))
    return best


def power_up(group: SchottkyGroup, N: int) -> SchottkyGroup:
    """Replace each generator by its N-th power, keeping the arcs."""
    gens = tuple(g.power(N) for g in group.generators)
    return SchottkyGroup(gens, xi0=group.xi0)


# ---------------------------------------------------------------------------
# triangle constant
# ---------------------------------------------------------------------------

def _geodesic_points(u, v, radii):
    """Points on the geodesic with ideal endpoints u, v, at hyperbolic distances ``radii``
    from the point of the geodesic closest to 0, toward both ends."""
    # map to the diameter (-1, 1) by the isometry sending the geodesic to the real axis
    # parametrise by g(tanh(r/2)) where g sends -1 -> v, 1 -> u, preserving the disk
    # closest point to 0 is the image of 0 under the map fixing that normalisation
    mid = (u + v) / 2
    if abs(mid) < 1e-14:
        foot = 0j
    else:
        # geodesic circle: centre c with |c|^2 = 1 + R^2; foot = c (1 - R/|c|)
        c = (u + v) / (1 + np.real(u * np.conj(v)))
        R = np.sqrt(abs(c) ** 2 - 1)
        foot = c * (1 - R / abs(c))
    t = Isometry.translation_to_origin(foot).inverse()
    ui = Isometry.translation_to_origin(foot)(u)
    x = np.tanh(np.asarray(radii) / 2)
    pts = np.concatenate([x * ui, -x * ui])
    return t(pts)


def hull_samples(group: SchottkyGroup, i: int, sign: int, n_orbit=50, radii=None):
    """Samples of the region U bounded by the arc C_{a^sign} and its geodesic."""
    if radii is None:
        radii = np.linspace(0.0, 28.0, 57)
    g = group.generators[i]
    arc = g.arc_for(sign if sign != 0 else 1)
    u, v = np.exp(1j * arc.start), np.exp(1j * arc.end)
    pts = [_geodesic_points(u, v, radii)]
    # orbit points
    if g.kind == "parabolic":
        ms = np.r_[-n_orbit:0, 1:n_orbit + 1]
    else:
        ms = np.arange(1, n_orbit + 1) * (1 if sign >= 0 else -1)
    pe = power_entries(g.iso, ms)
    orb = pe.origin_image()
    orb = orb[1 - np.abs(orb) > 1e-13]
    pts.append(orb)
    # points deep inside the arc, near the boundary
    th = arc.grid(33)
    for r in (0.999, 1 - 1e-6):
        pts.append(r * np.exp(1j * th))
    pts = np.concatenate(pts)
    inside = arc.contains(np.angle(pts))  # crude filter for far-from-hull points
    return pts[inside | (np.abs(pts) < 1e-14)]


def triangle_constant(group: SchottkyGroup, safety=1.5, n_orbit=50):
    """Estimate C with d(x, y) >= d(x, o) + d(y, o) - C for x, y in hulls of different bases."""
    samples = []
    for i, s, _ in group.arc_list():
        samples.append((i, hull_samples(group, i, s, n_orbit)))
    best = 0.0
    for a in range(len(samples)):
        for b in range(a + 1, len(samples)):
            ia, xa = samples[a]
            ib, xb = samples[b]
            if ia == ib:
                continue
            X, Y = np.meshgrid(xa, xb, indexing="ij")
            g = distance(X, 0j) + distance(Y, 0j) - distance(X, Y)
            best = max(best, float(np.max(g)))
    return safety * best


# ---------------------------------------------------------------------------
# coding
# ---------------------------------------------------------------------------

def check_word(word, n_bases=None):
    for k, (b, m) in enumerate(word):
        if m == 0:
            raise ValueError("exponents must be nonzero")
        if n_bases is not None and not 0 <= b < n_bases:
            raise ValueError(f"unknown base {b}")
        if k and word[k - 1][0] == b:
            raise ValueError("word is not reduced: adjacent letters share a base")


def _mp_letter(group, letter):
    """(alpha, beta) of a^m in mpmath at the current precision."""
    b, m = letter
    g = group.generators[b].iso
    ga, gb = mpmath.mpc(g.alpha), mpmath.mpc(g.beta)
    if m < 0:
        ga, gb = mpmath.conj(ga), -gb
    ra, rb = mpmath.mpc(1), mpmath.mpc(0)
    k = abs(int(m))
    while k:
        if k & 1:
            ra, rb = ra * ga + rb * mpmath.conj(gb), ra * gb + rb * mpmath.conj(ga)
        ga, gb = ga * ga + gb * mpmath.conj(gb), ga * gb + gb * mpmath.conj(ga)
        k >>= 1
    return ra, rb


def _mp_apply(ab, u):
    a, b = ab
    v = (a * u + b) / (mpmath.conj(b) * u + mpmath.conj(a))
    return v / abs(v)


def _mp_angle(u):
    return mpmath.arg(u) % (2 * mpmath.pi)


def _needed_dps(group, letters):
    """Decimal digits that resolve the cylinder of the word, plus a guard."""
    total = 0.0
    for b, m in letters:
        total += float(power_entries(group.generators[b].iso, np.array([m])).origin_distance()[0])
    return int(25 + total / np.log(10))


def _act_on_boundary(group, letters, theta):
    """Angle (mpmath) of a_1^{m_1} ... a_k^{m_k} e^{i theta}, innermost letter first."""
    u = mpmath.expj(theta)
    for letter in reversed(letters):
        u = _mp_apply(_mp_letter(group, letter), u)
    return _mp_angle(u)


def word_isometry(group: SchottkyGroup, word):
    g = Isometry.identity()
    for b, m in word:
        g = g @ group.generators[b].iso.power(m)
    return g


@dataclass(frozen=True)
class LimitPoint:
    """Boundary point given as an angle; ``exact`` carries an mpmath angle
    accurate to ``dps`` digits so that deep cylinders stay resolvable."""

    angle: float
    residual: float
    exact: object = None
    dps: int = 17

    @property
    def u(self):
        return np.exp(1j * self.angle)


def word_limit(group: SchottkyGroup, word, tol=1e-12) -> LimitPoint:
    """gamma xi0 for the finite word gamma, with the angular size of the cylinder arc
    as error bound.  ``word`` may also be an iterator of letters; it is consumed until
    the residual drops below ``tol``."""
    is_seq = isinstance(word, (list, tuple))
    letters = list(word) if is_seq else None
    if is_seq:
        check_word(letters, len(group.generators))
        return _limit_point(group, letters)
    taken = []
    res = TWO_PI
    for letter in word:
        letter = tuple(letter)
        if taken and taken[-1][0] == letter[0]:
            raise ValueError("word is not reduced: adjacent letters share a base")
        if letter[1] == 0:
            raise ValueError("exponents must be nonzero")
        taken.append(letter)
        with mpmath.workdps(_needed_dps(group, taken)):
            res = float(_residual(group, taken))
        if res < tol:
            break
    return _limit_point(group, taken)


def _limit_point(group, letters):
    dps = _needed_dps(group, letters)
    with mpmath.workdps(dps):
        ang = _act_on_boundary(group, letters, group.xi0)
        res = _residual(group, letters)
        return LimitPoint(float(ang), float(res), +ang, dps)


def _residual(group, letters):
    """Angular length of gamma(circle minus C_{a_k^{-sign m_k}}), gamma the whole word.

    Every limit point whose coding starts with the word lies in that arc.
    """
    if not letters:
        return 2 * mpmath.pi
    b, m = letters[-1]
    gen = group.generators[b]
    excl = gen.arcs[0] if gen.kind == "parabolic" else gen.arc_for(-np.sign(m))
    s = _act_on_boundary(group, letters, excl.end)
    e = _act_on_boundary(group, letters, excl.start)
    return (e - s) % (2 * mpmath.pi)


def _mp_margin(arc: Arc, th):
    d = (th - arc.center + mpmath.pi) % (2 * mpmath.pi) - mpmath.pi
    return arc.half_width - abs(d)


def _mp_in_own(g: GeneratorSpec, th):
    return any(_mp_margin(a, th) >= 0 for a in g.arcs)


def _peel_exponent(group, i, th, sign, side0, cap=2 ** 40):
    """The m with sign(m) = sign and a^{-m} xi outside the arcs of base i.

    Along k = 1, 2, ... the iterate a^{-k} xi is first still inside C_{a^sign}
    ('before'), then outside the arcs of a for exactly one k, then inside the
    opposite arc or half-arc ('past').  Exponential search plus bisection.
    """
    g = group.generators[i]
    u = mpmath.expj(th)

    def state(k):
        v = _mp_apply(_mp_letter(group, (i, -sign * k)), u)
        t = _mp_angle(v)
        if not _mp_in_own(g, t):
            return 0, t
        if g.kind == "parabolic":
            return (-1 if _parabolic_side(g, t) == side0 else 1), t
        return (-1 if _mp_margin(g.arc_for(sign), t) >= 0 else 1), t

    lo, hi = 0, 1
    while True:
        st, t = state(hi)
        if st == 0:
            return sign * hi, t
        if st > 0:
            break
        lo, hi = hi, hi * 2
        if hi > cap:
            raise ExcludedPointError("point never leaves the arcs of its generator (fixed point orbit)")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        st, t = state(mid)
        if st == 0:
            return sign * mid, t
        if st < 0:
            lo = mid
        else:
            hi = mid
    raise CodingError("no exponent sends the point outside the generator arcs")


def code_point(group: SchottkyGroup, xi, depth: int):
    """Peel ``depth`` letters off a boundary point (angle or LimitPoint)."""
    if isinstance(xi, LimitPoint) and xi.exact is not None:
        dps, th0 = xi.dps, xi.exact
    else:
        dps = 30
        th0 = xi.angle if isinstance(xi, LimitPoint) else float(xi)
    word = []
    with mpmath.workdps(dps):
        th = mpmath.mpf(th0)
        tol = mpmath.mpf(10) ** (-(dps - 4))
        for g in group.generators:
            for fp in g.info.fixed_points:
                if abs((th - float(np.angle(fp)) + mpmath.pi) % (2 * mpmath.pi) - mpmath.pi) < tol:
                    raise ExcludedPointError(f"point is a fixed point of {g.label}; excluded from the coded set")
        for k in range(depth):
            loc = None
            for i, s, a in group.arc_list():
                if _mp_margin(a, th) >= 0:
                    loc = (i, s)
                    break
            if loc is None:
                raise CodingError(f"not in coded limit set sample (left all arcs after {k} letters)")
            i, s = loc
            if word and word[-1][0] == i:
                raise CodingError("iterate returned to the arcs of the generator just peeled")
            g = group.generators[i]
            if g.kind == "parabolic":
                s = _parabolic_side(g, th)
            m, th = _peel_exponent(group, i, th, s, s)
            word.append((i, m))
    return tuple(word)


def _parabolic_side(g, theta):
    """Sign of the exponent for a point of C_p: which side of the fixed point it is on."""
    fix = float(np.angle(g.info.fixed_points[0]))
    far = g.arcs[0].center + np.pi
    img = float(np.angle(g.iso(np.exp(1j * far))))
    side_pos = np.sign(wrap(img - fix))
    if isinstance(theta, mpmath.mpf):
        d = (theta - fix + mpmath.pi) % (2 * mpmath.pi) - mpmath.pi
        side = mpmath.sign(d)
    else:
        side = np.sign(wrap(theta - fix))
    if side == 0:
        raise ExcludedPointError("point is the parabolic fixed point")
    return 1 if side == side_pos else -1


# ---------------------------------------------------------------------------
# roof function
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RoofValue:
    value: float
    error: float
    distance: float


def roof(group: SchottkyGroup, word, depth: int | None = None) -> RoofValue:
    """tau(w) = B_xi(o, a^m o) with xi the limit of the first ``depth`` letters.

    Evaluated in the invariant form B_eta(a^{-m} o, o), eta = limit of the tail,
    which keeps the base point away from eta.
    """
    word = tuple(tuple(x) for x in word)
    check_word(word, len(group.generators))
    if not word:
        raise ValueError("empty word has no roof value")
    if depth is None:
        depth = len(word)
    depth = max(1, min(depth, len(word)))
    b, m = word[0]
    tail = word[1:depth]
    eta = word_limit(group, list(tail))
    pe = power_entries(group.generators[b].iso, np.array([m]))
    val = float(pe.busemann_from_inverse(np.exp(1j * eta.angle))[0])
    dist = float(pe.origin_distance()[0])
    inv = power_entries(group.generators[b].iso, np.array([-m])).origin_image()[0]
    err = 2.0 * eta.residual / max(abs(np.exp(1j * eta.angle) - inv), 1e-300)
    if not val > 0:
        raise ValueError(f"nonpositive roof value {val} (C5 must have failed)")
    return RoofValue(val, float(err), dist)
