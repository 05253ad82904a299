"""Hyperbolic geometry in the Poincare disk (curvature -1).

Isometries are stored in the normal form

    z -> (alpha z + beta) / (conj(beta) z + conj(alpha)),  |alpha|^2 - |beta|^2 = 1,

which is the SU(1,1) matrix [[alpha, beta], [conj(beta), conj(alpha)]].
Points are plain complex numbers; the origin ``o`` is ``0``.  The small
``DiskPoint`` / ``BoundaryPoint`` wrappers validate and let :func:`apply`
dispatch on the kind of point, while the module level functions accept
numpy arrays for vectorised work.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

INTERIOR_TOL = 1e-12
BOUNDARY_TOL = 1e-12
DEGENERATE_TOL = 1e-9
NORMAL_FORM_TOL = 1e-10
TRACE_BAND = 1e-9


class DegenerateGeometryWarning(UserWarning):
    """A point is numerically indistinguishable from the ideal boundary."""


class NearDegenerateWarning(UserWarning):
    """Trace of an isometry falls inside the parabolic tolerance band."""


@dataclass(frozen=True)
class DiskPoint:
    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not abs(z) < 1 - INTERIOR_TOL:
            raise ValueError(f"|z| = {abs(z)!r} is not an interior point")
        object.__setattr__(self, "z", z)


@dataclass(frozen=True)
class BoundaryPoint:
    u: complex

    def __post_init__(self):
        u = complex(self.u)
        if abs(abs(u) - 1.0) > BOUNDARY_TOL:
            raise ValueError(f"|u| = {abs(u)!r} is not on the unit circle")
        object.__setattr__(self, "u", u / abs(u))

    @classmethod
    def from_angle(cls, theta):
        return cls(np.exp(1j * float(theta)))

    @property
    def angle(self):
        return float(np.angle(self.u) % (2 * np.pi))


def _coerce(p):
    if isinstance(p, DiskPoint):
        return p.z
    if isinstance(p, BoundaryPoint):
        return p.u
    return p


@dataclass(frozen=True)
class Isometry:
    """Orientation preserving isometry of the disk in SU(1,1) normal form."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        # |alpha|^2 - |beta|^2 cancels catastrophically once the entries are
        # large, so the determinant is only checked while it is resolvable
        if abs(a) < 1e4:
            det = abs(a) ** 2 - abs(b) ** 2
            if not det > 0:
                raise ValueError("matrix does not preserve the disk")
            if abs(det - 1.0) > NORMAL_FORM_TOL:
                s = np.sqrt(det)
                a, b = a / s, b / s
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0)

    @classmethod
    def rotation(cls, theta):
        """Rotation z -> e^{i theta} z."""
        return cls(np.exp(0.5j * theta), 0.0)

    @classmethod
    def translation_to_origin(cls, w):
        """The isometry z -> (z - w) / (1 - conj(w) z), sending w to 0."""
        w = complex(w)
        s = 1.0 / np.sqrt(1.0 - abs(w) ** 2)
        return cls(s, -w * s)

    @property
    def matrix(self):
        a, b = self.alpha, self.beta
        return np.array([[a, b], [np.conj(b), np.conj(a)]])

    @property
    def trace(self):
        return 2.0 * self.alpha.real

    def __call__(self, z):
        z = np.asarray(z) if not np.isscalar(z) else z
        a, b = self.alpha, self.beta
        return (a * z + b) / (np.conj(b) * z + np.conj(a))

    def __matmul__(self, other):
        a1, b1, a2, b2 = self.alpha, self.beta, other.alpha, other.beta
        return Isometry(a1 * a2 + b1 * np.conj(b2), a1 * b2 + b1 * np.conj(a2))

    def inverse(self):
        return Isometry(np.conj(self.alpha), -self.beta)

    def power(self, n):
        n = int(n)
        base = self if n >= 0 else self.inverse()
        result = Isometry.identity()
        k = abs(n)
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def derivative_modulus(self, u):
        """|g'(u)| = 1 / |conj(beta) u + conj(alpha)|^2."""
        return 1.0 / np.abs(np.conj(self.beta) * u + np.conj(self.alpha)) ** 2

    def conjugate_by(self, t):
        """Return t g t^{-1}."""
        return t @ self @ t.inverse()


def apply(iso: Isometry, p):
    """Apply ``iso`` to a disk point, a boundary point, or raw complex data."""
    if isinstance(p, DiskPoint):
        w = iso(p.z)
        if 1 - abs(w) < DEGENERATE_TOL:
            warnings.warn("image is within 1e-9 of the boundary", DegenerateGeometryWarning, stacklevel=2)
            return DiskPoint(w * min(1.0, (1 - 2 * INTERIOR_TOL) / abs(w)))
        return DiskPoint(w)
    if isinstance(p, BoundaryPoint):
        w = iso(p.u)
        return BoundaryPoint(w / abs(w))
    return iso(p)


def _check_interior(*zs):
    for z in zs:
        if np.any(1 - np.abs(z) < DEGENERATE_TOL):
            warnings.warn("point within 1e-9 of the boundary", DegenerateGeometryWarning, stacklevel=3)


def _distance(x, y, one_minus_x2, one_minus_y2):
    # d = 2 log(1 + r) - log(1 - r^2) and
    # 1 - r^2 = (1 - |x|^2)(1 - |y|^2) / |1 - conj(x) y|^2
    den = np.abs(1 - np.conj(x) * y)
    r = np.minimum(np.abs(x - y) / den, 1.0)
    return 2.0 * np.log1p(r) + 2.0 * np.log(den) - np.log(one_minus_x2) - np.log(one_minus_y2)


def distance(x, y):
    """Hyperbolic distance, 2 artanh |x - y| / |1 - conj(x) y|."""
    x, y = np.asarray(_coerce(x)), np.asarray(_coerce(y))
    _check_interior(x, y)
    return _distance(x, y, 1 - np.abs(x) ** 2, 1 - np.abs(y) ** 2)


def poisson_kernel(z, xi):
    return (1 - np.abs(z) ** 2) / np.abs(xi - z) ** 2


def busemann(xi, x, y):
    """B_xi(x, y) = lim_t d(x, xi_t) - d(y, xi_t), via the Poisson kernel.

    ``B_xi(x, y) = log P(y, xi) - log P(x, xi)`` with
    ``P(z, xi) = (1 - |z|^2) / |xi - z|^2``.
    """
    xi, x, y = _coerce(xi), _coerce(x), _coerce(y)
    _check_interior(x, y)
    return np.log(poisson_kernel(y, xi)) - np.log(poisson_kernel(x, xi))


def busemann_limit(xi, x, y, T=30.0):
    """Truncated definition d(x, xi_T) - d(y, xi_T) along the ray from 0 to xi."""
    xi, x, y = np.asarray(_coerce(xi)), np.asarray(_coerce(x)), np.asarray(_coerce(y))
    pt = np.tanh(T / 2.0) * xi
    far = 1.0 / np.cosh(T / 2.0) ** 2
    return (_distance(x, pt, 1 - np.abs(x) ** 2, far)
            - _distance(y, pt, 1 - np.abs(y) ** 2, far))


@dataclass(frozen=True)
class IsometryClass:
    kind: str
    fixed_points: tuple = field(default_factory=tuple)
    translation_length: float = 0.0
    near_degenerate: bool = False
    attracting: complex | None = None
    repelling: complex | None = None


def classify(iso: Isometry, band: float = TRACE_BAND) -> IsometryClass:
    """Classify by |tr| against 2 with a tolerance band."""
    a, b = iso.alpha, iso.beta
    tr = abs(iso.trace)
    if abs(b) < band and abs(abs(a.real) - 1.0) < band:
        return IsometryClass("identity")
    if tr < 2 - band:
        return IsometryClass("elliptic")
    if tr <= 2 + band:
        near = abs(tr - 2.0) > 1e-12
        if near:
            warnings.warn(f"trace {tr!r} is inside the parabolic band", NearDegenerateWarning, stacklevel=2)
        u = (a - np.conj(a)) / (2 * np.conj(b))
        u = u / abs(u)
        return IsometryClass("parabolic", (complex(u),), 0.0, near)
    # fixed points: conj(b) z^2 + (conj(a) - a) z - b = 0
    disc = np.sqrt((np.conj(a) - a) ** 2 + 4 * np.conj(b) * b)
    roots = [(a - np.conj(a) + s * disc) / (2 * np.conj(b)) for s in (1, -1)]
    roots = [complex(r / abs(r)) for r in roots]
    # attracting point has |g'(u)| < 1
    derivs = [iso.derivative_modulus(r) for r in roots]
    att, rep = (roots[0], roots[1]) if derivs[0] < derivs[1] else (roots[1], roots[0])
    ell = 2.0 * np.arccosh(tr / 2.0)
    return IsometryClass("hyperbolic", (att, rep), float(ell), False, att, rep)


_CAYLEY = np.array([[1.0, -1j], [1.0, 1j]])
_CAYLEY_INV = np.linalg.inv(_CAYLEY)


def cayley(z):
    """Upper half-plane to disk, w = (z - i)/(z + i); sends i to 0, infinity to 1."""
    z = np.asarray(z, dtype=complex)
    return (z - 1j) / (z + 1j)


def cayley_inverse(w):
    w = np.asarray(w, dtype=complex)
    return 1j * (1 + w) / (1 - w)


def boundary_angle_to_real(theta):
    """Half-plane boundary coordinate of the disk angle theta (theta = 0 is infinity)."""
    return -1.0 / np.tan(0.5 * np.asarray(theta))


def real_to_boundary_angle(x):
    return (2.0 * np.arctan2(1.0, -np.asarray(x, dtype=float))) % (2 * np.pi)


def from_halfplane(a, b, c, d, tol=NORMAL_FORM_TOL) -> Isometry:
    """Disk isometry conjugate, through the Cayley transform, to z -> (az+b)/(cz+d)."""
    det = a * d - b * c
    if abs(det - 1.0) > tol:
        raise ValueError(f"half-plane matrix has determinant {det!r}, expected 1")
    m = _CAYLEY @ np.array([[a, b], [c, d]], dtype=complex) @ _CAYLEY_INV
    m = m / np.sqrt(np.linalg.det(m))
    return Isometry(m[0, 0], m[0, 1])


def hyperbolic_generator(attracting_angle, repelling_angle, length) -> Isometry:
    """Hyperbolic isometry with the given fixed points and translation length."""
    ua = np.exp(1j * attracting_angle)
    ur = np.exp(1j * repelling_angle)
    if abs(ua - ur) < 1e-12:
        raise ValueError("fixed points must be distinct")
    f = np.array([[ua, ur], [1.0, 1.0]])
    m = f @ np.diag([np.exp(length / 2), np.exp(-length / 2)]) @ np.linalg.inv(f)
    m = m / np.sqrt(np.linalg.det(m))
    return Isometry(m[0, 0], m[0, 1])


def parabolic_generator(fixed_angle, shift, orientation=1) -> Isometry:
    """Parabolic fixing e^{i fixed_angle}, conjugate to z -> z + shift in the half-plane.

    The half-plane model is rotated so that infinity lands on the fixed angle
    and ``i`` stays at the origin.
    """
    g = from_halfplane(1.0, orientation * shift, 0.0, 1.0)
    return g.conjugate_by(Isometry.rotation(fixed_angle))


# ---------------------------------------------------------------------------
# Stable orbit data for cyclic groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerEntries:
    """Entries of g^m written as alpha_m = e^kappa a, beta_m = e^kappa b."""

    m: np.ndarray
    kappa: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def origin_image(self):
        """g^m(0) = beta_m / conj(alpha_m)."""
        return self.b / np.conj(self.a)

    def origin_distance(self):
        """d(0, g^m 0) = 2 log(|alpha_m| + |beta_m|)."""
        return 2.0 * self.kappa + 2.0 * np.log(np.abs(self.a) + np.abs(self.b))

    def busemann_from_inverse(self, eta):
        """B_eta(g^{-m} 0, 0) = 2 log |alpha_m eta + beta_m|."""
        eta = np.asarray(eta)
        if eta.ndim:
            return 2.0 * self.kappa[:, None] + 2.0 * np.log(
                np.abs(self.a[:, None] * eta[None, :] + self.b[:, None]))
        return 2.0 * self.kappa + 2.0 * np.log(np.abs(self.a * eta + self.b))


def power_entries(iso: Isometry, ms) -> PowerEntries:
    """Vectorised, overflow-free entries of iso^m for integer arrays ``ms``."""
    ms = np.asarray(ms, dtype=np.int64)
    cls = classify(iso)
    if cls.kind == "hyperbolic":
        # g = lam F diag(1, lam^-2) F^-1 with F = [[u+, u-], [1, 1]]
        up, um = cls.attracting, cls.repelling
        tr = iso.trace
        lam = np.sign(tr) * np.exp(cls.translation_length / 2.0)
        mm = np.abs(ms).astype(float)
        q = np.exp(-cls.translation_length * mm)
        delta = up - um
        # for negative m, g^m = (g^-1)^{|m|} with fixed points swapped
        p_att = np.where(ms > 0, up, um)
        p_rep = np.where(ms > 0, um, up)
        dlt = np.where(ms > 0, delta, -delta)
        a = (p_att - p_rep * q) / dlt
        b = (-p_att * p_rep + p_rep * p_att * q) / dlt
        sign = np.where((np.sign(lam) < 0) & (ms % 2 == 1), -1.0, 1.0)
        kappa = 0.5 * cls.translation_length * mm
        return PowerEntries(ms, kappa, sign * a, sign * b)
    if cls.kind == "parabolic":
        s = 1.0 if iso.trace > 0 else -1.0
        n_a = s * iso.alpha - 1.0
        n_b = s * iso.beta
        sign = np.where((s < 0) & (ms % 2 != 0), -1.0, 1.0)
        a = sign * (1.0 + ms * n_a)
        b = sign * (ms * n_b)
        return PowerEntries(ms, np.zeros(ms.shape), a, b)
    if cls.kind == "identity":
        return PowerEntries(ms, np.zeros(ms.shape), np.ones(ms.shape, complex), np.zeros(ms.shape, complex))
    raise ValueError("elliptic isometries are not supported")


def orbit_distances(iso: Isometry, ms):
    """d(0, iso^m 0) for an integer array ``ms``."""
    return power_entries(iso, ms).origin_distance()
