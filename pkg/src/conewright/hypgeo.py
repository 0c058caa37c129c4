"""Upper half-space model of hyperbolic 3-space.

Boundary points are Python complex numbers or the ``INF`` sentinel.  Interior
points are ``HPoint(x, y, h)`` with ``h > 0``.  Orientation preserving
isometries are ``Isometry`` values: unit-determinant 2x2 complex matrices
stored up to sign in a canonical representative.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import numpy as np

DET_TOL = 1e-12
CLASSIFY_TOL = 1e-9
IDENTITY_TOL = 1e-9
# a computed fixed point whose projective denominator is this small
# relative to its numerator is the point at infinity
INF_TOL = 1e-13


class GeometryError(ValueError):
    """Raised for degenerate geometric input (coincident points, tangent planes, ...)."""


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

BoundaryPoint = Union[complex, _Infinity]


def is_inf(p) -> bool:
    return p is INF


def as_boundary(p) -> BoundaryPoint:
    """Coerce numbers, ``(x, y)`` pairs and the strings "inf"/"∞" to boundary points."""
    if p is INF:
        return INF
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        p = complex(p.replace(" ", ""))
    if isinstance(p, (tuple, list, np.ndarray)):
        if len(p) != 2:
            raise ValueError(f"boundary point needs 2 coordinates, got {p!r}")
        z = complex(float(p[0]), float(p[1]))
    else:
        z = complex(p)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite coordinate {p!r}; write infinity as \"inf\"")
    return z


def boundary_close(p: BoundaryPoint, q: BoundaryPoint, tol: float = 1e-9) -> bool:
    if p is INF or q is INF:
        return p is q
    return abs(p - q) <= tol * max(1.0, abs(p), abs(q))


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise GeometryError(f"interior point needs positive height, got h={self.h}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.h])

    @classmethod
    def from_z(cls, z: complex, h: float) -> "HPoint":
        return cls(z.real, z.imag, h)


Point = Union[HPoint, complex, _Infinity]


def _canonical_sign(entries):
    mods = [abs(e) for e in entries]
    top = max(mods)
    for e, m in zip(entries, mods):
        if m >= top * (1 - 1e-12):
            lead = e
            break
    if lead.real < -1e-14 * top or (abs(lead.real) <= 1e-14 * top and lead.imag < 0):
        entries = tuple(-e for e in entries)
    # drop negative zeros so serialization is deterministic
    return tuple(e + 0.0 for e in entries)


@dataclass(frozen=True)
class Isometry:
    """Element of PSL(2,C), stored as the canonical sign representative.

    The representative has its first largest-modulus entry in the closed
    right half plane (imaginary part nonnegative when purely imaginary).
    """

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        entries = tuple(complex(e) for e in (self.a, self.b, self.c, self.d))
        a, b, c, d = entries
        scale = max(1.0, max(abs(e) for e in entries) ** 2)
        if abs(a * d - b * c - 1) > DET_TOL * scale:
            raise GeometryError(f"determinant {a * d - b * c} is not 1")
        for name, value in zip("abcd", _canonical_sign(entries)):
            object.__setattr__(self, name, value)

    @classmethod
    def from_matrix(cls, m) -> "Isometry":
        """Build from any invertible 2x2 complex matrix, dividing by sqrt(det)."""
        m = np.asarray(m, dtype=complex)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if det == 0:
            raise GeometryError("singular matrix")
        s = cmath.sqrt(det)
        return cls(m[0, 0] / s, m[0, 1] / s, m[1, 0] / s, m[1, 1] / s)

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1, 0, 0, 1)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> complex:
        return self.a + self.d

    @property
    def trace_squared(self) -> complex:
        return (self.a + self.d) ** 2

    def inverse(self) -> "Isometry":
        return Isometry(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return compose(self, other)

    def __call__(self, p):
        if isinstance(p, HPoint):
            return apply_interior(self, p)
        return apply_boundary(self, p)

    def isclose(self, other: "Isometry", tol: float = IDENTITY_TOL) -> bool:
        """Entrywise comparison up to sign."""
        m, n = self.matrix, other.matrix
        return bool(min(np.max(np.abs(m - n)), np.max(np.abs(m + n))) <= tol)

    def is_identity(self, tol: float = IDENTITY_TOL) -> bool:
        return self.isclose(Isometry.identity(), tol)

    def to_json(self) -> list:
        return [v for e in (self.a, self.b, self.c, self.d) for v in (e.real, e.imag)]

    @classmethod
    def from_json(cls, values: Sequence[float]) -> "Isometry":
        if len(values) != 8:
            raise ValueError("an isometry is serialized as 8 reals")
        a, b, c, d = (complex(values[2 * k], values[2 * k + 1]) for k in range(4))
        return cls.from_matrix([[a, b], [c, d]])


def compose(g: Isometry, h: Isometry) -> Isometry:
    return Isometry.from_matrix(g.matrix @ h.matrix)


def conjugate(k: Isometry, g: Isometry) -> Isometry:
    """k g k^-1."""
    return Isometry.from_matrix(k.matrix @ g.matrix @ k.inverse().matrix)


def apply_boundary(g: Isometry, p: BoundaryPoint) -> BoundaryPoint:
    a, b, c, d = g.a, g.b, g.c, g.d
    if p is INF:
        if c == 0:
            return INF
        return a / c
    num = a * p + b
    den = c * p + d
    if den == 0:
        return INF
    return num / den


def apply_interior(g: Isometry, p: HPoint) -> HPoint:
    # Poincare extension, z + h j  ->  ((az+b) conj(cz+d) + a conj(c) h^2 + h j) / (|cz+d|^2 + |c|^2 h^2)
    a, b, c, d = g.a, g.b, g.c, g.d
    z, h = p.z, p.h
    cz_d = c * z + d
    den = abs(cz_d) ** 2 + abs(c) ** 2 * h * h
    w = ((a * z + b) * cz_d.conjugate() + a * c.conjugate() * h * h) / den
    return HPoint(w.real, w.imag, h / den)


def distance(p: HPoint, q: HPoint) -> float:
    # sinh(d/2) = |p - q|_euclid / (2 sqrt(h_p h_q)); stable for small d
    e = math.sqrt((p.x - q.x) ** 2 + (p.y - q.y) ** 2 + (p.h - q.h) ** 2)
    return 2.0 * math.asinh(e / (2.0 * math.sqrt(p.h * q.h)))


# ---------------------------------------------------------------- classification


class Kind(Enum):
    IDENTITY = "identity"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    LOXODROMIC = "loxodromic"


@dataclass(frozen=True)
class IsomClass:
    kind: Kind
    angle: float | None = None
    length: float | None = None
    twist: float | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind.value}
        for key in ("angle", "length", "twist"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


def _eigen_fixed_point(g: Isometry, lam: complex) -> BoundaryPoint:
    # eigenvector (x, y) of lam  ->  boundary point x / y
    v1 = (g.b, lam - g.a)
    v2 = (lam - g.d, g.c)
    x, y = v1 if abs(v1[0]) + abs(v1[1]) >= abs(v2[0]) + abs(v2[1]) else v2
    if abs(y) <= INF_TOL * abs(x):
        return INF
    return x / y


def classify(g: Isometry, tol: float = CLASSIFY_TOL) -> IsomClass:
    """Classify by trace squared.

    Comparisons use absolute tolerance ``tol`` on ``|Im tr^2|`` and
    ``|tr^2 - 4|``, so rotations by angles below about ``sqrt(tol)`` read as
    parabolic or identity.  Elliptic angles are reported in (0, pi]; the
    oriented angle about a chosen axis comes from ``rotation_angle``.
    """
    t2 = g.trace_squared
    if abs(t2 - 4) <= tol:
        if g.is_identity(max(tol, IDENTITY_TOL)):
            return IsomClass(Kind.IDENTITY)
        return IsomClass(Kind.PARABOLIC)
    if abs(t2.imag) <= tol and -tol <= t2.real < 4:
        half = min(1.0, math.sqrt(max(t2.real, 0.0)) / 2)
        return IsomClass(Kind.ELLIPTIC, angle=2 * math.acos(half))
    tr = g.trace
    root = cmath.sqrt(tr * tr - 4)
    lam = (tr + root) / 2
    if abs(lam) < 1:
        lam = 1 / lam
    cl = cmath.log(lam * lam)
    twist = cl.imag
    if twist <= -math.pi:
        twist += 2 * math.pi
    return IsomClass(Kind.LOXODROMIC, length=cl.real, twist=twist)


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic from ``start`` to ``end``."""

    start: BoundaryPoint
    end: BoundaryPoint

    def __post_init__(self):
        object.__setattr__(self, "start", as_boundary(self.start))
        object.__setattr__(self, "end", as_boundary(self.end))
        if boundary_close(self.start, self.end, 1e-14):
            raise GeometryError("geodesic endpoints coincide")

    def reversed(self) -> "Geodesic":
        return Geodesic(self.end, self.start)

    def isclose(self, other: "Geodesic", tol: float = 1e-8) -> bool:
        return boundary_close(self.start, other.start, tol) and boundary_close(
            self.end, other.end, tol
        )

    def same_line(self, other: "Geodesic", tol: float = 1e-8) -> bool:
        return self.isclose(other, tol) or self.isclose(other.reversed(), tol)


def axis(g: Isometry) -> Geodesic:
    """Oriented axis of an elliptic or loxodromic element.

    Loxodromic: attracting fixed point second.  Elliptic: oriented so that
    ``rotation_angle(g, axis(g))`` equals ``classify(g).angle`` in (0, pi].
    """
    cls = classify(g)
    if cls.kind in (Kind.IDENTITY, Kind.PARABOLIC):
        raise GeometryError(f"{cls.kind.value} element has no axis")
    tr = g.trace
    root = cmath.sqrt(tr * tr - 4)
    lam1, lam2 = (tr + root) / 2, (tr - root) / 2
    if cls.kind is Kind.LOXODROMIC:
        big, small = (lam1, lam2) if abs(lam1) >= abs(lam2) else (lam2, lam1)
    else:
        # rotation by arg(lam^2) about the axis ending at lam's fixed point
        if 0 < cmath.phase(lam1 * lam1) <= math.pi:
            big, small = lam1, lam2
        else:
            big, small = lam2, lam1
    return Geodesic(_eigen_fixed_point(g, small), _eigen_fixed_point(g, big))


def _frame(geod: Geodesic) -> Isometry:
    # isometry sending 0 -> start, inf -> end
    u, v = geod.start, geod.end
    if v is INF:
        return Isometry(1, u, 0, 1)
    if u is INF:
        return Isometry.from_matrix([[v, 1], [1, 0]])
    return Isometry.from_matrix([[v, u], [1, 1]])


def complex_length(g: Isometry, geod: Geodesic, tol: float = 1e-8) -> complex:
    """Complex translation length ``l + i phi`` of ``g`` along the oriented geodesic.

    ``phi`` is the right-handed rotation angle in [0, 2pi).  Raises if ``g``
    does not fix both endpoints.
    """
    k = _frame(geod)
    m = Isometry.from_matrix(k.inverse().matrix @ g.matrix @ k.matrix)
    scale = max(abs(m.a), abs(m.d))
    if abs(m.b) > tol * scale or abs(m.c) > tol * scale:
        raise GeometryError("isometry does not preserve the geodesic")
    cl = cmath.log(m.a / m.d)
    phi = cl.imag % (2 * math.pi)
    if phi >= 2 * math.pi - 1e-15:
        phi = 0.0
    return complex(cl.real, phi)


def rotation_angle(g: Isometry, geod: Geodesic, tol: float = 1e-8) -> float:
    """Right-handed rotation angle in [0, 2pi) of ``g`` about the oriented geodesic."""
    return complex_length(g, geod, tol).imag


def fixes_geodesic(g: Isometry, geod: Geodesic, tol: float = 1e-8) -> bool:
    return boundary_close(apply_boundary(g, geod.start), geod.start, tol) and boundary_close(
        apply_boundary(g, geod.end), geod.end, tol
    )


def loxodromic_along(geod: Geodesic, length: float, twist: float = 0.0) -> Isometry:
    k = _frame(geod)
    w = cmath.exp(complex(length, twist) / 2)
    return Isometry.from_matrix(k.matrix @ np.diag([w, 1 / w]) @ k.inverse().matrix)


def rotation_about(geod: Geodesic, theta: float) -> Isometry:
    return loxodromic_along(geod, 0.0, theta)


# ---------------------------------------------------------------- boundary triples


def _to_standard(z1: BoundaryPoint, z2: BoundaryPoint, z3: BoundaryPoint) -> np.ndarray:
    # matrix of the Mobius map z1 -> 0, z2 -> 1, z3 -> inf
    if z1 is INF:
        return np.array([[0, z2 - z3], [1, -z3]], dtype=complex)
    if z2 is INF:
        return np.array([[1, -z1], [1, -z3]], dtype=complex)
    if z3 is INF:
        return np.array([[1, -z1], [0, z2 - z1]], dtype=complex)
    return np.array([[z2 - z3, -z1 * (z2 - z3)], [z2 - z1, -z3 * (z2 - z1)]], dtype=complex)


def _check_triple(pts):
    for i in range(3):
        for j in range(i + 1, 3):
            if boundary_close(pts[i], pts[j], 1e-14):
                raise GeometryError(f"repeated boundary point in triple {pts!r}")


def isometry_from_boundary_triples(src: Sequence, dst: Sequence) -> Isometry:
    """The unique isometry taking ``src[k]`` to ``dst[k]`` for k = 0, 1, 2."""
    src = [as_boundary(p) for p in src]
    dst = [as_boundary(p) for p in dst]
    _check_triple(src)
    _check_triple(dst)
    t_src = Isometry.from_matrix(_to_standard(*src))
    t_dst = Isometry.from_matrix(_to_standard(*dst))
    return t_dst.inverse() @ t_src


# ---------------------------------------------------------------- planes


@dataclass(frozen=True)
class Hemisphere:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0:
            raise GeometryError("hemisphere radius must be positive")

    def value(self, p: HPoint) -> float:
        return abs(p.z - self.center) ** 2 + p.h * p.h - self.radius**2

    def normal(self, p: HPoint) -> np.ndarray:
        return np.array([p.x - self.center.real, p.y - self.center.imag, p.h])

    def anchors(self) -> tuple:
        c, r = self.center, self.radius
        return (c + r, c + 1j * r, c - r)

    def contains(self, p, tol: float = 1e-9) -> bool:
        if p is INF:
            return False
        if isinstance(p, HPoint):
            return abs(self.value(p)) <= tol * max(1.0, self.radius) ** 2
        return abs(abs(p - self.center) - self.radius) <= tol * max(1.0, self.radius)


@dataclass(frozen=True)
class VerticalPlane:
    through: complex
    direction: complex

    def __post_init__(self):
        object.__setattr__(self, "through", complex(self.through))
        d = complex(self.direction)
        if d == 0:
            raise GeometryError("vertical plane needs a nonzero direction")
        object.__setattr__(self, "direction", d / abs(d))

    def value(self, p: HPoint) -> float:
        # signed distance, positive to the left of the direction
        w = (p.z - self.through) * self.direction.conjugate()
        return w.imag

    def normal(self, p: HPoint) -> np.ndarray:
        return np.array([-self.direction.imag, self.direction.real, 0.0])

    def anchors(self) -> tuple:
        return (self.through, self.through + self.direction, INF)

    def contains(self, p, tol: float = 1e-9) -> bool:
        if p is INF:
            return True
        if isinstance(p, HPoint):
            return abs(self.value(p)) <= tol * max(1.0, abs(self.through))
        w = (p - self.through) * self.direction.conjugate()
        return abs(w.imag) <= tol * max(1.0, abs(self.through), abs(p))


Plane = Union[Hemisphere, VerticalPlane]


def plane_through(p1, p2, p3) -> Plane:
    """Totally geodesic plane bounded by the circle through three boundary points."""
    pts = [as_boundary(p) for p in (p1, p2, p3)]
    _check_triple(pts)
    finite = [p for p in pts if p is not INF]
    if len(finite) == 2:
        return VerticalPlane(finite[0], finite[1] - finite[0])
    a, b, c = finite
    ab, ac = b - a, c - a
    cross = (ab.conjugate() * ac).imag
    scale = abs(ab) * abs(ac)
    if abs(cross) <= 1e-14 * scale:
        return VerticalPlane(a, ab if abs(ab) >= abs(ac) else ac)
    # circumcenter
    center = a - 1j * (abs(ab) ** 2 * ac - abs(ac) ** 2 * ab) / (2 * cross)
    return Hemisphere(center, abs(a - center))


def transform_plane(g: Isometry, plane: Plane) -> Plane:
    return plane_through(*(apply_boundary(g, p) for p in plane.anchors()))


def _intersection_point(P: Plane, Q: Plane) -> HPoint:
    if isinstance(P, VerticalPlane) and isinstance(Q, VerticalPlane):
        cross = (P.direction.conjugate() * Q.direction).imag
        if abs(cross) <= 1e-14:
            raise GeometryError("parallel vertical planes do not meet")
        # P.through + s P.direction on Q's line
        s = ((Q.through - P.through) * Q.direction.conjugate()).imag / cross
        return HPoint.from_z(P.through + s * P.direction, 1.0)
    if isinstance(P, VerticalPlane):
        P, Q = Q, P
    if isinstance(Q, VerticalPlane):
        w = (P.center - Q.through) * Q.direction.conjugate()
        foot = Q.through + w.real * Q.direction
        d = abs(w.imag)
        h2 = P.radius**2 - d * d
        if h2 <= 1e-20 * P.radius**2:
            raise GeometryError("hemisphere and vertical plane do not cross")
        return HPoint.from_z(foot, math.sqrt(h2))
    d = abs(Q.center - P.center)
    r1, r2 = P.radius, Q.radius
    if d <= 1e-14 * max(r1, r2) or not (abs(r1 - r2) < d < r1 + r2):
        raise GeometryError("hemispheres do not cross")
    x = (d * d + r1 * r1 - r2 * r2) / (2 * d)
    h2 = r1 * r1 - x * x
    if h2 <= 1e-20 * r1 * r1:
        raise GeometryError("hemispheres are tangent")
    return HPoint.from_z(P.center + x * (Q.center - P.center) / d, math.sqrt(h2))


def plane_intersection(P: Plane, Q: Plane) -> Geodesic:
    """The geodesic P cap Q (unoriented; endpoints in a fixed but arbitrary order)."""
    X = _intersection_point(P, Q)
    if isinstance(P, VerticalPlane) and isinstance(Q, VerticalPlane):
        return Geodesic(X.z, INF)
    if isinstance(P, VerticalPlane):
        P, Q = Q, P
    if isinstance(Q, VerticalPlane):
        return Geodesic(X.z - X.h * Q.direction, X.z + X.h * Q.direction)
    axis_dir = (Q.center - P.center) / abs(Q.center - P.center)
    return Geodesic(X.z - 1j * X.h * axis_dir, X.z + 1j * X.h * axis_dir)


def inward_normals(P: Plane, Q: Plane, side_sample: HPoint):
    """A point on P cap Q and the unit normals of P and Q pointing toward ``side_sample``."""
    X = _intersection_point(P, Q)
    out = []
    for plane in (P, Q):
        s = plane.value(side_sample)
        if s == 0:
            raise GeometryError("side sample lies on a plane")
        n = plane.normal(X) * math.copysign(1.0, s)
        out.append(n / np.linalg.norm(n))
    return X, out[0], out[1]


def dihedral_angle(P: Plane, Q: Plane, side_sample: HPoint) -> float:
    """Angle in (0, pi) of the wedge between P and Q containing ``side_sample``."""
    _, nP, nQ = inward_normals(P, Q, side_sample)
    cos = float(np.clip(-np.dot(nP, nQ), -1.0, 1.0))
    return math.acos(cos)
