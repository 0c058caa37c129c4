"""The tetragonal (holed) trapezohedron family.

A point ``b = (q1, .., q4, t)`` with prod q = 1 and t >= (q_i - 1/q_i)/2
determines the planar configuration

    p = (1, q1, q1 q2, q1 q2 q3)          (p1 fixed; any scale gives an isometric copy)
    P1 = ( p1,  p2)   P2 = (-p3,  p2)   P3 = (-p3, -p4)   P4 = ( p1, -p4)
    R1 = ( p1, t p1)  R2 = (-t p2, p2)  R3 = (-p3, -t p3) R4 = (t p4, -p4)

with circles C_i about R_i through the origin O.  The polyhedron has ideal
vertices O and infinity, vertices P~_i over P_i on the hemisphere over C_i,
and Q~_i over Q_i = OS_i cap P_iP_{i+1}, where S_i is the second
intersection of C_i and C_{i+1}.  Its faces are the vertical planes over
the lines P_iP_{i+1} and the hemispheres over C_i.  The dihedral angle at
the edge P~_i Q~_i is alpha_i with cos alpha_i = (q_i - t)/sqrt(1 + t^2);
all other dihedral angles are right angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .hypgeo import INF, GeometryError, Hemisphere, HPoint, VerticalPlane, dihedral_angle, distance
from .mesh import SurfaceMesh

B_TOL = 1e-12
IDEAL_TOL = 1e-10
HOLE_BAND = 1e-10


@dataclass(frozen=True)
class BParams:
    q: tuple
    t: float

    def __post_init__(self):
        q = tuple(float(x) for x in self.q)
        if len(q) != 4 or min(q) <= 0:
            raise ValueError(f"q must be 4 positive reals, got {self.q!r}")
        g = math.prod(q) ** 0.25
        q = tuple(x / g for x in q)
        t = float(self.t)
        if t < 0:
            raise ValueError(f"t must be nonnegative, got {t}")
        for i, qi in enumerate(q):
            need = 0.5 * (qi - 1 / qi)
            if t < need - B_TOL * max(1.0, abs(need)):
                raise ValueError(f"t={t} violates t >= (q{i + 1} - 1/q{i + 1})/2 = {need}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "t", t)

    @classmethod
    def parse(cls, values: Sequence[float]) -> "BParams":
        values = list(values)
        if len(values) != 5:
            raise ValueError("expected q1,q2,q3,q4,t")
        return cls(values[:4], values[4])

    def hole_margins(self) -> list:
        """(1 - q_i q_{i+1}) t - (q_i + q_{i+1}); nonnegative means holed."""
        q, t = self.q, self.t
        return [(1 - q[i] * q[(i + 1) % 4]) * t - (q[i] + q[(i + 1) % 4]) for i in range(4)]

    def holed_algebraic(self) -> list:
        return [m >= 0 for m in self.hole_margins()]

    def in_b0(self) -> bool:
        return not any(self.holed_algebraic())

    def shifted(self, k: int = 1) -> "BParams":
        """Cyclic relabelling q_i -> q_{i+k}."""
        return BParams(self.q[k:] + self.q[:k], self.t)

    def as_list(self) -> list:
        return list(self.q) + [self.t]


@dataclass(frozen=True)
class AngleParams:
    alpha: tuple

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        if len(alpha) != 4:
            raise ValueError("need 4 angles")
        for a in alpha:
            if not 0 <= a < math.pi:
                raise ValueError(f"angle {a} outside [0, pi)")
        object.__setattr__(self, "alpha", alpha)

    @property
    def cosines(self) -> tuple:
        return tuple(math.cos(a) for a in self.alpha)

    @classmethod
    def from_cosines(cls, c: Sequence[float]) -> "AngleParams":
        for ci in c:
            if not -1 < ci <= 1:
                raise ValueError(f"cosine {ci} outside (-1, 1]")
        return cls(tuple(math.acos(ci) for ci in c))


def angles_from_b(b: BParams) -> AngleParams:
    s = math.sqrt(1 + b.t * b.t)
    return AngleParams.from_cosines([min(1.0, (qi - b.t) / s) for qi in b.q])


def _solve_increasing(F, lo, hi, tol=1e-15, max_iter=200):
    # F increasing on [lo, hi], F(lo) <= 0 <= F(hi); Newton on a shrinking bracket, bisection fallback
    t = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f, df = F(t)
        if f == 0:
            return t
        if f < 0:
            lo = t
        else:
            hi = t
        step = t - f / df if df > 0 else None
        t = step if step is not None and lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi) if not lo <= t <= hi else t


def b_from_angles(alpha: AngleParams | Sequence[float], cosines: bool = False) -> BParams:
    """Inverse of ``angles_from_b``.

    With q_i(t) = c_i sqrt(1+t^2) + t each q_i is strictly increasing in t,
    so sum log q_i(t) = 0 has a single root; it is bracketed from the
    smallest t making all q_i positive and found by safeguarded Newton.
    """
    if isinstance(alpha, AngleParams):
        c = list(alpha.cosines)
    elif cosines:
        c = [float(x) for x in alpha]
    else:
        c = list(AngleParams(tuple(alpha)).cosines)
    for ci in c:
        if not -1 < ci <= 1:
            raise ValueError(f"cosine {ci} outside (-1, 1]")
    c = [min(ci, 1.0) for ci in c]

    def F(t):
        s = math.sqrt(1 + t * t)
        q = [ci * s + t for ci in c]
        if min(q) <= 0:
            return -math.inf, 0.0
        dq = [ci * t / s + 1 for ci in c]
        return sum(math.log(x) for x in q), sum(d / x for d, x in zip(dq, q))

    lo = max([0.0] + [-ci / math.sqrt(1 - ci * ci) for ci in c if ci < 0])
    if F(lo)[0] >= 0:
        t = lo
    else:
        hi = max(1.0, 2 * lo)
        while F(hi)[0] < 0:
            hi *= 2
        t = _solve_increasing(F, lo, hi)
    s = math.sqrt(1 + t * t)
    return BParams([ci * s + t for ci in c], t)


# ---------------------------------------------------------------- geometry


def _lift(z: complex, circle: Hemisphere):
    """Point of the hemisphere over ``z``; a boundary point when the height vanishes."""
    h2 = circle.radius**2 - abs(z - circle.center) ** 2
    if h2 < 0 and -h2 > (IDEAL_TOL * circle.radius) ** 2 * 1e4:
        raise GeometryError(f"{z} is outside the circle {circle}")
    h = math.sqrt(max(h2, 0.0))
    if h < IDEAL_TOL * circle.radius:
        return complex(z)
    return HPoint.from_z(z, h)


def _line_intersection(a: complex, da: complex, b: complex, db: complex) -> complex:
    cross = (da.conjugate() * db).imag
    if abs(cross) <= 1e-15 * abs(da) * abs(db):
        raise GeometryError("parallel lines")
    s = ((b - a).conjugate() * db).imag / cross
    return a + s * da


@dataclass
class TrapezohedronGeometry:
    b: BParams
    p: list
    P: list
    R: list
    S: list
    Q: list
    C: list
    facesV: list
    facesH: list
    Ptilde: list
    Qtilde: list
    holed: list
    alpha: list
    segment_params: list = field(repr=False)
    scale: float = 1.0

    @property
    def interior_sample(self) -> HPoint:
        # the vertical ray over O lies inside the polyhedron
        return HPoint(0.0, 0.0, self.p[0])

    def is_ideal(self, v) -> bool:
        return not isinstance(v, HPoint)

    def to_json(self) -> dict:
        def pt(z):
            return [z.real, z.imag]

        def vert(v):
            if isinstance(v, HPoint):
                return {"ideal": False, "x": v.x, "y": v.y, "h": v.h}
            return {"ideal": True, "x": v.real, "y": v.imag}

        try:
            lengths = [None if math.isinf(x) else x for x in edge_lengths(self, strict=False)]
        except GeometryError:
            lengths = None
        return {
            "schema": "geometry/1",
            "b": {"q": list(self.b.q), "t": self.b.t},
            "p": list(self.p),
            "P": [pt(z) for z in self.P],
            "R": [pt(z) for z in self.R],
            "S": [pt(z) for z in self.S],
            "Q": [pt(z) for z in self.Q],
            "circles": [{"center": pt(c.center), "radius": c.radius} for c in self.C],
            "faces_vertical": [{"through": pt(v.through), "direction": pt(v.direction)} for v in self.facesV],
            "faces_hemisphere": [{"center": pt(h.center), "radius": h.radius} for h in self.facesH],
            "Ptilde": [vert(v) for v in self.Ptilde],
            "Qtilde": [vert(v) for v in self.Qtilde],
            "holed": list(self.holed),
            "holed_algebraic": self.b.holed_algebraic(),
            "alpha": list(self.alpha),
            "edge_lengths": lengths,
        }


def build_geometry(b: BParams, scale: float = 1.0) -> TrapezohedronGeometry:
    """Planar data and lifted vertices for ``b``; ``scale`` is p1."""
    if not isinstance(b, BParams):
        b = BParams.parse(b)
    q, t = b.q, b.t
    p1 = float(scale)
    p = [p1, p1 * q[0], p1 * q[0] * q[1], p1 * q[0] * q[1] * q[2]]
    P = [complex(p[0], p[1]), complex(-p[2], p[1]), complex(-p[2], -p[3]), complex(p[0], -p[3])]
    R = [complex(p[0], t * p[0]), complex(-t * p[1], p[1]), complex(-p[2], -t * p[2]), complex(t * p[3], -p[3])]
    C = [Hemisphere(r, abs(r)) for r in R]
    S, Q, lam = [], [], []
    for i in range(4):
        j = (i + 1) % 4
        # second intersection of two circles through O: reflection of O in the line of centres
        d = R[j] - R[i]
        foot = R[i] - ((R[i] * d.conjugate()).real / abs(d) ** 2) * d
        S.append(2 * foot)
        Qi = _line_intersection(0j, S[i], P[i], P[j] - P[i])
        Q.append(Qi)
        seg = P[j] - P[i]
        lam.append(((Qi - P[i]) * seg.conjugate()).real / abs(seg) ** 2)
    facesV = [VerticalPlane(P[i], P[(i + 1) % 4] - P[i]) for i in range(4)]
    Ptilde = [_lift(P[i], C[i]) for i in range(4)]
    Qtilde = [_lift(Q[i], C[i]) for i in range(4)]
    holed = [not (-0.0 <= x <= 1.0) for x in lam]
    alpha = list(angles_from_b(b).alpha)
    return TrapezohedronGeometry(
        b=b, p=p, P=P, R=R, S=S, Q=Q, C=C, facesV=facesV, facesH=list(C),
        Ptilde=Ptilde, Qtilde=Qtilde, holed=holed, alpha=alpha, segment_params=lam, scale=p1,
    )


def hole_flags(b: BParams) -> list:
    """Per index: (algebraic, geometric, in_band) hole verdicts."""
    g = build_geometry(b)
    out = []
    for i, margin in enumerate(b.hole_margins()):
        scale = max(1.0, abs(b.q[i] + b.q[(i + 1) % 4]))
        out.append((margin >= 0, g.holed[i], abs(margin) <= HOLE_BAND * scale))
    return out


# ---------------------------------------------------------------- checks


EDGE_NAMES = ("inf-P", "L", "Q-P", "O-Q")


def face_pairs(g: TrapezohedronGeometry) -> list:
    """The 16 edges as (name, index, plane F, plane G, expected angle)."""
    V, H = g.facesV, g.facesH
    out = []
    for i in range(4):
        j = (i + 1) % 4
        out.append(("inf-P", i, V[i - 1], V[i], math.pi / 2))
        out.append(("L", i, V[i], H[i], g.alpha[i]))
        out.append(("Q-P", i, V[i], H[j], math.pi / 2))
        out.append(("O-Q", i, H[i], H[j], math.pi / 2))
    return out


@dataclass
class DihedralReport:
    l_angles: list
    skipped: list
    max_alpha_error: float
    max_right_error: float
    edges: list

    def to_json(self):
        return {
            "l_angles": self.l_angles,
            "skipped": self.skipped,
            "max_alpha_error": self.max_alpha_error,
            "max_right_angle_error": self.max_right_error,
            "edges": self.edges,
        }


def check_dihedrals(g: TrapezohedronGeometry) -> DihedralReport:
    """Measure all 16 dihedral angles on the side of the ray over O.

    Edges whose faces are tangent (alpha_i = 0, ideal vertex) are skipped and
    listed in ``skipped``.
    """
    sample = g.interior_sample
    l_angles = [None] * 4
    skipped = []
    alpha_err = right_err = 0.0
    edges = []
    for name, i, F, G, expected in face_pairs(g):
        if name == "L" and isinstance(g.Ptilde[i], complex) and isinstance(g.Qtilde[i], complex):
            skipped.append(f"L{i + 1}")
            continue
        try:
            angle = dihedral_angle(F, G, sample)
        except GeometryError:
            skipped.append(f"{name}{i + 1}")
            continue
        edges.append({"edge": f"{name}{i + 1}", "angle": angle, "expected": expected})
        if name == "L":
            l_angles[i] = angle
            alpha_err = max(alpha_err, abs(angle - expected))
        else:
            right_err = max(right_err, abs(angle - expected))
    return DihedralReport(l_angles, skipped, alpha_err, right_err, edges)


def edge_lengths(g: TrapezohedronGeometry, strict: bool = True) -> list:
    """Hyperbolic lengths of the edges P~_i Q~_i; ``inf`` when an endpoint is ideal.

    With ``strict`` an ideal endpoint raises instead.
    """
    out = []
    for i in range(4):
        a, b = g.Ptilde[i], g.Qtilde[i]
        if not (isinstance(a, HPoint) and isinstance(b, HPoint)):
            if strict:
                raise GeometryError(f"edge L{i + 1} has an ideal endpoint")
            out.append(math.inf)
            continue
        d = distance(a, b)
        if d < 1e-14:
            raise GeometryError(f"edge L{i + 1} has zero length")
        out.append(d)
    return out


# vertex slots in the boundary mesh
V_INF, V_O = 0, 1


def _P(i):
    return 2 + i % 4


def _Q(i):
    return 6 + i % 4


def boundary_mesh(g: TrapezohedronGeometry, diagonal: str = "first") -> SurfaceMesh:
    """16 outward-oriented triangles covering the eight faces.

    Vertical face i is (inf, P~_i, Q~_i, P~_{i+1}); the hemisphere face over
    C_{i+1} is (O, Q~_{i+1}, P~_{i+1}, Q~_i).  Each quad is split along the
    diagonal from its first vertex (``diagonal="other"`` uses the second
    diagonal).  Holes are not modelled; in the holed regime the surface
    self-intersects and its cone sum is the degree-weighted volume.
    """
    verts = [INF, 0j] + list(g.Ptilde) + list(g.Qtilde)
    tris, carriers, labels = [], [], []
    for i in range(4):
        j = (i + 1) % 4
        quads = [
            ((V_INF, _P(i), _Q(i), _P(j)), g.facesV[i], f"V{i + 1}"),
            ((V_O, _Q(j), _P(j), _Q(i)), g.facesH[j], f"H{j + 1}"),
        ]
        for (a, b_, c, d), plane, label in quads:
            if diagonal == "first":
                pair = [(a, b_, c), (a, c, d)]
            else:
                pair = [(a, b_, d), (b_, c, d)]
            for tri in pair:
                tris.append(tri)
                carriers.append(plane)
                labels.append(label)
    return SurfaceMesh(verts, np.array(tris), carriers, labels)


def geometry_from_json(obj: dict) -> BParams:
    """Parse {"q": [...], "t": ...} or {"alpha": [...]} input documents."""
    if "alpha" in obj:
        return b_from_angles(AngleParams(tuple(obj["alpha"])))
    if "q" in obj and "t" in obj:
        return BParams(obj["q"], obj["t"])
    raise ValueError('expected {"q": [..4..], "t": ..} or {"alpha": [..4..]}')


def random_b(rng: np.random.Generator, in_b0: Optional[bool] = None, spread: float = 1.0, max_tries: int = 10000) -> BParams:
    """Random point of B (optionally restricted to B_0 or its complement)."""
    for _ in range(max_tries):
        q = np.exp(rng.normal(0.0, spread, 4))
        q = q / np.prod(q) ** 0.25
        tmin = max(0.0, max(0.5 * (x - 1 / x) for x in q))
        t = tmin + rng.exponential(1.0)
        b = BParams(q, t)
        if in_b0 is None or b.in_b0() == in_b0:
            return b
    raise RuntimeError("could not sample the requested region")
