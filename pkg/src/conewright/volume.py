"""Signed hyperbolic volumes.

Every signed volume here reduces to cones from infinity.  For a geodesic
triangle on the hemisphere of centre c and radius r, the region between the
triangle and infinity has volume

    J = integral over the projected triangle of dA / (2 (r^2 - |z - c|^2)),

and splitting the projected triangle into right triangles at the foot of the
perpendicular from c gives J in closed form through the Lobachevsky function.
A tetrahedron is then the alternating sum of the four cones over its faces,
and a closed oriented mesh is the sum of the tetrahedra it spans with an apex,
which makes the result independent of the apex up to rounding.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .hypgeo import INF, GeometryError, HPoint, as_boundary
from .mesh import SurfaceMesh

# ---------------------------------------------------------------- Lobachevsky


def _bernoulli(n_max):
    # exact B_0..B_n_max with B_1 = +1/2; only the even ones are used
    B = []
    for m in range(n_max + 1):
        B.append(Fraction(1) - sum(math.comb(m, k) * B[k] / (m - k + 1) for k in range(m)))
    return B


def _clausen_coefficients(n_terms=40):
    # Cl2(x) = x - x log|x| + sum_n c_n x^(2n+1),  c_n = |B_2n| / (2n (2n+1)!)
    B = _bernoulli(2 * n_terms)
    return np.array(
        [float(abs(B[2 * n]) / (2 * n * math.factorial(2 * n + 1))) for n in range(1, n_terms + 1)]
    )


_CL2_COEF = _clausen_coefficients()


def clausen(x):
    """Clausen function Cl2, vectorized."""
    x = np.asarray(x, dtype=float)
    y = np.remainder(x + np.pi, 2 * np.pi) - np.pi
    y2 = y * y
    acc = np.zeros_like(y)
    for c in _CL2_COEF[::-1]:
        acc = acc * y2 + c
    with np.errstate(divide="ignore", invalid="ignore"):
        log_term = np.where(y == 0, 0.0, y * np.log(np.abs(y)))
    return y - log_term + acc * y2 * y


def lobachevsky(theta):
    """Lobachevsky function, ``-int_0^theta log|2 sin u| du`` (odd, pi-periodic)."""
    out = 0.5 * clausen(2 * np.asarray(theta, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def ideal_tetra_volume(z) -> float:
    """Volume of the ideal tetrahedron with vertex cross-ratio shape ``z`` (Im z > 0 positive)."""
    z = complex(z)
    if z.imag < 0:
        return -ideal_tetra_volume(z.conjugate())
    a = math.atan2(z.imag, z.real)
    w = 1 / (1 - z)
    b = math.atan2(w.imag, w.real)
    return lobachevsky(a) + lobachevsky(b) + lobachevsky(math.pi - a - b)


# ---------------------------------------------------------------- cones from infinity


def _right_cone(delta, phi):
    # integral over the right triangle with vertex at the centre, leg a = r cos(delta),
    # angle phi at the centre, of dA / (2 (r^2 - rho^2))
    phi = np.minimum(phi, delta)
    return 0.25 * (lobachevsky(delta + phi) - lobachevsky(delta - phi) + 2 * lobachevsky(np.pi / 2 - phi))


def _sector_cone(c, r, u, w):
    # signed integral over the planar triangle (c, u, w)
    d = w - u
    dd = (d * d.conjugate()).real
    safe = np.where(dd > 0, dd, 1.0)
    s = ((c - u) * d.conjugate()).real / safe
    foot = u + s * d
    a = np.abs(foot - c)
    delta = np.arccos(np.clip(a / r, 0.0, 1.0))
    out = np.zeros(np.shape(c))
    for z, sgn in ((w, 1.0), (u, -1.0)):
        leg = np.abs(z - foot)
        phi = np.arctan2(leg, a)
        orient = np.sign(((foot - c).conjugate() * (z - foot)).imag)
        out += sgn * orient * _right_cone(delta, phi)
    return np.where(dd > 0, out, 0.0)


def cone_from_infinity(p1: np.ndarray, p2: np.ndarray, p3: np.ndarray) -> np.ndarray:
    """Signed volume of the tetrahedra (inf, p1, p2, p3), vectorized.

    ``p*`` are arrays of shape (N, 3) holding (x, y, h) with h >= 0 (h = 0 for
    finite ideal points).  Triangles with collinear projection lie in a
    vertical plane and contribute zero.
    """
    p1, p2, p3 = (np.atleast_2d(np.asarray(p, float)) for p in (p1, p2, p3))
    z1 = p1[:, 0] + 1j * p1[:, 1]
    z2 = p2[:, 0] + 1j * p2[:, 1]
    z3 = p3[:, 0] + 1j * p3[:, 1]
    e12, e13 = z2 - z1, z3 - z1
    cross = (e12.conjugate() * e13).imag
    # hemisphere through the three points: |z - c|^2 + h^2 = r^2, solved relative to p1
    # 2 Re(conj(e) c') = |e|^2 + h^2 - h1^2 with c' = c - z1
    rhs2 = np.abs(e12) ** 2 + p2[:, 2] ** 2 - p1[:, 2] ** 2
    rhs3 = np.abs(e13) ** 2 + p3[:, 2] ** 2 - p1[:, 2] ** 2
    scale = np.maximum(np.abs(e12) * np.abs(e13), 1e-300)
    flat = np.abs(cross) <= 1e-14 * scale
    den = np.where(flat, 1.0, 2 * cross)
    # solve [[x12, y12], [x13, y13]] c' = [rhs2/2, rhs3/2]
    cx = (rhs2 * e13.imag - rhs3 * e12.imag) / den
    cy = (rhs3 * e12.real - rhs2 * e13.real) / den
    cprime = cx + 1j * cy
    r = np.sqrt(np.abs(cprime) ** 2 + p1[:, 2] ** 2)
    c = z1 + cprime
    J = _sector_cone(c, r, z1, z2) + _sector_cone(c, r, z2, z3) + _sector_cone(c, r, z3, z1)
    # counterclockwise projection with the region above it is negatively oriented
    return np.where(flat, 0.0, -J)


# ---------------------------------------------------------------- tetrahedra


@dataclass(frozen=True)
class SignedVolume:
    value: float
    est_error: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("volume must be finite")
        if self.est_error < 0:
            raise ValueError("error estimate must be nonnegative")

    def __float__(self):
        return self.value

    def __neg__(self):
        return SignedVolume(-self.value, self.est_error)

    def __add__(self, other):
        return SignedVolume(self.value + other.value, self.est_error + other.est_error)

    def to_json(self):
        return {"value": self.value, "est_error": self.est_error}


@dataclass(frozen=True)
class Tetra:
    vertices: tuple

    def __post_init__(self):
        verts = tuple(v if isinstance(v, HPoint) else as_boundary(v) for v in self.vertices)
        if len(verts) != 4:
            raise ValueError("a tetrahedron has 4 vertices")
        object.__setattr__(self, "vertices", verts)
        for i in range(4):
            for j in range(i + 1, 4):
                if _coincide(verts[i], verts[j]):
                    raise GeometryError(f"tetrahedron vertices {i} and {j} coincide")


def _coincide(v, w, tol=1e-14):
    if v is INF or w is INF:
        return v is w
    pv, pw = _coords(v), _coords(w)
    return float(np.linalg.norm(pv - pw)) <= tol * max(1.0, float(np.linalg.norm(pv)))


def _coords(v) -> np.ndarray:
    if isinstance(v, HPoint):
        return v.array()
    return np.array([v.real, v.imag, 0.0])


def _face_terms(pts: Sequence, inf_mask: Sequence[bool]) -> list:
    # signed volumes of (inf, face_k) for the faces opposite vertex k
    out = []
    for k in range(4):
        face = [i for i in range(4) if i != k]
        if any(inf_mask[i] for i in face):
            out.append(0.0)
        else:
            out.append(float(cone_from_infinity(*(pts[i] for i in face))[0]))
    return out


def tetra_volume(t: Tetra | Sequence) -> SignedVolume:
    """Signed volume; positive when the vertex frame is right handed."""
    if not isinstance(t, Tetra):
        t = Tetra(tuple(t))
    inf_mask = [v is INF for v in t.vertices]
    pts = [np.zeros(3) if m else _coords(v) for v, m in zip(t.vertices, inf_mask)]
    terms = _face_terms(pts, inf_mask)
    value = math.fsum((-1) ** k * terms[k] for k in range(4))
    err = 1e-14 * (1 + math.fsum(abs(x) for x in terms))
    return SignedVolume(value, err)


# ---------------------------------------------------------------- meshes


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CONEWRIGHT_THREADS", "1")))
    except ValueError:
        return 1


def _mesh_terms(xyz, at_inf, tris, apex_xyz, apex_inf) -> np.ndarray:
    """Per-triangle signed volumes of (apex, v1, v2, v3)."""
    v = [tris[:, k] for k in range(3)]
    n = len(tris)
    # skip triangles with a repeated vertex index or a repeated point
    degenerate = (v[0] == v[1]) | (v[1] == v[2]) | (v[0] == v[2])
    for i, j in ((0, 1), (1, 2), (0, 2)):
        both_inf = at_inf[v[i]] & at_inf[v[j]]
        same = np.all(xyz[v[i]] == xyz[v[j]], axis=1) & ~at_inf[v[i]] & ~at_inf[v[j]]
        degenerate |= both_inf | same
    total = np.zeros(n)

    def face(points, infs):
        out = np.zeros(n)
        ok = ~(infs[0] | infs[1] | infs[2]) & ~degenerate
        if ok.any():
            out[ok] = cone_from_infinity(*(p[ok] for p in points))
        return out

    P = [xyz[vk] for vk in v]
    I = [at_inf[vk] for vk in v]
    total += face(P, I)
    if not apex_inf:
        A = np.broadcast_to(apex_xyz, (n, 3))
        Af = np.zeros(n, dtype=bool)
        total -= face([A, P[1], P[2]], [Af, I[1], I[2]])
        total += face([A, P[0], P[2]], [Af, I[0], I[2]])
        total -= face([A, P[0], P[1]], [Af, I[0], I[1]])
    total[degenerate] = 0.0
    return total


def enclosed_volume(m: SurfaceMesh, apex=INF, check_closed: bool = True) -> SignedVolume:
    """Signed enclosed volume of a closed oriented mesh as a cone sum from ``apex``.

    The result is the degree-weighted volume of the complementary regions of
    the (possibly self-intersecting) surface.  ``apex`` may be an interior
    point or any boundary point, infinity being cheapest.
    """
    if check_closed and not m.is_closed():
        raise GeometryError("mesh is not a closed oriented surface")
    xyz, at_inf = m.arrays()
    if apex is INF:
        apex_xyz, apex_inf = np.zeros(3), True
    else:
        apex = apex if isinstance(apex, HPoint) else as_boundary(apex)
        apex_xyz, apex_inf = _coords(apex), False
    tris = m.triangles
    workers = _threads()
    if workers > 1 and len(tris) > 4096:
        chunks = np.array_split(tris, workers)
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda ch: _mesh_terms(xyz, at_inf, ch, apex_xyz, apex_inf), chunks))
        terms = np.concatenate(parts)
    else:
        terms = _mesh_terms(xyz, at_inf, tris, apex_xyz, apex_inf)
    # fsum is exactly rounded, so the result does not depend on chunking
    value = math.fsum(terms)
    err = 1e-14 * (1.0 + math.fsum(np.abs(terms)))
    return SignedVolume(value, err)


def structure_volume(b, apex=INF) -> SignedVolume:
    """Degree-weighted volume of the trapezohedron for ``b`` (BParams or (q1..q4, t))."""
    from .polyhedron import BParams, boundary_mesh, build_geometry

    if not isinstance(b, BParams):
        b = BParams(b[:4], b[4])
    return enclosed_volume(boundary_mesh(build_geometry(b)), apex)


# ---------------------------------------------------------------- Schlafli


@dataclass
class SchlafliReport:
    s: np.ndarray
    dV: np.ndarray
    predicted: np.ndarray
    rel_error: np.ndarray
    step: float

    @property
    def max_rel_error(self) -> float:
        return float(np.max(self.rel_error)) if len(self.rel_error) else 0.0

    def rows(self):
        return zip(self.s, self.dV, self.predicted, self.rel_error)


def schlafli_check(path: Callable[[float], object], steps: int = 1000, h: Optional[float] = None) -> SchlafliReport:
    """Compare dV/ds with -1/2 sum l_i dalpha_i/ds along ``path``.

    ``path(s)`` returns a point of B_0 for s in [0, 1].  Both derivatives are
    central differences with step ``h`` (default ``1/steps``) at the interior
    nodes ``s_k = k/steps``.  Relative error is taken against
    ``max(|dV|, |predicted|)`` with a floor of 1e-12, so a constant path
    reports zero.
    """
    from .polyhedron import BParams, angles_from_b, build_geometry, edge_lengths

    h = 1.0 / steps if h is None else h

    def at(s):
        b = path(s)
        if not isinstance(b, BParams):
            b = BParams(b[:4], b[4])
        if not b.in_b0():
            raise GeometryError(f"path leaves B_0 at s={s}")
        return b

    nodes = np.arange(1, steps) / steps
    dV, pred = [], []
    for s in nodes:
        bm, bp, b0 = at(s - h), at(s + h), at(s)
        vm, vp = structure_volume(bm).value, structure_volume(bp).value
        am, ap = np.array(angles_from_b(bm).alpha), np.array(angles_from_b(bp).alpha)
        lengths = np.array(edge_lengths(build_geometry(b0)))
        dV.append((vp - vm) / (2 * h))
        pred.append(-0.5 * float(np.dot(lengths, (ap - am) / (2 * h))))
    dV, pred = np.array(dV), np.array(pred)
    denom = np.maximum(np.maximum(np.abs(dV), np.abs(pred)), 1e-12)
    rel = np.abs(dV - pred) / denom
    rel = np.where(np.maximum(np.abs(dV), np.abs(pred)) <= 1e-12, 0.0, rel)
    return SchlafliReport(nodes, dV, pred, rel, h)


# ---------------------------------------------------------------- quadrature oracle


def to_klein(v) -> np.ndarray:
    """Upper half-space point (or boundary point) to the Klein ball model."""
    if v is INF:
        return np.array([0.0, 0.0, 1.0])
    x, y, h = _coords(v)
    den = x * x + y * y + (h + 1) ** 2
    p = np.array([2 * x, 2 * y, x * x + y * y + h * h - 1]) / den
    return 2 * p / (1 + p @ p)


def quadrature_tetra_volume(vertices: Sequence, order: int = 20) -> float:
    """Signed volume by Gauss quadrature of (1 - |x|^2)^-2 in the Klein model.

    Independent of the Lobachevsky route: the tetrahedron is straight in the
    Klein model, split barycentrically into 24 pieces, and each piece is
    collapsed (Duffy) onto its original vertex so an ideal vertex's 1/rho^2
    singularity cancels against the Jacobian.
    """
    K = [to_klein(v if isinstance(v, HPoint) or v is INF else as_boundary(v)) for v in vertices]
    sign = np.sign(np.linalg.det(np.array([K[1] - K[0], K[2] - K[0], K[3] - K[0]])))
    if sign == 0:
        return 0.0
    x, w = np.polynomial.legendre.leggauss(order)
    x, w = (x + 1) / 2, w / 2
    S, T, U = np.meshgrid(x, x, x, indexing="ij")
    W = (w[:, None, None] * w[None, :, None] * w[None, None, :]).ravel()
    S, T, U = S.ravel(), T.ravel(), U.ravel()
    centroid = sum(K) / 4
    total = 0.0
    for i in range(4):
        for j in range(4):
            if j == i:
                continue
            for k in range(4):
                if k in (i, j):
                    continue
                m = (K[i] + K[j]) / 2
                f = (K[i] + K[j] + K[k]) / 3
                g = centroid
                e1, e2, e3 = m - K[i], f - m, g - f
                jac = abs(np.linalg.det(np.array([e1, e2, e3])))
                # x = K_i + S y;  1 - |x|^2 expanded so an ideal K_i loses no digits
                y = e1 + T[:, None] * (e2 + U[:, None] * e3)
                one_minus = (1 - K[i] @ K[i]) - S * (2 * (y @ K[i]) + S * np.einsum("ij,ij->i", y, y))
                with np.errstate(divide="ignore", invalid="ignore"):
                    integrand = np.where(one_minus > 0, (S * S) / one_minus**2, 0.0)
                total += jac * float(np.sum(W * integrand * T))
    return float(sign * total)
