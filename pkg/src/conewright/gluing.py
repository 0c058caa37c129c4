"""Face pairings, edge cycles and holonomy words of glued polyhedra.

A gluing document (``"schema": "gluing/1"``) lists copies of a polyhedron,
three boundary anchors per (copy, face) spanning the face's carrier plane,
pairings that send a source face onto a target face anchor-by-anchor, and
edge cycles as signed sequences of pairings.

The isometry of a pairing maps the source copy into the position adjacent
to the target copy across the target face.  An edge cycle starting in copy
``c`` at the edge between faces F and G crosses G first, then F, G, ... and
the ordered product of the crossings is the rotation about the edge,
oriented so that F turns to G through the interior, by the total dihedral
angle.

Anchors may be numbers, ``[x, y]`` pairs, ``"inf"``, or symbols naming
points of a trapezohedron geometry (``O``, ``P1``, ``Q2``, ``R3``, ``S4``,
``A1`` = 2 R1, ``T1`` = (1 + i) R1); mirrored copies use complex conjugates.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Sequence

import numpy as np

from .hypgeo import (
    INF,
    GeometryError,
    Geodesic,
    HPoint,
    Isometry,
    IsomClass,
    Kind,
    Plane,
    Hemisphere,
    apply_interior,
    as_boundary,
    classify,
    fixes_geodesic,
    inward_normals,
    isometry_from_boundary_triples,
    plane_intersection,
    plane_through,
    rotation_angle,
    complex_length,
)

SCHEMA = "gluing/1"
ANGLE_TOL = 1e-8
CLOSURE_TOL = 1e-8


@dataclass
class Pairing:
    id: str
    source: tuple
    target: tuple


@dataclass
class EdgeCycle:
    id: str
    copy: int
    faces: tuple
    steps: list
    target: str
    axis: Optional[Geodesic] = None


@dataclass
class GluingSpec:
    copies: int
    faces: dict
    interiors: dict
    pairings: dict
    edges: list
    loci: list = field(default_factory=list)
    alpha: Optional[list] = None
    name: str = ""

    def __post_init__(self):
        used = {}
        for p in self.pairings.values():
            for end in (p.source, p.target):
                if end not in self.faces:
                    raise ValueError(f"pairing {p.id} uses unknown face {end}")
                if end in used:
                    raise ValueError(f"face {end} appears in pairings {used[end]} and {p.id}")
                used[end] = p.id
        for key, anchors in self.faces.items():
            if len(anchors) != 3:
                raise ValueError(f"face {key} needs three anchors")

    def plane(self, copy: int, face: str) -> Plane:
        return plane_through(*self.faces[(copy, face)])

    def target_angle(self, target: str) -> Optional[float]:
        """None for an identity target, else the angle in radians."""
        target = target.strip()
        if target in ("identity", "2pi", "0"):
            return None
        m = re.fullmatch(r"(?:(\d+(?:\.\d*)?)\*)?alpha(\d)", target)
        if m:
            if self.alpha is None:
                raise ValueError("target refers to alpha but the gluing has no angles")
            return float(m.group(1) or 1) * self.alpha[int(m.group(2)) - 1]
        return float(target)


# ---------------------------------------------------------------- loading


def _resolve(anchor, points: dict, mirror: bool):
    if isinstance(anchor, str) and anchor.strip().lower() not in ("inf", "infinity", "∞"):
        name = anchor.strip()
        if name in points:
            z = points[name]
        else:
            z = as_boundary(name)
    else:
        z = as_boundary(anchor)
    if z is INF:
        return INF
    return z.conjugate() if mirror else z


def geometry_points(geometry) -> dict:
    pts = {"O": 0j}
    for i in range(4):
        n = i + 1
        pts[f"P{n}"] = geometry.P[i]
        pts[f"Q{n}"] = geometry.Q[i]
        pts[f"R{n}"] = geometry.R[i]
        pts[f"S{n}"] = geometry.S[i]
        pts[f"A{n}"] = 2 * geometry.R[i]
        pts[f"T{n}"] = (1 + 1j) * geometry.R[i]
    return pts


def load_spec(doc: dict, geometry=None) -> GluingSpec:
    """Build a GluingSpec from a parsed JSON document, resolving symbols against ``geometry``."""
    if doc.get("schema") != SCHEMA:
        raise ValueError(f'expected "schema": "{SCHEMA}", got {doc.get("schema")!r}')
    points = geometry_points(geometry) if geometry is not None else {}
    templates = doc.get("face_templates", {})
    faces, interiors = {}, {}
    copies = doc["copies"]
    for entry in copies:
        cid = int(entry["id"])
        mirror = bool(entry.get("mirror", False))
        face_map = entry.get("faces", templates)
        for fid, anchors in face_map.items():
            try:
                faces[(cid, fid)] = tuple(_resolve(a, points, mirror) for a in anchors)
            except ValueError as err:
                raise ValueError(f"copy {cid} face {fid}: {err}") from err
        interior = entry.get("interior", "interior")
        if interior == "interior":
            if geometry is None:
                raise ValueError(f"copy {cid}: symbolic interior needs a geometry (--b)")
            s = geometry.interior_sample
            interiors[cid] = HPoint(s.x, -s.y if mirror else s.y, s.h)
        else:
            x, y, h = interior
            interiors[cid] = HPoint(x, y, h)
    pairings = {}
    for p in doc["pairings"]:
        if p["id"] in pairings:
            raise ValueError(f"duplicate pairing id {p['id']!r}")
        pairings[p["id"]] = Pairing(p["id"], (int(p["source"][0]), p["source"][1]), (int(p["target"][0]), p["target"][1]))
    edges = []
    for e in doc.get("edges", []):
        ax = e.get("axis")
        axis_geod = Geodesic(*(as_boundary(a) for a in ax)) if ax else None
        edges.append(
            EdgeCycle(e["id"], int(e["copy"]), tuple(e["faces"]), [(s[0], int(s[1])) for s in e["steps"]], e.get("target", "identity"), axis_geod)
        )
    alpha = list(geometry.alpha) if geometry is not None else doc.get("alpha")
    return GluingSpec(len(copies), faces, interiors, pairings, edges, doc.get("loci", []), alpha, doc.get("name", ""))


def shipped_document(name: str = "weave4") -> dict:
    with resources.files("conewright.data").joinpath(f"{name}.json").open() as fh:
        return json.load(fh)


def weave_gluing(b, doc: Optional[dict] = None) -> GluingSpec:
    """The four-copy trapezohedron gluing instantiated at ``b``."""
    from .polyhedron import build_geometry

    return load_spec(doc or shipped_document("weave4"), build_geometry(b))


# ---------------------------------------------------------------- isometries


def _plane_sample(plane: Plane) -> HPoint:
    if isinstance(plane, Hemisphere):
        return HPoint.from_z(plane.center, plane.radius)
    return HPoint.from_z(plane.through, 1.0)


def pairing_isometry(spec: GluingSpec, pairing_id: str, check: bool = True) -> Isometry:
    """Isometry taking the source face's anchors to the target face's anchors."""
    p = spec.pairings[pairing_id]
    src, dst = spec.faces[p.source], spec.faces[p.target]
    g = isometry_from_boundary_triples(src, dst)
    if check:
        target_plane = plane_through(*dst)
        image = apply_interior(g, _plane_sample(plane_through(*src)))
        if not target_plane.contains(image, 1e-9):
            raise GeometryError(f"pairing {pairing_id} does not carry its face to the target plane")
    return g


def _parse_word(word) -> list:
    if isinstance(word, str):
        out = []
        for token in word.split():
            m = re.fullmatch(r"([^\^]+)(?:\^(-?\d+))?", token)
            if not m:
                raise ValueError(f"malformed word token {token!r}")
            out.append((m.group(1), int(m.group(2) or 1)))
        return out
    return [(g, int(e)) for g, e in word]


def holonomy_word(spec: GluingSpec, word) -> Isometry:
    """Ordered product of pairing isometries; ``word`` is "g1 g2^-1 ..." or [(id, exp), ...]."""
    result = np.eye(2, dtype=complex)
    for gen, exp in _parse_word(word):
        if gen not in spec.pairings:
            raise KeyError(f"unknown generator {gen!r}")
        g = pairing_isometry(spec, gen, check=False)
        m = g.matrix if exp > 0 else g.inverse().matrix
        for _ in range(abs(exp)):
            result = result @ m
        result = Isometry.from_matrix(result).matrix
    return Isometry.from_matrix(result)


# ---------------------------------------------------------------- edge cycles


def _tangent(geod: Geodesic, X: HPoint) -> np.ndarray:
    u, v = geod.start, geod.end
    if v is INF:
        return np.array([0.0, 0.0, 1.0])
    if u is INF:
        return np.array([0.0, 0.0, -1.0])
    d = (v - u) / abs(v - u)
    m = (u + v) / 2
    rho = np.array([X.x - m.real, X.y - m.imag, X.h])
    rho /= np.linalg.norm(rho)
    d3 = np.array([d.real, d.imag, 0.0])
    T = d3 - np.dot(d3, rho) * rho
    return T / np.linalg.norm(T)


def oriented_edge(F: Plane, G: Plane, sample: HPoint) -> Geodesic:
    """The geodesic F cap G oriented so that F turns to G through ``sample``'s wedge right-handedly."""
    geod = plane_intersection(F, G)
    X, nF, nG = inward_normals(F, G, sample)
    T = _tangent(geod, X)
    dF = np.cross(T, nF)
    if np.dot(dF, nG) < 0:
        dF = -dF
    dG = np.cross(T, nG)
    if np.dot(dG, nF) < 0:
        dG = -dG
    return geod if np.dot(T, np.cross(dF, dG)) > 0 else geod.reversed()


@dataclass
class EdgeReport:
    edge: str
    composite: Isometry
    cls: IsomClass
    closed: bool
    angle: Optional[float]
    target_angle: Optional[float]
    passed: bool

    def to_json(self) -> dict:
        return {
            "edge": self.edge,
            "composite": self.composite.to_json(),
            "class": self.cls.to_json(),
            "closed": self.closed,
            "angle": self.angle,
            "target_angle": self.target_angle,
            "target": "identity" if self.target_angle is None else self.target_angle,
            "pass": self.passed,
        }


def _angle_diff(a: float, b: float) -> float:
    d = (a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def edge_axis(spec: GluingSpec, cycle: EdgeCycle) -> Geodesic:
    if cycle.axis is not None:
        return cycle.axis
    F = spec.plane(cycle.copy, cycle.faces[0])
    G = spec.plane(cycle.copy, cycle.faces[1])
    return oriented_edge(F, G, spec.interiors[cycle.copy])


def edge_cycle_composite(spec: GluingSpec, edge_id: str) -> EdgeReport:
    cycle = next((e for e in spec.edges if e.id == edge_id), None)
    if cycle is None:
        raise KeyError(f"unknown edge {edge_id!r}")
    composite = holonomy_word(spec, cycle.steps)
    geod = edge_axis(spec, cycle)
    cls = classify(composite)
    target = spec.target_angle(cycle.target)
    closed = fixes_geodesic(composite, geod, CLOSURE_TOL)
    angle = None
    if closed:
        cl = complex_length(composite, geod, 1e-6)
        angle = cl.imag
        closed = abs(cl.real) <= CLOSURE_TOL
    if not closed:
        passed = False
    elif target is None or _angle_diff(target, 0.0) <= ANGLE_TOL:
        passed = composite.is_identity(1e-9)
    else:
        passed = cls.kind is Kind.ELLIPTIC and _angle_diff(angle, target) <= ANGLE_TOL
    return EdgeReport(cycle.id, composite, cls, closed, angle, target, passed)


def check_all(spec: GluingSpec) -> list:
    return [edge_cycle_composite(spec, e.id) for e in spec.edges]


def locus_holonomy(spec: GluingSpec, index: int) -> tuple:
    """(meridian, longitude) isometries of cone locus ``index`` (1-based)."""
    for locus in spec.loci:
        if int(locus["index"]) == index:
            return holonomy_word(spec, locus["meridian"]), holonomy_word(spec, locus["longitude"])
    raise KeyError(f"no locus {index}")


# ---------------------------------------------------------------- wedges


def wedge_gluing(k: int, theta: float) -> GluingSpec:
    """k copies of the wedge 0 <= arg z <= theta around the axis (0, inf).

    Copy j+1 is glued to copy j along face "B" of copy j; the edge cycle
    is the product of the k crossings and is a rotation by k*theta.
    """
    faces, interiors, pairings = {}, {}, {}
    for j in range(k):
        faces[(j, "A")] = (0j, INF, 1 + 0j)
        faces[(j, "B")] = (0j, INF, complex(math.cos(theta), math.sin(theta)))
        interiors[j] = HPoint(math.cos(theta / 2), math.sin(theta / 2), 1.0)
    for j in range(k):
        pid = f"w{j}"
        pairings[pid] = Pairing(pid, ((j + 1) % k, "A"), (j, "B"))
    steps = [(f"w{j}", 1) for j in range(k)]
    edge = EdgeCycle("axis", 0, ("A", "B"), steps, str(k * theta), Geodesic(0j, INF))
    return GluingSpec(k, faces, interiors, pairings, [edge], [], None, f"wedge{k}")


def spec_to_json(spec: GluingSpec) -> dict:
    """Concrete (numeric-anchor) gluing document."""

    def bp(z):
        return "inf" if z is INF else [z.real, z.imag]

    copies = []
    for c in range(spec.copies):
        s = spec.interiors[c]
        copies.append({
            "id": c,
            "interior": [s.x, s.y, s.h],
            "faces": {f: [bp(z) for z in anchors] for (cc, f), anchors in spec.faces.items() if cc == c},
        })
    return {
        "schema": SCHEMA,
        "name": spec.name,
        "alpha": spec.alpha,
        "copies": copies,
        "pairings": [{"id": p.id, "source": list(p.source), "target": list(p.target)} for p in spec.pairings.values()],
        "edges": [
            {"id": e.id, "copy": e.copy, "faces": list(e.faces), "steps": [list(s) for s in e.steps], "target": e.target}
            | ({"axis": [bp(e.axis.start), bp(e.axis.end)]} if e.axis is not None else {})
            for e in spec.edges
        ],
        "loci": spec.loci,
    }
