"""Oriented triangulated surfaces in H^3 with finite or ideal vertices."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .hypgeo import INF, HPoint, Isometry, Plane, apply_boundary, apply_interior, as_boundary


@dataclass
class SurfaceMesh:
    """Triangles are index triples; orientation is the vertex order (right-hand normal outward)."""

    vertices: list
    triangles: np.ndarray
    carriers: Optional[list] = None
    labels: Optional[list] = field(default=None, repr=False)

    def __post_init__(self):
        self.triangles = np.asarray(self.triangles, dtype=int).reshape(-1, 3)
        if self.carriers is not None and len(self.carriers) != len(self.triangles):
            raise ValueError("one carrier plane per triangle")

    def __len__(self):
        return len(self.triangles)

    def arrays(self):
        """``(xyz, at_inf)``: coordinates (ideal finite points at h=0) and the mask of infinity."""
        xyz = np.zeros((len(self.vertices), 3))
        at_inf = np.zeros(len(self.vertices), dtype=bool)
        for k, v in enumerate(self.vertices):
            if v is INF:
                at_inf[k] = True
            elif isinstance(v, HPoint):
                xyz[k] = (v.x, v.y, v.h)
            else:
                xyz[k, :2] = (v.real, v.imag)
        return xyz, at_inf

    def reversed(self) -> "SurfaceMesh":
        return SurfaceMesh(list(self.vertices), self.triangles[:, ::-1].copy(), self.carriers, self.labels)

    def transformed(self, g: Isometry) -> "SurfaceMesh":
        verts = [apply_interior(g, v) if isinstance(v, HPoint) else apply_boundary(g, v) for v in self.vertices]
        return SurfaceMesh(verts, self.triangles.copy(), None, self.labels)

    def __add__(self, other: "SurfaceMesh") -> "SurfaceMesh":
        n = len(self.vertices)
        return SurfaceMesh(
            list(self.vertices) + list(other.vertices),
            np.vstack([self.triangles, other.triangles + n]),
        )

    def directed_edges(self):
        t = self.triangles
        return np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])

    def is_closed(self) -> bool:
        """Every directed edge occurs exactly once and its reverse exactly once."""
        edges = [tuple(e) for e in self.directed_edges()]
        seen = set(edges)
        if len(seen) != len(edges):
            return False
        return all((b, a) in seen for a, b in edges)

    def euler_characteristic(self) -> int:
        used = np.unique(self.triangles)
        undirected = {tuple(sorted(e)) for e in self.directed_edges()}
        return len(used) - len(undirected) + len(self.triangles)

    def distinct_vertices(self, tol: float = 1e-10) -> list:
        out = []
        for v in self.vertices:
            if not any(_same_point(v, w, tol) for w in out):
                out.append(v)
        return out

    def check_carriers(self, tol: float = 1e-9) -> float:
        """Largest plane-membership residual flag; raises if any vertex is off its carrier."""
        if self.carriers is None:
            return 0.0
        for k, (tri, plane) in enumerate(zip(self.triangles, self.carriers)):
            for idx in tri:
                if not plane.contains(self.vertices[idx], tol):
                    raise ValueError(f"vertex {idx} of triangle {k} is off its carrier plane")
        return tol

    # ------------------------------------------------------------ OBJ i/o

    def to_obj(self, clip_height: float = 10.0) -> tuple[str, dict]:
        """OBJ text plus the ideal-vertex sidecar.

        Infinity is written at height ``clip_height`` over the centroid of the
        finite vertices; finite ideal points at height ``1/clip_height``.
        """
        xyz, at_inf = self.arrays()
        finite = ~at_inf
        centre = xyz[finite, :2].mean(axis=0) if finite.any() else np.zeros(2)
        ideal = []
        lines = ["# conewright surface mesh"]
        for k, v in enumerate(self.vertices):
            if v is INF:
                x, y, h = centre[0], centre[1], clip_height
                ideal.append({"index": k, "point": "inf"})
            elif isinstance(v, HPoint):
                x, y, h = v.x, v.y, v.h
            else:
                x, y, h = v.real, v.imag, 1.0 / clip_height
                ideal.append({"index": k, "point": [v.real, v.imag]})
            lines.append(f"v {x:.17g} {y:.17g} {h:.17g}")
        for a, b, c in self.triangles:
            lines.append(f"f {a + 1} {b + 1} {c + 1}")
        sidecar = {"schema": "ideal-vertices/1", "clip_height": clip_height, "ideal": ideal}
        return "\n".join(lines) + "\n", sidecar

    @classmethod
    def from_obj(cls, text: str, sidecar: Optional[dict] = None) -> "SurfaceMesh":
        verts, tris = [], []
        for lineno, line in enumerate(text.splitlines(), 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            try:
                if parts[0] == "v":
                    x, y, h = map(float, parts[1:4])
                    verts.append(HPoint(x, y, h))
                elif parts[0] == "f":
                    idx = [int(p.split("/")[0]) - 1 for p in parts[1:]]
                    if len(idx) != 3:
                        raise ValueError("only triangular faces are supported")
                    tris.append(idx)
            except (ValueError, IndexError) as err:
                raise ValueError(f"OBJ line {lineno}: {err}") from err
        for item in (sidecar or {}).get("ideal", []):
            verts[item["index"]] = as_boundary(item["point"])
        return cls(verts, np.array(tris, dtype=int).reshape(-1, 3))


def _same_point(v, w, tol):
    if v is INF or w is INF:
        return v is w
    if isinstance(v, HPoint) != isinstance(w, HPoint):
        return False
    if isinstance(v, HPoint):
        return float(np.linalg.norm(v.array() - w.array())) <= tol * max(1.0, np.linalg.norm(v.array()))
    return abs(v - w) <= tol * max(1.0, abs(v))


def icosphere(level: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit-sphere vertices and outward-oriented triangles of a subdivided icosahedron."""
    phi = (1 + 5**0.5) / 2
    verts = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    pts = [np.array(v, float) / np.linalg.norm(v) for v in verts]
    for _ in range(level):
        cache = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = pts[i] + pts[j]
                pts.append(m / np.linalg.norm(m))
                cache[key] = len(pts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    return np.array(pts), np.array(faces, dtype=int)


def geodesic_sphere(radius: float, level: int, center: HPoint = HPoint(0.0, 0.0, 1.0)) -> SurfaceMesh:
    """Vertices on the hyperbolic sphere of given radius, outward oriented.

    The hyperbolic sphere about (0,0,1) is the Euclidean sphere with centre
    height cosh(r) and radius sinh(r); other centres are reached by an
    isometry.
    """
    pts, faces = icosphere(level)
    ch, sh = np.cosh(radius), np.sinh(radius)
    verts = [HPoint(sh * p[0], sh * p[1], ch + sh * p[2]) for p in pts]
    mesh = SurfaceMesh(verts, faces)
    if (center.x, center.y, center.h) != (0.0, 0.0, 1.0):
        g = Isometry.from_matrix([[center.h**0.5, center.z / center.h**0.5], [0, 1 / center.h**0.5]])
        mesh = mesh.transformed(g)
    return mesh


def write_obj(mesh: SurfaceMesh, path, clip_height: float = 10.0) -> str:
    """Write ``path`` and its ``.ideal.json`` sidecar; returns the sidecar path."""
    text, sidecar = mesh.to_obj(clip_height)
    with open(path, "w") as fh:
        fh.write(text)
    side = str(path) + ".ideal.json"
    with open(side, "w") as fh:
        json.dump(sidecar, fh, indent=2)
    return side


def read_obj(path, sidecar_path=None) -> SurfaceMesh:
    with open(path) as fh:
        text = fh.read()
    sidecar = None
    side = sidecar_path or str(path) + ".ideal.json"
    try:
        with open(side) as fh:
            sidecar = json.load(fh)
    except FileNotFoundError:
        if sidecar_path is not None:
            raise
    return SurfaceMesh.from_obj(text, sidecar)


def mesh_from_points(vertices: Sequence, triangles, carriers: Optional[Sequence[Plane]] = None) -> SurfaceMesh:
    return SurfaceMesh(list(vertices), np.asarray(triangles, dtype=int), list(carriers) if carriers else None)
