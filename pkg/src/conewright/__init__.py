"""Holed cone structures on trapezohedra: geometry, volumes, gluings, holonomy and framings."""

from .hypgeo import INF, Geodesic, HPoint, Isometry, Kind, classify
from .polyhedron import AngleParams, BParams, angles_from_b, b_from_angles, build_geometry
from .volume import enclosed_volume, lobachevsky, structure_volume

__version__ = "0.1.0"

__all__ = [
    "INF",
    "Geodesic",
    "HPoint",
    "Isometry",
    "Kind",
    "classify",
    "AngleParams",
    "BParams",
    "angles_from_b",
    "b_from_angles",
    "build_geometry",
    "enclosed_volume",
    "lobachevsky",
    "structure_volume",
]
