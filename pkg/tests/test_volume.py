import math

import mpmath
import numpy as np
import pytest

from conewright.hypgeo import INF, GeometryError, HPoint, apply_interior
from conewright.mesh import SurfaceMesh, geodesic_sphere
from conewright.polyhedron import BParams, boundary_mesh, build_geometry, random_b
from conewright.volume import (
    Tetra,
    clausen,
    enclosed_volume,
    ideal_tetra_volume,
    lobachevsky,
    quadrature_tetra_volume,
    schlafli_check,
    structure_volume,
    tetra_volume,
)

from conftest import random_hpoint, random_isometry

# frozen from an mpmath Clausen series at 30 digits before the analytic path existed
REGULAR_IDEAL = 1.0149416064096536250
OCTAHEDRON = 3.6638623767088760602
SYMMETRIC_T1 = 1.831931188354422


def mp_lobachevsky(theta: float) -> float:
    return float(mpmath.clsin(2, 2 * mpmath.mpf(theta)) / 2)


# ---------------------------------------------------------------- Lobachevsky function


@pytest.mark.parametrize("theta", np.linspace(-3.5, 7.0, 57))
def test_lobachevsky_matches_mpmath(theta):
    assert lobachevsky(theta) == pytest.approx(mp_lobachevsky(theta), abs=5e-15)


def test_lobachevsky_identities():
    # odd, pi-periodic, and the duplication law L(2x) = 2 L(x) + 2 L(x + pi/2)
    for x in np.linspace(0.05, 1.5, 20):
        assert lobachevsky(-x) == pytest.approx(-lobachevsky(x), abs=1e-15)
        assert lobachevsky(x + math.pi) == pytest.approx(lobachevsky(x), abs=1e-14)
        assert lobachevsky(2 * x) == pytest.approx(2 * lobachevsky(x) + 2 * lobachevsky(x + math.pi / 2), abs=1e-14)
    assert lobachevsky(math.pi / 2) == pytest.approx(0, abs=1e-15)


def test_clausen_at_pi_over_two_is_catalan():
    assert clausen(math.pi / 2) == pytest.approx(float(mpmath.catalan), abs=1e-15)


def test_frozen_constants_match_series():
    assert 3 * mp_lobachevsky(math.pi / 3) == pytest.approx(REGULAR_IDEAL, abs=1e-15)
    assert 8 * mp_lobachevsky(math.pi / 4) == pytest.approx(OCTAHEDRON, abs=1e-14)


# ---------------------------------------------------------------- tetrahedra


def test_regular_ideal_tetrahedron():
    z = complex(0.5, math.sqrt(3) / 2)
    assert ideal_tetra_volume(z) == pytest.approx(REGULAR_IDEAL, abs=1e-14)
    v = tetra_volume(Tetra((0j, 1 + 0j, INF, z)))
    assert abs(v.value) == pytest.approx(REGULAR_IDEAL, abs=1e-13)


def test_swap_negates_and_coplanar_vanishes(rng):
    pts = [random_hpoint(rng) for _ in range(4)]
    v = tetra_volume(Tetra(tuple(pts))).value
    assert tetra_volume(Tetra((pts[1], pts[0], pts[2], pts[3]))).value == pytest.approx(-v, abs=1e-14)
    # four ideal points on the unit circle span a flat tetrahedron
    flat = tuple(complex(math.cos(a), math.sin(a)) for a in (0.1, 1.3, 2.9, 4.4))
    assert tetra_volume(Tetra(flat)).value == pytest.approx(0.0, abs=1e-13)


def test_coincident_vertices_raise():
    with pytest.raises(GeometryError):
        Tetra((0j, 0j, 1 + 0j, INF))


# pieces that touch an ideal vertex without being collapsed onto it converge slowly
@pytest.mark.parametrize("kind, tol", [("finite", 1e-9), ("mixed", 1e-9), ("ideal", 5e-6)])
def test_tetra_matches_quadrature_oracle(rng, kind, tol):
    for _ in range(8):
        verts = []
        for k in range(4):
            if kind == "finite" or (kind == "mixed" and k % 2 == 0):
                verts.append(random_hpoint(rng))
            else:
                verts.append(complex(*rng.normal(size=2)))
        if kind == "mixed":
            verts[3] = INF
        exact = tetra_volume(Tetra(tuple(verts))).value
        assert quadrature_tetra_volume(verts, order=40) == pytest.approx(exact, abs=tol)


def test_tetra_isometry_invariant(rng):
    for _ in range(50):
        pts = [random_hpoint(rng) for _ in range(3)] + [complex(*rng.normal(size=2))]
        g = random_isometry(rng)
        moved = [apply_interior(g, p) if isinstance(p, HPoint) else g(p) for p in pts]
        a, b = tetra_volume(Tetra(tuple(pts))).value, tetra_volume(Tetra(tuple(moved))).value
        assert b == pytest.approx(a, abs=1e-10)


# ---------------------------------------------------------------- meshes


def _tetra_mesh(verts):
    # outward orientation for a positively oriented (a, b, c, d)
    return SurfaceMesh(list(verts), [(1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1)])


def test_tetra_mesh_matches_tetra_volume(rng):
    for _ in range(20):
        verts = [random_hpoint(rng) for _ in range(4)]
        t = tetra_volume(Tetra(tuple(verts))).value
        mesh = _tetra_mesh(verts)
        v = enclosed_volume(mesh).value
        assert abs(v) == pytest.approx(abs(t), abs=1e-12)
        # the sign flips with the mesh orientation, whatever the vertex frame
        assert enclosed_volume(mesh.reversed()).value == pytest.approx(-v, abs=1e-12)


def test_additivity_under_internal_wall(rng):
    for _ in range(20):
        a, b, c, d = (random_hpoint(rng) for _ in range(4))
        if tetra_volume(Tetra((a, b, c, d))).value < 0:
            a, b = b, a
        # Klein-straight midpoint of a-b lies on the geodesic
        m = _geodesic_midpoint(a, b)
        whole = enclosed_volume(_tetra_mesh([a, b, c, d])).value
        parts = enclosed_volume(_tetra_mesh([a, m, c, d])).value + enclosed_volume(_tetra_mesh([m, b, c, d])).value
        assert parts == pytest.approx(whole, abs=1e-8)


def _geodesic_midpoint(p: HPoint, q: HPoint) -> HPoint:
    from conewright.volume import to_klein

    kp, kq = to_klein(p), to_klein(q)
    k = 0.5 * (kp + kq)
    # Klein -> ball -> upper half-space
    ball = k / (1 + math.sqrt(1 - k @ k))
    x, y, z = ball
    den = x * x + y * y + (1 - z) ** 2
    return HPoint(2 * x / den, 2 * y / den, (1 - x * x - y * y - z * z) / den)


def test_sphere_volume_within_one_percent():
    v = enclosed_volume(geodesic_sphere(1.0, 5)).value
    assert v == pytest.approx(math.pi * (math.sinh(2) - 2), rel=0.01)


def test_sphere_volume_converges_from_below():
    exact = math.pi * (math.sinh(2) - 2)
    values = [enclosed_volume(geodesic_sphere(1.0, k)).value for k in range(4)]
    assert all(a < b < exact for a, b in zip(values, values[1:]))


def test_non_closed_mesh_raises():
    mesh = SurfaceMesh([0j, 1 + 0j, 1j, INF], [(0, 1, 2), (0, 2, 3)])
    with pytest.raises(GeometryError):
        enclosed_volume(mesh)


def test_apex_independence_and_isometry_invariance(rng):
    for _ in range(10):
        mesh = boundary_mesh(build_geometry(random_b(rng)))
        v = enclosed_volume(mesh).value
        for apex in (random_hpoint(rng), complex(*rng.normal(size=2))):
            assert enclosed_volume(mesh, apex).value == pytest.approx(v, abs=1e-9 * (1 + abs(v)))
        moved = mesh.transformed(random_isometry(rng))
        assert enclosed_volume(moved).value == pytest.approx(v, rel=1e-9, abs=1e-12)


def test_ball_removal_identity():
    b = BParams((1, 1, 1, 1), 0.0)
    g = build_geometry(b)
    big = enclosed_volume(boundary_mesh(g)).value
    sphere = geodesic_sphere(0.4, 5, HPoint(0.0, 0.0, 1.2))
    with_hole = enclosed_volume(boundary_mesh(g) + sphere.reversed()).value
    assert big == pytest.approx(with_hole + enclosed_volume(sphere).value, abs=1e-12)
    ball = math.pi * (math.sinh(0.8) - 0.8)
    assert big - with_hole == pytest.approx(ball, rel=0.01)


def test_thread_count_does_not_change_bits(monkeypatch):
    mesh = geodesic_sphere(0.7, 4)
    monkeypatch.setenv("CONEWRIGHT_THREADS", "1")
    one = enclosed_volume(mesh).value
    monkeypatch.setenv("CONEWRIGHT_THREADS", "4")
    four = enclosed_volume(mesh).value
    assert one == four


# ---------------------------------------------------------------- structure volumes


def test_octahedron_structure_volume():
    assert structure_volume((1, 1, 1, 1, 0)).value == pytest.approx(OCTAHEDRON, abs=1e-4)
    assert structure_volume((1, 1, 1, 1, 0)).value == pytest.approx(OCTAHEDRON, abs=1e-12)


def test_symmetric_t1_against_quadrature_oracle():
    b = BParams((1, 1, 1, 1), 1.0)
    v = structure_volume(b).value
    assert 0 < v < OCTAHEDRON
    assert v == pytest.approx(SYMMETRIC_T1, abs=1e-12)
    g = build_geometry(b)
    mesh = boundary_mesh(g)
    s = g.interior_sample
    quad = sum(quadrature_tetra_volume([s] + [mesh.vertices[i] for i in tri], order=20) for tri in mesh.triangles)
    assert quad == pytest.approx(v, abs=1e-9)


def test_cyclic_relabelling_and_scale(rng):
    for _ in range(10):
        b = random_b(rng)
        v = structure_volume(b).value
        assert structure_volume(b.shifted(1)).value == pytest.approx(v, abs=1e-9)
        scaled = enclosed_volume(boundary_mesh(build_geometry(b, scale=2.7))).value
        assert scaled == pytest.approx(v, abs=1e-9)


def test_quad_diagonal_choice_is_irrelevant(rng):
    for _ in range(10):
        g = build_geometry(random_b(rng))
        a = enclosed_volume(boundary_mesh(g, "first")).value
        b = enclosed_volume(boundary_mesh(g, "other")).value
        assert a == pytest.approx(b, abs=1e-10)


def test_volume_shrinks_along_symmetric_family():
    values = [structure_volume((1, 1, 1, 1, t)).value for t in np.linspace(0, 3, 13)]
    assert all(a > b > 0 for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------- Schlafli


def test_schlafli_constant_path():
    rep = schlafli_check(lambda s: [1, 1, 1, 1, 1.0], steps=20)
    assert rep.max_rel_error == 0.0
    assert np.allclose(rep.dV, 0)


def test_schlafli_symmetric_path_and_reversal():
    fwd = schlafli_check(lambda s: [1, 1, 1, 1, 0.5 + s], steps=100)
    rev = schlafli_check(lambda s: [1, 1, 1, 1, 1.5 - s], steps=100)
    assert fwd.max_rel_error <= 1e-4
    assert rev.max_rel_error <= 1e-4
    assert np.allclose(rev.dV[::-1], -fwd.dV, rtol=1e-9)


def test_schlafli_asymmetric_path():
    def path(s):
        return [1.0 + 0.3 * s, 1.0, 1.0 / (1.0 + 0.3 * s), 1.0, 0.8 + 0.4 * s]

    assert schlafli_check(path, steps=100).max_rel_error <= 1e-4


def test_schlafli_rejects_leaving_b0():
    with pytest.raises(GeometryError):
        schlafli_check(lambda s: [0.5, 0.5, 2, 2, 2.0], steps=4)
