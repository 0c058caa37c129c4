import math

import numpy as np
import pytest

from conewright.gluing import (
    check_all,
    edge_cycle_composite,
    holonomy_word,
    load_spec,
    locus_holonomy,
    pairing_isometry,
    shipped_document,
    spec_to_json,
    weave_gluing,
    wedge_gluing,
)
from conewright.hypgeo import INF, Geodesic, GeometryError, HPoint, Kind, apply_interior, axis, classify, rotation_about
from conewright.polyhedron import BParams, build_geometry, random_b

SYMMETRIC = BParams((1, 1, 1, 1), 1)


@pytest.mark.parametrize("k", range(2, 9))
def test_full_turn_of_wedges_is_identity(k):
    rep = edge_cycle_composite(wedge_gluing(k, 2 * math.pi / k), "axis")
    assert rep.closed
    assert rep.passed
    assert rep.composite.is_identity(1e-9)


def test_two_wedges_rotate_by_twice_the_angle():
    for alpha in (0.3, 1.0, 2.5):
        rep = edge_cycle_composite(wedge_gluing(2, alpha), "axis")
        assert rep.passed
        assert rep.cls.kind is Kind.ELLIPTIC
        assert rep.angle == pytest.approx(2 * alpha, abs=1e-9)


def test_wedge_pairing_is_rotation_about_axis():
    theta = 0.7
    spec = wedge_gluing(3, theta)
    g = pairing_isometry(spec, "w0")
    # copy 1 face A (arg 0) lands on copy 0 face B (arg theta)
    assert g.isclose(rotation_about(Geodesic(0j, INF), theta), 1e-12)


def test_identical_anchors_give_identity():
    spec = wedge_gluing(2, 2 * math.pi / 2)
    assert pairing_isometry(spec, "w0").isclose(pairing_isometry(spec, "w1"), 1e-12)
    same = wedge_gluing(1, 0.5)
    # one wedge glued to itself: A -> B of the same copy
    assert pairing_isometry(same, "w0").isclose(rotation_about(Geodesic(0j, INF), 0.5), 1e-12)


def test_words():
    spec = weave_gluing(SYMMETRIC)
    assert holonomy_word(spec, "").is_identity(1e-15)
    ids = list(spec.pairings)
    w = " ".join(ids[:5])
    inv = " ".join(f"{g}^-1" for g in reversed(ids[:5]))
    assert holonomy_word(spec, f"{w} {inv}").is_identity(1e-9)
    assert holonomy_word(spec, [(ids[0], 2)]).isclose(holonomy_word(spec, f"{ids[0]} {ids[0]}"), 1e-12)
    with pytest.raises(KeyError):
        holonomy_word(spec, "nope")
    with pytest.raises(ValueError):
        holonomy_word(spec, f"{ids[0]}^x")


def test_shipped_gluing_shape():
    doc = shipped_document()
    spec = weave_gluing(SYMMETRIC, doc)
    assert spec.copies == 4
    assert len(spec.pairings) == 16
    assert len(spec.edges) == 20
    faces = {f for p in spec.pairings.values() for f in (p.source, p.target)}
    assert faces == set(spec.faces)
    assert len(spec.loci) == 4


def test_symmetric_cone_edge_is_half_turn():
    spec = weave_gluing(SYMMETRIC)
    cone = [e for e in spec.edges if "alpha1" in e.target]
    assert cone
    rep = edge_cycle_composite(spec, cone[0].id)
    assert rep.passed
    assert rep.cls.kind is Kind.ELLIPTIC
    assert rep.angle == pytest.approx(math.pi, abs=1e-9)


def test_all_cycles_pass_on_b0(rng):
    for _ in range(30):
        b = random_b(rng, in_b0=True)
        if min(build_geometry(b).alpha) < 0.1:
            continue
        bad = [r.edge for r in check_all(weave_gluing(b)) if not r.passed]
        assert bad == [], b


def test_pairings_carry_planes_to_planes(rng):
    spec = weave_gluing(random_b(rng, in_b0=True))
    for pid, p in spec.pairings.items():
        g = pairing_isometry(spec, pid)
        src, dst = spec.plane(*p.source), spec.plane(*p.target)
        for s in np.linspace(-2, 2, 20):
            if hasattr(src, "center"):
                x = HPoint.from_z(src.center + 0.5 * src.radius * complex(math.cos(s), math.sin(s)), src.radius * math.sqrt(0.75))
            else:
                x = HPoint.from_z(src.through + s * src.direction, 1 + s * s)
            assert src.contains(x, 1e-9)
            assert dst.contains(apply_interior(g, x), 1e-9)


def test_meridian_and_longitude(rng):
    for b in (SYMMETRIC, random_b(rng, in_b0=True)):
        spec = weave_gluing(b)
        for i in range(1, 5):
            mer, lon = locus_holonomy(spec, i)
            cm, cl = classify(mer), classify(lon)
            assert cm.kind is Kind.ELLIPTIC
            assert cm.angle == pytest.approx(min(2 * b_alpha(b, i), 2 * math.pi - 2 * b_alpha(b, i)), abs=1e-8)
            assert cl.kind is Kind.LOXODROMIC
            comm = mer @ lon @ mer.inverse() @ lon.inverse()
            assert comm.is_identity(1e-8)
            am, al = axis(mer), axis(lon)
            assert {_key(am.start), _key(am.end)} == {_key(al.start), _key(al.end)}


def b_alpha(b, i):
    return build_geometry(b).alpha[i - 1]


def _key(z):
    return "inf" if z is INF else (round(z.real, 7), round(z.imag, 7))


def test_broken_spec_is_rejected():
    doc = shipped_document()
    g = build_geometry(SYMMETRIC)
    with pytest.raises(ValueError, match="duplicate"):
        load_spec(dict(doc, pairings=doc["pairings"] + [doc["pairings"][0]]), g)
    reused = dict(doc["pairings"][1], id="extra")
    with pytest.raises(ValueError, match="appears in pairings"):
        load_spec(dict(doc, pairings=doc["pairings"] + [reused]), g)
    with pytest.raises(ValueError, match="schema"):
        load_spec(dict(doc, schema="gluing/0"), g)


def test_mismatched_cycle_fails():
    spec = wedge_gluing(3, 2 * math.pi / 3)
    spec.edges[0].steps = spec.edges[0].steps[:2]
    assert not edge_cycle_composite(spec, "axis").passed
    with pytest.raises(KeyError):
        edge_cycle_composite(spec, "missing")


def test_concrete_document_roundtrip():
    spec = weave_gluing(SYMMETRIC)
    again = load_spec(spec_to_json(spec))
    assert all(r.passed for r in check_all(again))


def test_degenerate_anchors_raise():
    from conewright.gluing import GluingSpec, Pairing

    spec = GluingSpec(
        1,
        {(0, "A"): (0j, 0j, INF), (0, "B"): (0j, 1 + 0j, INF)},
        {0: HPoint(0.5, 0.5, 1.0)},
        {"p": Pairing("p", (0, "A"), (0, "B"))},
        [],
    )
    with pytest.raises((GeometryError, ValueError)):
        pairing_isometry(spec, "p")


def test_shipped_data_matches_its_generator(tmp_path):
    import subprocess
    import sys
    from importlib import resources
    from pathlib import Path

    script = Path(__file__).resolve().parents[1] / "scripts" / "make_weave4.py"
    out = tmp_path / "weave4.json"
    subprocess.run([sys.executable, str(script), str(out)], check=True)
    shipped = resources.files("conewright.data").joinpath("weave4.json").read_text()
    assert out.read_text() == shipped
