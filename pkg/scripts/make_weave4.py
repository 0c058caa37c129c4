"""Regenerate src/conewright/data/weave4.json.

Four copies of the trapezohedron: copies 0 and 3 as built, 1 and 2 mirrored
in the real axis.  Every face is glued to the same face of another copy.
Faces V_i and H_i use one perfect matching of the copies and consecutive
indices use different matchings, so each L_i edge closes after two copies
(angle 2 alpha_i) and every other edge after four right angles.
"""

import json
import sys
from pathlib import Path

A = [(0, 1), (3, 2)]  # (target plain copy, source mirrored copy)
B = [(0, 2), (3, 1)]
MATCHING = {1: A, 2: B, 3: A, 4: B}
MIRROR = {0: False, 1: True, 2: True, 3: False}


def nxt(i):
    return i % 4 + 1


def prv(i):
    return (i - 2) % 4 + 1


def face_matching(face):
    return MATCHING[int(face[1])]


def crossing(face, copy):
    for t, s in face_matching(face):
        pid = f"{face}:{t}{s}"
        if copy == t:
            return pid, 1, s
        if copy == s:
            return pid, -1, t
    raise AssertionError


def cycle(F, G, start):
    steps, copy, faces = [], start, [G, F]
    k = 0
    while True:
        pid, sign, copy = crossing(faces[k % 2], copy)
        steps.append([pid, sign])
        k += 1
        if copy == start and k % 2 == 0:
            return steps


def main(out):
    templates = {}
    for i in range(1, 5):
        templates[f"V{i}"] = [f"P{i}", f"P{nxt(i)}", "inf"]
        templates[f"H{i}"] = ["O", f"A{i}", f"T{i}"]
    copies = [{"id": c, "mirror": MIRROR[c], "interior": "interior"} for c in range(4)]
    pairings = []
    for i in range(1, 5):
        for face in (f"V{i}", f"H{i}"):
            for t, s in face_matching(face):
                pairings.append({"id": f"{face}:{t}{s}", "source": [s, face], "target": [t, face]})
    edges = []
    kinds = []
    for i in range(1, 5):
        kinds.append((f"infP{i}", f"V{prv(i)}", f"V{i}", "identity"))
        kinds.append((f"L{i}", f"V{i}", f"H{i}", f"2*alpha{i}"))
        kinds.append((f"QP{i}", f"V{i}", f"H{nxt(i)}", "identity"))
        kinds.append((f"OQ{i}", f"H{i}", f"H{nxt(i)}", "identity"))
    for name, F, G, target in kinds:
        seen = set()
        for start in range(4):
            if start in seen:
                continue
            steps = cycle(F, G, start)
            orbit, copy = {start}, start
            for k, (pid, sign) in enumerate(steps):
                copy = crossing([G, F][k % 2], copy)[2]
                orbit.add(copy)
            seen |= orbit
            suffix = "" if len(orbit) == 4 else f"/{min(orbit)}{max(orbit)}"
            edges.append({"id": name + suffix, "copy": start, "faces": [F, G], "steps": steps, "target": target})
    loci = []
    for i in range(1, 5):
        meridian = cycle(f"V{i}", f"H{i}", 0)
        # along L_i: leave copy 0 through V_{i-1} at P~_i, then through H_{i+1} at Q~_i
        p1, s1, c1 = crossing(f"V{prv(i)}", 0)
        p2, s2, c2 = crossing(f"H{nxt(i)}", c1)
        assert c2 == 0
        loci.append({"index": i, "meridian": meridian, "longitude": [[p1, s1], [p2, s2]]})
    doc = {
        "schema": "gluing/1",
        "name": "weave4",
        "face_templates": templates,
        "copies": copies,
        "pairings": pairings,
        "edges": edges,
        "loci": loci,
    }
    Path(out).write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parents[1] / "src/conewright/data/weave4.json")
