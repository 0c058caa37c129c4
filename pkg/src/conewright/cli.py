"""Command-line entry point: one subcommand per operation, JSON or text reports.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, acceptance, framing, gluing, holonomy
from .hypgeo import INF, HPoint, Isometry, classify
from .mesh import geodesic_sphere, read_obj, write_obj
from .polyhedron import AngleParams, BParams, angles_from_b, b_from_angles, boundary_mesh, build_geometry, check_dihedrals
from .volume import enclosed_volume, schlafli_check, structure_volume

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
REPORT_SCHEMA = "report/1"


class InputError(Exception):
    """Malformed command-line value or input file."""


# ---------------------------------------------------------------- parsing helpers


def _floats(text: str, count: Optional[int] = None, what: str = "value") -> list:
    try:
        values = [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as err:
        raise InputError(f"{what}: {err}") from err
    if count is not None and len(values) != count:
        raise InputError(f"{what}: expected {count} comma-separated numbers, got {len(values)}")
    return values


def _parse_b(text: str) -> BParams:
    values = _floats(text, 5, "--b")
    try:
        return BParams.parse(values)
    except ValueError as err:
        raise InputError(f"--b: {err}") from err


def _parse_matrix(text: str, what: str) -> Isometry:
    v = _floats(text, 8, what)
    try:
        # any invertible matrix names a point of PSL(2,C); rescale to determinant 1
        return Isometry.from_matrix([[complex(v[0], v[1]), complex(v[2], v[3])], [complex(v[4], v[5]), complex(v[6], v[7])]])
    except ValueError as err:
        raise InputError(f"{what}: {err}") from err


def _parse_apex(text: Optional[str]):
    if text is None or text.lower() in ("inf", "infinity"):
        return INF
    v = _floats(text, None, "--apex")
    if len(v) == 2:
        return complex(v[0], v[1])
    if len(v) == 3:
        return HPoint(*v)
    raise InputError("--apex: expected inf, x,y (boundary) or x,y,h (interior)")


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise InputError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from err
    except OSError as err:
        raise InputError(f"{path}: {err.strerror}") from err


def _num(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, float) and math.isinf(x):
        return None
    return x


# ---------------------------------------------------------------- output


def _emit(report: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(report, indent=2, sort_keys=True, allow_nan=False, default=_num) + "\n")
    else:
        out.write(_as_text(report) + "\n")


def _as_text(report: dict, indent: str = "") -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            lines.append(f"{indent}{key}:")
            lines.append(_table(value, indent + "  "))
        elif isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_as_text(value, indent + "  "))
        else:
            lines.append(f"{indent}{key}: {_cell(value)}")
    return "\n".join(lines)


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, list):
        return "[" + ", ".join(_cell(x) for x in v) + "]"
    return str(v)


def _table(rows: list, indent: str) -> str:
    keys = [k for k in rows[0] if not isinstance(rows[0][k], dict)]
    cells = [[_cell(r.get(k)) for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    header = indent + "  ".join(k.ljust(w) for k, w in zip(keys, widths))
    body = [indent + "  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join([header] + body)


def _report(command: str, args, **fields) -> dict:
    out = {"schema": REPORT_SCHEMA, "command": command, "seed": args.seed}
    out.update(fields)
    return out


# ---------------------------------------------------------------- subcommands


def cmd_build(args) -> int:
    b = _parse_b(args.b)
    g = build_geometry(b)
    dihedrals = check_dihedrals(g)
    ok = dihedrals.max_alpha_error <= args.tol and dihedrals.max_right_error <= args.tol
    rep = _report("build", args, geometry=g.to_json(), dihedrals=dihedrals.to_json(), passed=ok)
    if args.plot:
        from .plots import projection_figure

        rep["figure"] = str(projection_figure(g, args.plot))
    _emit(rep, args.format)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_angles(args) -> int:
    b = _parse_b(args.b)
    a = angles_from_b(b)
    _emit(_report("angles", args, b={"q": list(b.q), "t": b.t}, alpha=list(a.alpha), cosines=list(a.cosines), in_b0=b.in_b0()), args.format)
    return EXIT_OK


def cmd_invert(args) -> int:
    if (args.alpha is None) == (args.cosines is None):
        raise InputError("give exactly one of --alpha or --cosines")
    try:
        if args.alpha is not None:
            b = b_from_angles(AngleParams(tuple(_floats(args.alpha, 4, "--alpha"))))
        else:
            b = b_from_angles(_floats(args.cosines, 4, "--cosines"), cosines=True)
    except ValueError as err:
        raise InputError(str(err)) from err
    back = angles_from_b(b)
    _emit(_report("invert", args, b={"q": list(b.q), "t": b.t}, alpha=list(back.alpha), in_b0=b.in_b0()), args.format)
    return EXIT_OK


def _load_mesh(args):
    if args.mesh:
        try:
            return read_obj(args.mesh, args.sidecar)
        except OSError as err:
            raise InputError(f"{err.filename}: {err.strerror}") from err
        except ValueError as err:
            raise InputError(f"{args.mesh}: {err}") from err
    if args.sphere is not None:
        return geodesic_sphere(args.sphere, args.refine)
    return None


def cmd_volume(args) -> int:
    apex = _parse_apex(args.apex)
    if args.b:
        b = _parse_b(args.b)
        v = structure_volume(b, apex)
        source = {"b": {"q": list(b.q), "t": b.t}}
    else:
        mesh = _load_mesh(args)
        if mesh is None:
            raise InputError("give one of --b, --mesh or --sphere")
        v = enclosed_volume(mesh, apex)
        source = {"mesh": args.mesh} if args.mesh else {"sphere_radius": args.sphere, "refine": args.refine}
        if args.sphere is not None:
            source["ball_volume"] = math.pi * (math.sinh(2 * args.sphere) - 2 * args.sphere)
    ok = v.est_error <= args.tol
    _emit(_report("volume", args, source=source, apex=_apex_json(apex), volume=v.value, est_error=v.est_error, passed=ok), args.format)
    return EXIT_OK if ok else EXIT_FAIL


def _apex_json(apex):
    if apex is INF:
        return "inf"
    if isinstance(apex, HPoint):
        return [apex.x, apex.y, apex.h]
    return [apex.real, apex.imag]


def _path_from_json(doc: dict):
    if doc.get("schema") != "path/1":
        raise InputError(f'path file: expected "schema": "path/1", got {doc.get("schema")!r}')
    pts = doc.get("points") or [doc.get("start"), doc.get("end")]
    if any(p is None or len(p) != 5 for p in pts) or len(pts) < 2:
        raise InputError('path file: need "start"/"end" or "points", each q1,q2,q3,q4,t')
    pts = np.array(pts, dtype=float)

    def path(s):
        u = s * (len(pts) - 1)
        k = min(int(u), len(pts) - 2)
        return list(pts[k] + (u - k) * (pts[k + 1] - pts[k]))

    return path


def cmd_schlafli(args) -> int:
    if args.path:
        path = _path_from_json(_load_json(args.path))
        label = args.path
    else:
        path, label = acceptance.symmetric_path, "q=1, t in [0.5, 1.5]"
    rep = schlafli_check(path, steps=args.steps)
    tol = args.tol if args.tol_given else 1e-4
    ok = rep.max_rel_error <= tol
    out = _report("schlafli", args, path=label, steps=args.steps, step=rep.step, max_rel_error=rep.max_rel_error, tolerance=tol, passed=ok)
    if args.plot:
        from .plots import schlafli_figure

        out["figure"] = str(schlafli_figure(rep, args.plot))
    if args.csv:
        from .plots import schlafli_csv

        out["table"] = str(schlafli_csv(rep, args.csv))
    _emit(out, args.format)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_glue_check(args) -> int:
    doc = _load_json(args.spec) if args.spec else gluing.shipped_document()
    geometry = build_geometry(_parse_b(args.b)) if args.b else None
    try:
        spec = gluing.load_spec(doc, geometry)
    except (KeyError, TypeError) as err:
        raise InputError(f"{args.spec or 'weave4.json'}: malformed gluing document ({err})") from err
    reports = gluing.check_all(spec)
    rows = [r.to_json() for r in reports]
    for row in rows:
        row["class"] = row["class"]["kind"]
    words = []
    for w in args.word or []:
        g = gluing.holonomy_word(spec, w)
        words.append({"word": w, "image": g.to_json(), "class": classify(g).to_json()})
    ok = all(r.passed for r in reports)
    _emit(_report("glue-check", args, gluing=spec.name, edges=rows, words=words, passed=ok), args.format)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_framing(args) -> int:
    try:
        h = framing.HandleData.from_json(_load_json(args.handles))
    except (KeyError, TypeError) as err:
        raise InputError(f"{args.handles}: missing or malformed field ({err})") from err
    grp = framing.framing_group(h)
    out = _report("framing", args, handles=h.to_json(), group=grp.to_json())
    ok = True
    if args.oracle:
        same = framing.brute_force_kernel(h, args.bound) == framing.generated_in_box(grp.generators, h.n, h.m, args.bound)
        out["oracle"] = {"bound": args.bound, "equal": same}
        ok = same
    out["passed"] = ok
    _emit(out, args.format)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_lift_check(args) -> int:
    try:
        p, r = holonomy.rep_from_json(_load_json(args.rep))
    except (KeyError, TypeError) as err:
        raise InputError(f"{args.rep}: missing or malformed field ({err})") from err
    tol = args.tol if args.tol_given else holonomy.RELATOR_TOL
    relators = holonomy.verify_presentation(p, r, tol)
    out = _report("lift-check", args, exact=r.exact, relators=relators)
    if not all(relators):
        out["passed"] = False
        _emit(out, args.format)
        return EXIT_FAIL
    out["lift"] = holonomy.lift_obstruction(p, r, tol).to_json()
    out["passed"] = True
    _emit(out, args.format)
    return EXIT_OK


def cmd_cone_check(args) -> int:
    pair = holonomy.PeripheralPair(_parse_matrix(args.mu, "--mu"), _parse_matrix(args.lam, "--lambda"), -1 if args.reverse else 1)
    v = holonomy.cone_conditions(pair)
    ok = v.verdict is not holonomy.Verdict.FAILS
    _emit(_report("cone-check", args, result=v.to_json(), passed=ok), args.format)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_mesh_export(args) -> int:
    if args.b:
        mesh = boundary_mesh(build_geometry(_parse_b(args.b)))
    else:
        mesh = _load_mesh(args)
        if mesh is None:
            raise InputError("give one of --b, --mesh or --sphere")
    if args.format == "obj" and not args.out:
        text, _ = mesh.to_obj(args.clip_height)
        sys.stdout.write(text)
        return EXIT_OK
    if not args.out:
        raise InputError("--out is required unless --format obj writes to stdout")
    sidecar = write_obj(mesh, args.out, args.clip_height)
    rep = _report("mesh-export", args, obj=args.out, sidecar=sidecar, vertices=len(mesh.vertices), triangles=len(mesh), clip_height=args.clip_height)
    _emit(rep, "text" if args.format == "obj" else args.format)
    return EXIT_OK


def cmd_acceptance(args) -> int:
    if args.suite == "all":
        numbers = sorted(acceptance.CRITERIA)
    else:
        try:
            numbers = [int(x) for x in args.suite.split(",")]
        except ValueError as err:
            raise InputError(f"--suite: {err}") from err
        unknown = [n for n in numbers if n not in acceptance.CRITERIA]
        if unknown:
            raise InputError(f"--suite: unknown criteria {unknown}")
    results = []
    for n in numbers:
        res = acceptance.run(n, args.seed)
        results.append(res)
        if args.format == "text":
            print(res.line(), flush=True)
    ok = all(r.passed for r in results)
    if args.format == "json":
        _emit(_report("acceptance", args, results=[r.to_json() for r in results], passed=ok), "json")
    else:
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed (seed {args.seed})")
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="check tolerance (default depends on the command)")
    common.add_argument("--refine", type=int, default=3, help="refinement level of generated spheres")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--format", choices=("json", "text", "obj"), default="json")
    common.add_argument("--clip-height", type=float, default=10.0, help="height of the horosphere clip in OBJ export")

    parser = argparse.ArgumentParser(prog="conewright", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"conewright {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("build", cmd_build, "trapezohedron geometry for b")
    p.add_argument("--b", required=True, help="q1,q2,q3,q4,t")
    p.add_argument("--plot", help="write the planar projection figure to this file")

    p = add("angles", cmd_angles, "dihedral angles alpha_i for b")
    p.add_argument("--b", required=True, help="q1,q2,q3,q4,t")

    p = add("invert", cmd_invert, "b for given angles")
    p.add_argument("--alpha", help="a1,a2,a3,a4 in [0, pi)")
    p.add_argument("--cosines", help="c1,c2,c3,c4 in (-1, 1]")

    for name, func, help_ in (("volume", cmd_volume, "signed enclosed volume"), ("mesh-export", cmd_mesh_export, "write an OBJ mesh and ideal-vertex sidecar")):
        p = add(name, func, help_)
        p.add_argument("--b", help="q1,q2,q3,q4,t (trapezohedron boundary)")
        p.add_argument("--mesh", help="OBJ file (sidecar defaults to FILE.ideal.json)")
        p.add_argument("--sidecar", help="ideal-vertex sidecar JSON")
        p.add_argument("--sphere", type=float, help="geodesic sphere of this radius at (0,0,1)")
        if name == "volume":
            p.add_argument("--apex", help="cone apex: inf (default), x,y or x,y,h")
        else:
            p.add_argument("--out", help="output OBJ path")

    p = add("schlafli", cmd_schlafli, "check dV = -1/2 sum l dalpha along a path")
    p.add_argument("--path", help='path JSON ("schema": "path/1"); default q=1, t in [0.5, 1.5]')
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--plot", help="write the derivative comparison figure")
    p.add_argument("--csv", help="write the per-node table")

    p = add("glue-check", cmd_glue_check, "edge cycles of a gluing")
    p.add_argument("--b", help="q1,q2,q3,q4,t for symbolic gluing documents")
    p.add_argument("--spec", help="gluing JSON (default: shipped four-copy gluing)")
    p.add_argument("--word", action="append", help='holonomy word in pairing ids, e.g. "V1:01 H2:01^-1"')

    p = add("framing", cmd_framing, "framing group of handle data")
    p.add_argument("--handles", required=True)
    p.add_argument("--oracle", action="store_true", help="compare against brute-force enumeration")
    p.add_argument("--bound", type=int, default=6, help="box size for the oracle")

    p = add("lift-check", cmd_lift_check, "SL(2,C) lifting obstruction")
    p.add_argument("--rep", required=True)

    p = add("cone-check", cmd_cone_check, "classify a meridian/longitude pair")
    p.add_argument("--mu", required=True, help="8 reals: re/im of a, b, c, d")
    p.add_argument("--lambda", dest="lam", required=True, help="8 reals: re/im of a, b, c, d")
    p.add_argument("--reverse", action="store_true", help="measure the angle about the reversed axis")

    p = add("acceptance", cmd_acceptance, "run the acceptance criteria")
    p.add_argument("--suite", default="all", help='"all" or comma-separated criterion numbers')
    return parser


DEFAULT_TOL = 1e-6


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.tol_given = args.tol is not None
    if args.tol is None:
        args.tol = DEFAULT_TOL
    if args.tol <= 0:
        parser.error("--tol must be positive")
    if args.refine < 0:
        parser.error("--refine must be nonnegative")
    if args.format == "obj" and args.command != "mesh-export":
        parser.error("--format obj is only meaningful for mesh-export")
    try:
        return args.func(args)
    except (InputError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
