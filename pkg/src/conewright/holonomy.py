"""Representation checks: relators, the SL(2,C) lifting obstruction and peripheral pairs."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from . import framing
from .hypgeo import (
    INF,
    Geodesic,
    GeometryError,
    Isometry,
    Kind,
    axis,
    boundary_close,
    classify,
    complex_length,
    _eigen_fixed_point,
)

RELATOR_TOL = 1e-10
COMMUTE_TOL = 1e-8
AXIS_TOL = 1e-8


# ---------------------------------------------------------------- exact Gaussian integers


@dataclass(frozen=True)
class GaussianMatrix:
    """2x2 matrix over Z[i]; each entry is a pair (re, im) of Python ints."""

    entries: tuple

    @classmethod
    def from_entries(cls, values: Sequence) -> "GaussianMatrix":
        if len(values) != 4:
            raise ValueError("an exact matrix needs four entries a, b, c, d")
        return cls(tuple(_gauss(v) for v in values))

    @classmethod
    def identity(cls) -> "GaussianMatrix":
        return cls(((1, 0), (0, 0), (0, 0), (1, 0)))

    def __matmul__(self, other: "GaussianMatrix") -> "GaussianMatrix":
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return GaussianMatrix((
            _gadd(_gmul(a, e), _gmul(b, g)),
            _gadd(_gmul(a, f), _gmul(b, h)),
            _gadd(_gmul(c, e), _gmul(d, g)),
            _gadd(_gmul(c, f), _gmul(d, h)),
        ))

    @property
    def det(self) -> tuple:
        a, b, c, d = self.entries
        ad, bc = _gmul(a, d), _gmul(b, c)
        return (ad[0] - bc[0], ad[1] - bc[1])

    def inverse(self) -> "GaussianMatrix":
        if self.det != (1, 0):
            raise ValueError(f"exact matrix must have determinant 1, got {self.det}")
        a, b, c, d = self.entries
        return GaussianMatrix((d, _gneg(b), _gneg(c), a))

    def negated(self) -> "GaussianMatrix":
        return GaussianMatrix(tuple(_gneg(e) for e in self.entries))

    def sign_of_scalar(self) -> Optional[int]:
        """+1 for I, -1 for -I, None otherwise."""
        if self.entries == GaussianMatrix.identity().entries:
            return 1
        if self.entries == GaussianMatrix.identity().negated().entries:
            return -1
        return None

    @property
    def trace(self) -> tuple:
        return _gadd(self.entries[0], self.entries[3])

    def to_isometry(self) -> Isometry:
        return Isometry(*(complex(*e) for e in self.entries))

    def to_json(self) -> list:
        return [list(e) for e in self.entries]


def _gauss(v) -> tuple:
    if isinstance(v, (list, tuple)):
        re, im = v
    elif isinstance(v, complex):
        re, im = v.real, v.imag
    else:
        re, im = v, 0
    if int(re) != re or int(im) != im:
        raise ValueError(f"exact entry {v!r} is not a Gaussian integer")
    return (int(re), int(im))


def _gmul(p, q):
    return (p[0] * q[0] - p[1] * q[1], p[0] * q[1] + p[1] * q[0])


def _gadd(p, q):
    return (p[0] + q[0], p[1] + q[1])


def _gneg(p):
    return (-p[0], -p[1])


# ---------------------------------------------------------------- presentations


Word = tuple  # of (generator, exponent) pairs


@dataclass(frozen=True)
class Presentation:
    generators: tuple
    relators: tuple = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            raise ValueError("generator names must be distinct")
        rels = tuple(tuple((str(g), int(e)) for g, e in r) for r in self.relators)
        for k, rel in enumerate(rels):
            for g, e in rel:
                if g not in gens:
                    raise ValueError(f"relator {k} uses undeclared generator {g!r}")
                if e == 0:
                    raise ValueError(f"relator {k} has a zero exponent")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", rels)

    def exponent_sums(self) -> np.ndarray:
        M = np.zeros((len(self.relators), len(self.generators)), dtype=int)
        index = {g: j for j, g in enumerate(self.generators)}
        for k, rel in enumerate(self.relators):
            for g, e in rel:
                M[k, index[g]] += e
        return M


def parse_word(text: str) -> Word:
    """Parse ``"m a m^-1 b^-2 a^-1"`` into ((m,1), (a,1), (m,-1), (b,-2), (a,-1))."""
    out = []
    for token in text.replace("*", " ").split():
        name, _, exp = token.partition("^")
        out.append((name, int(exp) if exp else 1))
    return tuple(out)


Matrix = Union[Isometry, GaussianMatrix]


@dataclass
class RepAssignment:
    images: dict
    exact: bool = False

    def __post_init__(self):
        kinds = {isinstance(m, GaussianMatrix) for m in self.images.values()}
        if self.exact and kinds != {True} and self.images:
            raise ValueError("exact assignment needs Gaussian-integer matrices")
        if self.exact:
            for g, m in self.images.items():
                if m.det != (1, 0):
                    raise ValueError(f"image of {g!r} has determinant {m.det}, expected 1")

    def lift(self, g: str):
        return self.images[g]

    def with_flips(self, flips: Mapping[str, int]) -> "RepAssignment":
        """Negate the chosen lift of every generator with flip 1."""
        out = {}
        for g, m in self.images.items():
            if flips.get(g, 0) % 2:
                m = m.negated() if isinstance(m, GaussianMatrix) else _neg_matrix(m)
            out[g] = m
        return RepAssignment(out, self.exact)

    def conjugated(self, k: Isometry) -> "RepAssignment":
        images = {g: _float_matrix(m) for g, m in self.images.items()}
        km, ki = k.matrix, k.inverse().matrix
        return RepAssignment({g: ki @ m @ km for g, m in images.items()})


def _neg_matrix(m):
    return -np.asarray(_float_matrix(m))


def _float_matrix(m) -> np.ndarray:
    if isinstance(m, GaussianMatrix):
        return np.array([[complex(*m.entries[0]), complex(*m.entries[1])], [complex(*m.entries[2]), complex(*m.entries[3])]])
    if isinstance(m, Isometry):
        return m.matrix
    return np.asarray(m, dtype=complex)


def evaluate_lift(r: RepAssignment, word: Word):
    """Product of the chosen SL(2) lifts along ``word``."""
    if r.exact:
        out = GaussianMatrix.identity()
        for g, e in word:
            m = r.lift(g)
            step = m if e > 0 else m.inverse()
            for _ in range(abs(e)):
                out = out @ step
        return out
    out = np.eye(2, dtype=complex)
    for g, e in word:
        m = _float_matrix(r.lift(g))
        step = m if e > 0 else np.linalg.inv(m)
        out = out @ np.linalg.matrix_power(step, abs(e))
    return out


def _relator_sign(value, tol: float) -> Optional[int]:
    if isinstance(value, GaussianMatrix):
        return value.sign_of_scalar()
    eye = np.eye(2)
    if np.max(np.abs(value - eye)) <= tol:
        return 1
    if np.max(np.abs(value + eye)) <= tol:
        return -1
    return None


def verify_presentation(p: Presentation, r: RepAssignment, tol: float = RELATOR_TOL) -> list:
    missing = [g for g in p.generators if g not in r.images]
    if missing:
        raise ValueError(f"no image for generators {missing}")
    return [_relator_sign(evaluate_lift(r, rel), tol) is not None for rel in p.relators]


@dataclass
class LiftResult:
    liftable: bool
    relator_signs: list
    flips: Optional[dict] = None
    certificate: Optional[list] = None

    def to_json(self) -> dict:
        out = {"liftable": self.liftable, "relator_signs": self.relator_signs}
        if self.flips is not None:
            out["flips"] = self.flips
        if self.certificate is not None:
            out["violated_combination"] = self.certificate
        return out


def lift_obstruction(p: Presentation, r: RepAssignment, tol: float = RELATOR_TOL) -> LiftResult:
    """Decide whether the representation lifts to SL(2,C).

    Negating the lift of generator g changes the sign of relator k by
    (-1)^(exponent sum of g in k), so a lift exists iff M x = s over Z_2.
    The witness is either the sign flips x or a set of relators whose sum
    of rows vanishes while their signs multiply to -1.
    """
    signs = []
    for k, rel in enumerate(p.relators):
        s = _relator_sign(evaluate_lift(r, rel), tol)
        if s is None:
            raise GeometryError(f"relator {k} does not evaluate to +-1")
        signs.append(s)
    if not p.relators:
        return LiftResult(True, [], flips={g: 0 for g in p.generators})
    M = p.exponent_sums() % 2
    s = np.array([1 if v < 0 else 0 for v in signs])
    x, y = framing.gf2_solve(M, s)
    if x is not None:
        return LiftResult(True, signs, flips={g: int(v) for g, v in zip(p.generators, x)})
    return LiftResult(False, signs, certificate=[int(k) for k in np.nonzero(y)[0]])


# ---------------------------------------------------------------- JSON


def _matrix_from_json(obj, exact: bool):
    if exact:
        return GaussianMatrix.from_entries(obj)
    values = np.asarray(obj, dtype=float).ravel()
    if values.size != 8:
        raise ValueError("a matrix is 8 reals: re/im of a, b, c, d")
    return values[0::2] + 1j * values[1::2]


def rep_from_json(obj: dict) -> tuple:
    if obj.get("schema") != "rep/1":
        raise ValueError(f'expected "schema": "rep/1", got {obj.get("schema")!r}')
    gens = tuple(obj["generators"])
    rels = tuple(parse_word(w) if isinstance(w, str) else tuple((g, e) for g, e in w) for w in obj.get("relators", []))
    exact = bool(obj.get("exact", False))
    images = {}
    for g, m in obj["images"].items():
        v = _matrix_from_json(m, exact)
        images[g] = v if exact else np.array([[v[0], v[1]], [v[2], v[3]]])
    return Presentation(gens, rels), RepAssignment(images, exact)


def rep_to_json(p: Presentation, r: RepAssignment) -> dict:
    images = {}
    for g, m in r.images.items():
        if isinstance(m, GaussianMatrix):
            images[g] = m.to_json()
        else:
            flat = _float_matrix(m).ravel()
            images[g] = [float(v) for z in flat for v in (z.real, z.imag)]
    return {
        "schema": "rep/1",
        "generators": list(p.generators),
        "relators": [[[g, e] for g, e in rel] for rel in p.relators],
        "exact": r.exact,
        "images": images,
    }


def knot_example() -> tuple:
    """Two-relator presentation with images A, B, I that does not lift."""
    p = Presentation(
        ("alpha", "beta", "mu"),
        (
            parse_word("mu alpha mu^-1 beta^-2 alpha^-1"),
            parse_word("mu beta mu^-1 beta^-2 alpha^-1 beta^-2 alpha^-1 beta^-1"),
        ),
    )
    r = RepAssignment(
        {
            "alpha": GaussianMatrix.from_entries([(0, 1), 0, 0, (0, -1)]),
            "beta": GaussianMatrix.from_entries([1, 1, -2, -1]),
            "mu": GaussianMatrix.identity(),
        },
        exact=True,
    )
    return p, r


# ---------------------------------------------------------------- peripheral pairs


class Verdict(Enum):
    PARABOLIC_RANK_TWO = "ParabolicRankTwo"
    CONE_PAIR = "ConePair"
    FAILS = "Fails"


@dataclass
class ConeVerdict:
    verdict: Verdict
    angle: Optional[float] = None
    length: Optional[float] = None
    twist: Optional[float] = None
    reason: Optional[str] = None

    def to_json(self) -> dict:
        out = {"verdict": self.verdict.value}
        for key in ("angle", "length", "twist", "reason"):
            v = getattr(self, key)
            if v is not None:
                out[key] = v
        return out


@dataclass
class PeripheralPair:
    mu: Isometry
    lam: Isometry
    orientation: int = 1  # +1: lambda's axis toward its attracting point, -1: reversed

    def conjugated(self, k: Isometry) -> "PeripheralPair":
        ki = k.inverse()
        return PeripheralPair(ki @ self.mu @ k, ki @ self.lam @ k, self.orientation)


def _commute(g: Isometry, h: Isometry, tol: float) -> bool:
    c = g.matrix @ h.matrix @ g.inverse().matrix @ h.inverse().matrix
    scale = max(1.0, float(np.max(np.abs(g.matrix))) * float(np.max(np.abs(h.matrix)))) ** 2
    eye = np.eye(2)
    return min(np.max(np.abs(c - eye)), np.max(np.abs(c + eye))) <= tol * scale


def _translation(g: Isometry, fixed) -> complex:
    """Translation part of a parabolic after moving its fixed point to infinity."""
    if fixed is INF:
        m = g.matrix
    else:
        k = np.array([[fixed, -1], [1, 0]], dtype=complex)
        ki = np.array([[0, 1], [-1, fixed]], dtype=complex)
        m = ki @ g.matrix @ k
    return m[0, 1] / m[0, 0]


def cone_conditions(pp: PeripheralPair, tol: float = AXIS_TOL) -> ConeVerdict:
    mu_cls, lam_cls = classify(pp.mu), classify(pp.lam)
    if mu_cls.kind is Kind.PARABOLIC and lam_cls.kind is Kind.PARABOLIC:
        p_mu = _eigen_fixed_point(pp.mu, pp.mu.trace / 2)
        p_lam = _eigen_fixed_point(pp.lam, pp.lam.trace / 2)
        if not boundary_close(p_mu, p_lam, tol) or not _commute(pp.mu, pp.lam, COMMUTE_TOL):
            return ConeVerdict(Verdict.FAILS, reason="non-commuting")
        a, b = _translation(pp.mu, p_mu), _translation(pp.lam, p_mu)
        if abs((a.conjugate() * b).imag) <= tol * abs(a) * abs(b):
            return ConeVerdict(Verdict.FAILS, reason="rank one")
        return ConeVerdict(Verdict.PARABOLIC_RANK_TWO)
    if lam_cls.kind is not Kind.LOXODROMIC:
        return ConeVerdict(Verdict.FAILS, reason="trace of lambda in [-2,2]")
    if mu_cls.kind not in (Kind.ELLIPTIC, Kind.IDENTITY):
        return ConeVerdict(Verdict.FAILS, reason="mu not elliptic")
    t2 = pp.mu.trace_squared
    if abs(t2.imag) > 1e-9 or not -1e-9 <= t2.real <= 4 + 1e-9:
        return ConeVerdict(Verdict.FAILS, reason="trace of mu outside [-2,2]")
    geod = axis(pp.lam)
    if pp.orientation < 0:
        geod = geod.reversed()
    cl = complex_length(pp.lam, geod)
    twist = math.remainder(cl.imag, 2 * math.pi)
    if mu_cls.kind is Kind.IDENTITY:
        return ConeVerdict(Verdict.CONE_PAIR, angle=0.0, length=abs(cl.real), twist=twist)
    mu_axis = axis(pp.mu)
    if not mu_axis.same_line(geod, tol):
        return ConeVerdict(Verdict.FAILS, reason="skew axes")
    if not _commute(pp.mu, pp.lam, COMMUTE_TOL):
        return ConeVerdict(Verdict.FAILS, reason="non-commuting")
    theta = complex_length(pp.mu, geod, tol).imag
    return ConeVerdict(Verdict.CONE_PAIR, angle=theta, length=abs(cl.real), twist=twist)


# ---------------------------------------------------------------- angle shifts


def prop_angle_witness(theta: Sequence[float], k: Sequence[int], handles: Sequence[framing.HandleData] = ()) -> list:
    """Shift cone angles by 4 pi k and confirm the even twist lies in every framing kernel."""
    if len(theta) != len(k):
        raise ValueError("theta and k must have the same length")
    shifted = [float(t) + 4 * math.pi * int(n) for t, n in zip(theta, k)]
    bad = [i for i, v in enumerate(shifted) if v <= 0]
    if bad:
        raise ValueError(f"shifted angles at {bad} are not positive")
    for h in handles:
        if h.n != len(k):
            raise ValueError(f"handle data has n={h.n}, expected {len(k)}")
        v = framing.even_twist_vector(k, h.m)
        if any(framing.obstruction(h, v)):
            raise AssertionError("even twist vector outside the framing kernel")
    return shifted
