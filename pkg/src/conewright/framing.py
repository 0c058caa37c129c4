"""Framing groups: the kernel of the mod 2 obstruction map.

The ambient group is Z^n x (Z_2^n / Z_2) x Z_2^m, with n cone loci, m closed
1-handles and r 2-handles.  The obstruction of (x, y, z) is

    u_k = sum_i a_ki x_i + sum_j c_kj z_j   (mod 2),

so y never contributes and only x mod 2 matters.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class HandleData:
    n: int
    m: int
    r: int
    a: tuple
    c: tuple

    def __post_init__(self):
        a = tuple(tuple(int(v) for v in row) for row in self.a)
        c = tuple(tuple(int(v) % 2 for v in row) for row in self.c)
        if len(a) != self.r or len(c) != self.r:
            raise ValueError(f"expected {self.r} rows in a and c")
        if any(len(row) != self.n for row in a):
            raise ValueError(f"rows of a must have length n={self.n}")
        if any(len(row) != self.m for row in c):
            raise ValueError(f"rows of c must have length m={self.m}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)

    @classmethod
    def from_arrays(cls, a, c) -> "HandleData":
        a = np.asarray(a, dtype=int)
        c = np.asarray(c, dtype=int)
        r = max(a.shape[0] if a.ndim == 2 else 0, c.shape[0] if c.ndim == 2 else 0)
        a = a.reshape(r, -1) if a.size else np.zeros((r, 0), int)
        c = c.reshape(r, -1) if c.size else np.zeros((r, 0), int)
        return cls(a.shape[1], c.shape[1], r, a.tolist(), c.tolist())

    @classmethod
    def from_json(cls, obj: dict) -> "HandleData":
        if obj.get("schema") not in (None, "handles/1"):
            raise ValueError(f'expected "schema": "handles/1", got {obj.get("schema")!r}')
        n, m = int(obj["n"]), int(obj["m"])
        a, c = obj.get("a", []), obj.get("c", [])
        r = int(obj.get("r", max(len(a), len(c))))
        if not a:
            a = [[] for _ in range(r)]
        if not c:
            c = [[] for _ in range(r)]
        return cls(n, m, r, a, c)

    def to_json(self) -> dict:
        return {"schema": "handles/1", "n": self.n, "m": self.m, "r": self.r, "a": [list(x) for x in self.a], "c": [list(x) for x in self.c]}

    def mod2_matrix(self) -> np.ndarray:
        """The r x (n + m) matrix (a mod 2 | c) over Z_2."""
        a = np.array(self.a, dtype=int).reshape(self.r, self.n) % 2
        c = np.array(self.c, dtype=int).reshape(self.r, self.m) % 2
        return np.hstack([a, c])


@dataclass(frozen=True)
class FramingVector:
    x: tuple
    y: tuple
    z: tuple

    def __post_init__(self):
        x = tuple(int(v) for v in self.x)
        y = tuple(int(v) % 2 for v in self.y)
        z = tuple(int(v) % 2 for v in self.z)
        if len(y) != len(x):
            raise ValueError("x and y must both have length n")
        # canonical representative of the diagonal coset: y_1 = 0
        if y and y[0] == 1:
            y = tuple(1 - v for v in y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    def __add__(self, other: "FramingVector") -> "FramingVector":
        return FramingVector(
            tuple(a + b for a, b in zip(self.x, other.x)),
            tuple(a ^ b for a, b in zip(self.y, other.y)),
            tuple(a ^ b for a, b in zip(self.z, other.z)),
        )

    def __neg__(self) -> "FramingVector":
        return FramingVector(tuple(-a for a in self.x), self.y, self.z)

    def key(self) -> tuple:
        return self.x + self.y + self.z

    def to_json(self) -> dict:
        return {"x": list(self.x), "y": list(self.y), "z": list(self.z)}

    @classmethod
    def zero(cls, n: int, m: int) -> "FramingVector":
        return cls((0,) * n, (0,) * n, (0,) * m)


def obstruction(h: HandleData, v: FramingVector) -> tuple:
    if len(v.x) != h.n or len(v.z) != h.m:
        raise ValueError(f"vector has n={len(v.x)}, m={len(v.z)}; handles have n={h.n}, m={h.m}")
    return tuple(
        (sum(a * x for a, x in zip(h.a[k], v.x)) + sum(c * z for c, z in zip(h.c[k], v.z))) % 2
        for k in range(h.r)
    )


# ---------------------------------------------------------------- Z_2 linear algebra


def gf2_rref(M: np.ndarray):
    """Reduced row echelon form over Z_2 and the pivot columns."""
    M = np.array(M, dtype=np.uint8) % 2
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(M[r:, c])[0]
        if len(hits) == 0:
            continue
        p = r + hits[0]
        if p != r:
            M[[r, p]] = M[[p, r]]
        for k in range(rows):
            if k != r and M[k, c]:
                M[k] ^= M[r]
        pivots.append(c)
        r += 1
    return M, pivots


def gf2_rank(M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(gf2_rref(M)[1])


def gf2_nullspace(M) -> list:
    """Basis of {v : M v = 0} over Z_2."""
    M = np.asarray(M, dtype=int)
    cols = M.shape[1]
    if M.shape[0] == 0:
        return [np.eye(cols, dtype=int)[i] for i in range(cols)]
    R, pivots = gf2_rref(M)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=int)
        v[f] = 1
        for row, p in enumerate(pivots):
            if R[row, f]:
                v[p] = 1
        basis.append(v)
    return basis


def gf2_solve(M, s):
    """Solve M x = s over Z_2.

    Returns ``(x, None)`` when solvable, else ``(None, y)`` with y M = 0 and
    y . s = 1 (a certificate of inconsistency).
    """
    M = np.asarray(M, dtype=int) % 2
    s = np.asarray(s, dtype=int) % 2
    rows, cols = M.shape
    aug = np.hstack([M, s.reshape(-1, 1), np.eye(rows, dtype=int)])
    # eliminate on the pivot columns only, carrying the row transform alongside
    A = np.array(aug, dtype=np.uint8) % 2
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(A[r:, c])[0]
        if len(hits) == 0:
            continue
        p = r + hits[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        for k in range(rows):
            if k != r and A[k, c]:
                A[k] ^= A[r]
        pivots.append(c)
        r += 1
    for k in range(r, rows):
        if A[k, cols]:
            return None, A[k, cols + 1 :].astype(int)
    x = np.zeros(cols, dtype=int)
    for row, p in enumerate(pivots):
        x[p] = A[row, cols]
    return x, None


# ---------------------------------------------------------------- Smith normal form


def smith_normal_form(A):
    """Integer Smith form: returns (D, U, V) with U A V = D, U and V unimodular."""
    A = [[int(v) for v in row] for row in np.asarray(A, dtype=object).tolist()]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    D = [row[:] for row in A]
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(M, i, j):
        M[i], M[j] = M[j], M[i]

    def swap_cols(M, i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]

    def add_row(M, src, dst, k):  # row_dst += k row_src
        M[dst] = [a + k * b for a, b in zip(M[dst], M[src])]

    def add_col(M, src, dst, k):
        for row in M:
            row[dst] += k * row[src]

    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero |entry| in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        swap_rows(D, t, i)
        swap_rows(U, t, i)
        swap_cols(D, t, j)
        swap_cols(V, t, j)
        done = False
        while not done:
            done = True
            for i in range(t + 1, rows):
                q = D[i][t] // D[t][t]
                if q:
                    add_row(D, t, i, -q)
                    add_row(U, t, i, -q)
                if D[i][t]:
                    swap_rows(D, t, i)
                    swap_rows(U, t, i)
                    done = False
            for j in range(t + 1, cols):
                q = D[t][j] // D[t][t]
                if q:
                    add_col(D, t, j, -q)
                    add_col(V, t, j, -q)
                if D[t][j]:
                    swap_cols(D, t, j)
                    swap_cols(V, t, j)
                    done = False
            if done:
                # divisibility: the pivot must divide the rest of the block
                for i in range(t + 1, rows):
                    for j in range(t + 1, cols):
                        if D[i][j] % D[t][t]:
                            add_row(D, i, t, 1)
                            add_row(U, i, t, 1)
                            done = False
                            break
                    if not done:
                        break
        if D[t][t] < 0:
            D[t] = [-v for v in D[t]]
            U[t] = [-v for v in U[t]]
        t += 1
    return D, U, V


def _int_inverse_times(U, D_diag, T):
    # X = D^-1 U T, exact (entries divisible by construction)
    UT = [[sum(U[i][k] * T[k][j] for k in range(len(T))) for j in range(len(T[0]))] for i in range(len(U))]
    out = []
    for i, row in enumerate(UT):
        d = D_diag[i]
        if any(v % d for v in row):
            raise ArithmeticError("relation lattice not contained in kernel lattice")
        out.append([v // d for v in row])
    return out


# ---------------------------------------------------------------- the framing group


@dataclass
class FramingGroup:
    generators: list
    index: int
    infinite: bool
    rank: int
    free_rank: int
    invariant_factors: tuple

    def to_json(self) -> dict:
        return {
            "generators": [g.to_json() for g in self.generators],
            "index": self.index,
            "infinite": self.infinite,
            "obstruction_rank": self.rank,
            "free_rank": self.free_rank,
            "invariant_factors": list(self.invariant_factors),
        }


def _torsion_coordinate_count(h: HandleData) -> int:
    return max(h.n - 1, 0) + h.m


def kernel_invariant_factors(h: HandleData) -> tuple:
    """(free rank, torsion invariant factors) of ker f, via Smith forms.

    Coordinates are x (free), y_2..y_n and z (each mod 2).  The preimage
    lattice of ker f in Z^N contains 2 Z^N; dividing it by the lattice 2 Z on
    the torsion coordinates gives ker f.
    """
    n, m = h.n, h.m
    ny = max(n - 1, 0)
    N = n + ny + m
    if N == 0:
        return 0, ()
    M2 = h.mod2_matrix()
    gens = [2 * np.eye(N, dtype=int)[i] for i in range(N)]
    for v in gf2_nullspace(M2) if h.r else [np.eye(n + m, dtype=int)[i] for i in range(n + m)]:
        full = np.zeros(N, dtype=int)
        full[:n] = v[:n]
        full[n + ny :] = v[n:]
        gens.append(full)
    for j in range(ny):
        e = np.zeros(N, dtype=int)
        e[n + j] = 1
        gens.append(e)
    G = np.array(gens, dtype=int).T  # N x g
    D, U, _ = smith_normal_form(G)
    diag = [D[i][i] for i in range(N)]
    if any(d == 0 for d in diag):
        raise ArithmeticError("kernel lattice is not full rank")
    T = [[2 * int(i == j + n) for j in range(N - n)] for i in range(N)]
    if N - n == 0:
        return n, ()
    X = _int_inverse_times(U, diag, T)
    DX, _, _ = smith_normal_form(X)
    factors = [abs(DX[i][i]) for i in range(min(len(DX), len(DX[0])))]
    torsion = tuple(sorted(d for d in factors if d not in (0, 1)))
    rank_X = sum(1 for d in factors if d != 0)
    return N - rank_X, torsion


def framing_group(h: HandleData) -> FramingGroup:
    n, m = h.n, h.m
    M2 = h.mod2_matrix()
    rank = gf2_rank(M2) if h.r else 0
    gens = []
    for i in range(n):
        x = [0] * n
        x[i] = 2
        gens.append(FramingVector(x, (0,) * n, (0,) * m))
    basis = gf2_nullspace(M2) if h.r else [np.eye(n + m, dtype=int)[i] for i in range(n + m)]
    for v in basis:
        gens.append(FramingVector(tuple(int(a) for a in v[:n]), (0,) * n, tuple(int(a) for a in v[n:])))
    for j in range(1, n):
        y = [0] * n
        y[j] = 1
        gens.append(FramingVector((0,) * n, y, (0,) * m))
    free_rank, torsion = kernel_invariant_factors(h)
    return FramingGroup(gens, 2**rank, n >= 1, rank, free_rank, torsion)


def stabilize(h: HandleData) -> HandleData:
    """Add a 1-handle and a 2-handle cancelling it: f'(x, z, z_new) = (f(x, z), z_new)."""
    a = [list(row) for row in h.a] + [[0] * h.n]
    c = [list(row) + [0] for row in h.c] + [[0] * h.m + [1]]
    return HandleData(h.n, h.m + 1, h.r + 1, a, c)


def destabilized_image(v: FramingVector) -> FramingVector:
    """Drop the last z coordinate (inverse of the stabilization inclusion on kernels)."""
    return FramingVector(v.x, v.y, v.z[:-1])


def stabilization_preserves_kernel(h: HandleData) -> bool:
    """Kernels before and after stabilizing agree as groups and via generator images.

    The index in the ambient group doubles (the image gains a Z_2), so it is
    not compared.
    """
    s = stabilize(h)
    before, after = framing_group(h), framing_group(s)
    if (before.free_rank, before.invariant_factors, before.infinite) != (after.free_rank, after.invariant_factors, after.infinite):
        return False
    if any(g.z[-1] for g in after.generators):
        return False
    images = [destabilized_image(g) for g in after.generators]
    if any(any(obstruction(h, v)) for v in images):
        return False
    # the images generate the whole original kernel
    return generated_in_box(images, h.n, h.m, 2) == brute_force_kernel(h, 2)


def permute_columns(h: HandleData, perm_x: Sequence[int], perm_z: Sequence[int]) -> HandleData:
    a = [[row[p] for p in perm_x] for row in h.a]
    c = [[row[p] for p in perm_z] for row in h.c]
    return HandleData(h.n, h.m, h.r, a, c)


def random_handles(rng: np.random.Generator, max_n: int = 3, max_m: int = 3, max_r: int = 4, entry: int = 3) -> HandleData:
    n = int(rng.integers(0, max_n + 1))
    m = int(rng.integers(0, max_m + 1))
    r = int(rng.integers(0, max_r + 1))
    a = rng.integers(-entry, entry + 1, size=(r, n)).tolist()
    c = rng.integers(0, 2, size=(r, m)).tolist()
    return HandleData(n, m, r, a, c)


# ---------------------------------------------------------------- brute-force oracle


def brute_force_kernel(h: HandleData, bound: int = 6) -> set:
    """Keys of all kernel elements with |x_i| <= bound, by direct evaluation."""
    n, m = h.n, h.m
    xl = list(itertools.product(range(-bound, bound + 1), repeat=n))
    zl = list(itertools.product((0, 1), repeat=m))
    xs = np.array(xl, dtype=int).reshape(len(xl), n)
    zs = np.array(zl, dtype=int).reshape(len(zl), m)
    ys = [(0,) + rest for rest in itertools.product((0, 1), repeat=n - 1)] if n else [()]
    A = np.array(h.a, dtype=int).reshape(h.r, n)
    C = np.array(h.c, dtype=int).reshape(h.r, m)
    ux = (xs @ A.T) % 2
    uz = (zs @ C.T) % 2
    out = set()
    for i, x in enumerate(xl):
        for j, z in enumerate(zl):
            if not np.any((ux[i] + uz[j]) % 2):
                out.update(x + y + z for y in ys)
    return out


def generated_in_box(generators: Sequence[FramingVector], n: int, m: int, bound: int = 6) -> set:
    """Keys of the subgroup generated by ``generators`` inside the box, by closure.

    Breadth-first search from 0 using the moves +-g, never leaving the box.
    States are rows (x, y, z) with the bit part packed into one integer.
    """
    nbits = n + m
    weights = 1 << np.arange(nbits, dtype=np.int64)
    moves_x, moves_b = [], []
    for g in generators:
        bits = int(np.dot(np.array(g.y + g.z, dtype=np.int64), weights)) if nbits else 0
        moves_x += [g.x, tuple(-v for v in g.x)]
        moves_b += [bits, bits]
    mx = np.array(moves_x, dtype=np.int64).reshape(len(moves_x), n)
    mb = np.array(moves_b, dtype=np.int64)
    base = 2 * bound + 1
    radix = base ** np.arange(n, dtype=np.int64)

    def encode(x, b):
        return ((x + bound) @ radix) * (1 << nbits) + b

    fx = np.zeros((1, n), dtype=np.int64)
    fb = np.zeros(1, dtype=np.int64)
    seen = np.unique(encode(fx, fb))
    while len(fb) and len(mb):
        cx = (fx[:, None, :] + mx[None, :, :]).reshape(len(fb) * len(mb), n)
        cb = (fb[:, None] ^ mb[None, :]).reshape(-1)
        inside = np.all(np.abs(cx) <= bound, axis=1) if n else np.ones(len(cb), dtype=bool)
        cx, cb = cx[inside], cb[inside]
        keys, first = np.unique(encode(cx, cb), return_index=True)
        fresh = ~np.isin(keys, seen)
        fx, fb = cx[first[fresh]], cb[first[fresh]]
        seen = np.union1d(seen, keys[fresh])
    out = set()
    for key in seen.tolist():
        b = key % (1 << nbits)
        xi = key >> nbits
        x = []
        for _ in range(n):
            x.append(xi % base - bound)
            xi //= base
        bits = tuple((b >> k) & 1 for k in range(nbits))
        out.add(tuple(x) + bits)
    return out


def even_twist_vector(k: Sequence[int], m: int) -> FramingVector:
    n = len(k)
    return FramingVector(tuple(2 * int(v) for v in k), (0,) * n, (0,) * m)
