import itertools

import numpy as np
import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from conewright.framing import (
    FramingVector,
    HandleData,
    brute_force_kernel,
    even_twist_vector,
    framing_group,
    generated_in_box,
    gf2_nullspace,
    gf2_rank,
    gf2_solve,
    kernel_invariant_factors,
    obstruction,
    permute_columns,
    random_handles,
    smith_normal_form,
    stabilization_preserves_kernel,
    stabilize,
)

EXAMPLE = HandleData(1, 1, 1, [[1]], [[1]])


def vec(x, z, y=None):
    return FramingVector(x, y if y is not None else (0,) * len(x), z)


# ---------------------------------------------------------------- obstruction


def test_obstruction_examples():
    assert obstruction(EXAMPLE, vec([1], [0])) == (1,)
    assert obstruction(EXAMPLE, vec([0], [0])) == (0,)
    assert obstruction(EXAMPLE, vec([1], [1])) == (0,)
    with pytest.raises(ValueError):
        obstruction(EXAMPLE, vec([1, 0], [0]))


def test_y_never_contributes(rng):
    for _ in range(50):
        h = random_handles(rng)
        x = rng.integers(-5, 6, h.n)
        z = rng.integers(0, 2, h.m)
        a = obstruction(h, vec(x, z, [0] * h.n))
        b = obstruction(h, vec(x, z, rng.integers(0, 2, h.n)))
        assert a == b


def test_y_coset_is_canonical():
    assert FramingVector((0, 0), (1, 0), ()).y == (0, 1)
    assert FramingVector((0, 0), (1, 1), ()) == FramingVector.zero(2, 0)


def test_handle_data_validation_and_json():
    with pytest.raises(ValueError):
        HandleData(2, 0, 1, [[1]], [[]])
    with pytest.raises(ValueError):
        HandleData(1, 1, 2, [[1]], [[1]])
    assert HandleData.from_json(EXAMPLE.to_json()) == EXAMPLE
    with pytest.raises(ValueError):
        HandleData.from_json(dict(EXAMPLE.to_json(), schema="x"))


# ---------------------------------------------------------------- Z_2 linear algebra


def test_gf2_solve_and_certificate(rng):
    for _ in range(200):
        M = rng.integers(0, 2, (int(rng.integers(1, 5)), int(rng.integers(1, 5))))
        s = rng.integers(0, 2, M.shape[0])
        x, y = gf2_solve(M, s)
        if x is not None:
            assert np.array_equal((M @ x) % 2, s)
        else:
            assert np.all((y @ M) % 2 == 0)
            assert int(y @ s) % 2 == 1
        rank = gf2_rank(M)
        null = gf2_nullspace(M)
        assert len(null) == M.shape[1] - rank
        for v in null:
            assert not ((M @ v) % 2).any()


# ---------------------------------------------------------------- Smith normal form


def test_smith_normal_form_against_sympy(rng):
    for _ in range(40):
        A = rng.integers(-6, 7, (int(rng.integers(1, 5)), int(rng.integers(1, 5))))
        D, U, V = smith_normal_form(A.tolist())
        D, U, V = (np.array(M, dtype=object) for M in (D, U, V))
        assert (U.dot(A.astype(object)).dot(V) == D).all()
        assert abs(sympy.Matrix(U.tolist()).det()) == 1
        assert abs(sympy.Matrix(V.tolist()).det()) == 1
        ours = [abs(int(D[i][i])) for i in range(min(D.shape))]
        theirs = sympy_snf(sympy.Matrix(A.tolist()), domain=sympy.ZZ)
        theirs = [abs(int(theirs[i, i])) for i in range(min(A.shape))]
        assert ours == theirs
        nonzero = [d for d in ours if d]
        assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


# ---------------------------------------------------------------- framing group


def test_framing_group_example():
    g = framing_group(EXAMPLE)
    assert g.index == 2
    assert g.infinite
    keys = {v.key() for v in g.generators}
    assert keys == {(2, 0, 0), (1, 0, 1)}
    kernel = brute_force_kernel(EXAMPLE, 4)
    assert generated_in_box(g.generators, 1, 1, 4) == kernel
    assert (1, 0, 1) in kernel and (1, 0, 0) not in kernel
    assert (g.free_rank, g.invariant_factors) == (1, ())


def test_trivial_obstruction_gives_whole_group():
    h = HandleData(2, 1, 1, [[0, 2]], [[0]])
    g = framing_group(h)
    assert g.index == 1
    box = 3
    ambient = {x + y + z for x in itertools.product(range(-box, box + 1), repeat=2) for y in [(0, 0), (0, 1)] for z in [(0,), (1,)]}
    assert brute_force_kernel(h, box) == ambient
    assert generated_in_box(g.generators, 2, 1, box) == ambient


def test_finite_group_without_cone_loci():
    h = HandleData(0, 2, 1, [[]], [[1, 1]])
    g = framing_group(h)
    assert not g.infinite
    assert brute_force_kernel(h) == {(0, 0), (1, 1)}
    assert (g.free_rank, g.invariant_factors) == (0, (2,))


def test_generators_lie_in_kernel(rng):
    for _ in range(100):
        h = random_handles(rng)
        g = framing_group(h)
        assert all(not any(obstruction(h, v)) for v in g.generators)
        assert g.index == 2 ** gf2_rank(h.mod2_matrix()) if h.r else g.index == 1
        assert g.infinite == (h.n >= 1)


def test_oracle_equivalence(rng):
    for _ in range(25):
        h = random_handles(rng)
        g = framing_group(h)
        assert generated_in_box(g.generators, h.n, h.m, 6) == brute_force_kernel(h, 6)


def test_even_twists_always_in_kernel(rng):
    for _ in range(200):
        h = random_handles(rng)
        k = rng.integers(-5, 6, h.n)
        assert not any(obstruction(h, even_twist_vector(k, h.m)))


def test_column_permutations_preserve_structure(rng):
    for _ in range(50):
        h = random_handles(rng)
        px, pz = rng.permutation(h.n), rng.permutation(h.m)
        p = permute_columns(h, px, pz)
        a, b = framing_group(h), framing_group(p)
        assert (a.index, a.free_rank, a.invariant_factors) == (b.index, b.free_rank, b.invariant_factors)


def test_invariant_factors_match_box_count(rng):
    for _ in range(30):
        h = random_handles(rng)
        free, torsion = kernel_invariant_factors(h)
        assert free == h.n
        assert all(t == 2 for t in torsion)
        # the torsion subgroup of ker f is its intersection with x = 0
        sub = {v for v in brute_force_kernel(h, 2) if not any(v[: h.n])}
        assert len(sub) == 2 ** len(torsion)


# ---------------------------------------------------------------- stabilization


def test_stabilize_examples():
    s = stabilize(EXAMPLE)
    assert (s.n, s.m, s.r) == (1, 2, 2)
    gs = framing_group(s)
    assert gs.infinite == framing_group(EXAMPLE).infinite
    # the stabilized obstruction map gains an independent Z_2 image, so the index doubles
    assert gs.index == 4
    assert framing_group(stabilize(s)).index == 8
    assert (gs.free_rank, gs.invariant_factors) == (1, ())
    assert stabilization_preserves_kernel(EXAMPLE)
    assert stabilization_preserves_kernel(s)


def test_stabilization_preserves_kernel(rng):
    for _ in range(40):
        assert stabilization_preserves_kernel(random_handles(rng))


def test_group_json():
    doc = framing_group(EXAMPLE).to_json()
    assert doc["index"] == 2
    assert doc["infinite"] is True
    assert {tuple(g["x"]) + tuple(g["z"]) for g in doc["generators"]} == {(2, 0), (1, 1)}
