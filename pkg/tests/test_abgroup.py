import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from generators import rand_chain_map, rand_hom, rand_matrix, rand_snake
from oracles import chi_oracle, invariant_factors
from zetareg.abgroup import (
    FGAbGroup,
    FGComplex,
    FGMap,
    FQGroup,
    FQMap,
    Presentation,
    SnakeDiagram,
    chi,
    chi_complex_check,
    chi_compose_check,
    chi_snake_check,
    det,
    free_complex_homology,
    homology,
    identity_map,
    in_lattice,
    is_exact_at,
    is_smith_form,
    kernel_basis,
    lattice_basis,
    lattice_equal,
    localize,
    scalar_map,
    snf,
    snf_full,
    subquotient,
    zero_map,
)
from zetareg.errors import HypothesisViolated, InvalidMap, NotAComplex, NotFQ, RowsNotExact

Z, Z6, Z4, Z3 = (Presentation(o) for o in [(0,), (6,), (4,), (3,)])


def test_snf_example():
    U, D, V = snf([[2, 4], [6, 8]])
    assert [D[0, 0], D[1, 1]] == [2, 4]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6), st.randoms(use_true_random=False))
def test_snf_against_sympy(m, n, rnd):
    A = rand_matrix(rnd, m, n, 50)
    U, D, V = snf(A)
    assert is_smith_form(D)
    diag = [D[i, i] for i in range(min(m, n)) if D[i, i]]
    assert sorted(diag) == invariant_factors(A.tolist())


def test_snf_inverses():
    rng = random.Random(3)
    for _ in range(50):
        A = rand_matrix(rng, rng.randint(1, 5), rng.randint(1, 5), 30)
        U, D, V, Ui, Vi = snf_full(A)
        assert np.array_equal(U.dot(Ui), np.eye(U.shape[0], dtype=int))
        assert np.array_equal(V.dot(Vi), np.eye(V.shape[0], dtype=int))


def test_det_bareiss_against_sympy():
    import sympy
    rng = random.Random(5)
    for n in range(0, 7):
        A = rand_matrix(rng, n, n, 1000)
        assert det(A) == (sympy.Matrix(A.tolist()).det() if n else 1)


def test_group_canonical_form():
    G = FGAbGroup.from_orders([0, 2, 3, 4])
    assert G.free_rank == 1 and G.torsion == (2, 12)
    assert str(G) == "Z + Z/2 + Z/12"
    assert FGAbGroup.from_json(G.to_json()) == G
    with pytest.raises(ValueError):
        FGAbGroup(0, (4, 2))


def test_localize():
    assert localize(FGAbGroup.from_orders([0, 12]), 2) == FGAbGroup.from_orders([0, 3])


def test_ker_coker_examples():
    from zetareg.abgroup import ker_coker
    k, c = ker_coker(scalar_map(Z, 6))
    assert k.is_trivial and c == FGAbGroup.cyclic(6)
    assert chi(FGMap(Presentation((0, 3)), Z, [[1, 0]])) == Fraction(1, 3)
    assert chi(zero_map(Z6, Z4)) == Fraction(4, 6)
    with pytest.raises(NotFQ):
        chi(zero_map(Z, Z))


def test_invalid_map():
    with pytest.raises(InvalidMap):
        FGMap(Z4, Z6, [[1]])
    FGMap(Z4, Z6, [[3]])


def test_lattice_helpers():
    G = np.array([[2, 4, 0], [0, 6, 3]], dtype=object)
    L = lattice_basis(G)
    assert lattice_equal(L, G)
    assert L.shape[1] == 2
    K = kernel_basis(np.array([[1, 1, 1]], dtype=object))
    assert K.shape == (3, 2)
    assert in_lattice(np.array([[2], [3]], dtype=object), G)
    assert not in_lattice(np.array([[1], [0]], dtype=object), G)
    assert subquotient(np.eye(2, dtype=int).astype(object), G) == FGAbGroup.cyclic(6)


def test_fq_objects():
    g = FQGroup(FGAbGroup.cyclic(3), "unknown")
    assert FQGroup.from_json(g.to_json()) == g
    f = FQMap(FGMap(Z3, Z3, [[2]]), 1, 1, "iso")
    assert f.chi() == 1
    with pytest.raises(NotFQ):
        FQMap(FGMap(Z3, Z3, [[1]]), 1, "unknown").chi()


def test_exactness():
    i = FGMap(Z, Z, [[2]])
    pi = FGMap(Z, Presentation((2,)), [[1]])
    assert is_exact_at(i, pi)
    assert not is_exact_at(FGMap(Z, Z, [[4]]), pi)


def test_snake_rejects_non_exact_rows():
    rng = random.Random(1)
    d = rand_snake(rng)
    bad = SnakeDiagram(d.i, FGMap(d.pi.source, d.pi.target, d.pi.matrix * 0), d.i2, d.pi2, d.f, d.g, d.h)
    if d.pi.target.ngens:
        with pytest.raises(RowsNotExact):
            chi_snake_check(bad)


def _chi_or_none(f):
    try:
        return chi(f)
    except NotFQ:
        return None


@pytest.mark.parametrize("seed", range(40))
def test_chi_against_determinant_oracle(seed):
    rng = random.Random(seed)
    from generators import rand_group
    A = rand_group(rng, 4)
    B = Presentation(tuple(rng.randint(1, 9) if o else 0 for o in A.orders))
    f = rand_hom(rng, A, B)
    assert _chi_or_none(f) == chi_oracle(f.matrix.tolist(), A.orders, B.orders)


@pytest.mark.parametrize("seed", range(30))
def test_snake_and_compose_small(seed):
    rng = random.Random(1000 + seed)
    d = rand_snake(rng)
    try:
        rep = chi_snake_check(d)
    except NotFQ:
        return
    assert rep.holds
    A3 = Presentation(tuple(rng.randint(1, 9) if o else 0 for o in d.f.target.orders))
    k = rand_hom(rng, d.f.target, A3)
    if _chi_or_none(k) is not None:
        assert chi_compose_check(d.f, k).holds


@pytest.mark.parametrize("seed", range(30))
def test_complexes_lemma_small(seed):
    f = rand_chain_map(random.Random(seed))
    rep = chi_complex_check(f)
    assert rep.holds, rep


def test_complexes_lemma_hypothesis():
    C = FGComplex([Z], [])
    from zetareg.abgroup import ChainMap
    with pytest.raises(HypothesisViolated):
        chi_complex_check(ChainMap(C, C, {0: zero_map(Z, Z)}))


def test_complex_checks_and_homology():
    with pytest.raises(NotAComplex):
        FGComplex([Z, Z, Z], [identity_map(Z), identity_map(Z)])
    C = FGComplex([Z, Z], [scalar_map(Z, 2)])
    H = homology(C)
    assert H[0] == FGAbGroup.cyclic(2) and H[1].is_trivial


def test_free_complex_homology_routes_agree():
    rng = random.Random(9)
    from generators import rand_free_complex
    for _ in range(40):
        sizes = [rng.randint(0, 4) for _ in range(3)]
        C = rand_free_complex(rng, sizes)
        H = homology(C)
        H2 = free_complex_homology([d.matrix for d in C.diffs], sizes)
        assert [H[i] for i in range(3)] == H2
        H3 = free_complex_homology([d.matrix for d in C.diffs], sizes, invert=2)
        assert [localize(H[i], 2) for i in range(3)] == H3
