from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import gf_mul_sympy
from zetareg.errors import BudgetExceeded, DivisionByZero, FieldMismatch, NotPrime
from zetareg.ffield import (
    FFElem,
    arith,
    build_field,
    embed,
    enumerate_field,
    field_tables,
    is_irreducible,
    primitive_element,
)

SMALL_FIELDS = [(2, 1), (3, 1), (5, 1), (2, 2), (2, 3), (3, 2), (2, 4), (5, 2)]


def test_least_irreducible_moduli():
    assert build_field(2, 2).modulus == (1, 1, 1)
    assert build_field(3, 2).modulus == (1, 0, 1)
    assert build_field(2, 3).modulus == (1, 1, 0, 1)


def test_not_prime():
    with pytest.raises(NotPrime):
        build_field(4, 1)
    with pytest.raises(NotPrime):
        build_field(1, 1)


def test_irreducibility_against_sympy():
    import sympy
    t = sympy.Symbol("t")
    for p in (2, 3):
        for deg in (2, 3, 4):
            for tail in product(range(p), repeat=deg):
                f = list(tail) + [1]
                expected = sympy.Poly(list(reversed(f)), t, modulus=p).is_irreducible
                assert is_irreducible(f, p) == expected, (p, f)


@pytest.mark.parametrize("p,e", SMALL_FIELDS)
def test_multiplication_matches_sympy(p, e):
    F = build_field(p, e)
    elems = list(enumerate_field(F))
    assert len(elems) == p**e
    for a in elems[:: max(1, len(elems) // 7)]:
        for b in elems:
            assert (a * b).coeffs == gf_mul_sympy(a.coeffs, b.coeffs, F.modulus, p)


@pytest.mark.parametrize("p,e", SMALL_FIELDS)
def test_enumeration_order_matches_index(p, e):
    F = build_field(p, e)
    for k, x in enumerate(enumerate_field(F)):
        assert x.index() == k
        assert F.element(k) == x


def test_spec_examples():
    F5 = build_field(5)
    assert arith("inv", F5(2)) == F5(3)
    F4 = build_field(2, 2)
    x = F4.gen()
    assert x**4 == x
    assert len(list(enumerate_field(build_field(3, 2)))) == 9


def test_division_by_zero_and_mismatch():
    F = build_field(3)
    with pytest.raises(DivisionByZero):
        F(1) / F(0)
    with pytest.raises(ZeroDivisionError):
        F(0).inverse()
    with pytest.raises(FieldMismatch):
        F(1) + build_field(5)(1)


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        list(enumerate_field(build_field(2, 4), budget=10))


def test_budget_env(monkeypatch):
    monkeypatch.setenv("ZETAREG_BUDGET", "5")
    with pytest.raises(BudgetExceeded):
        list(enumerate_field(build_field(2, 3)))


@pytest.mark.parametrize("p,e", SMALL_FIELDS)
def test_primitive_element_generates(p, e):
    F = build_field(p, e)
    g = primitive_element(F)
    seen = {(g**k).coeffs for k in range(F.size - 1)}
    assert len(seen) == F.size - 1


@pytest.mark.parametrize("p,e", SMALL_FIELDS)
def test_tables_agree_with_scalar_arithmetic(p, e):
    F = build_field(p, e)
    T = field_tables(F)
    idx = np.arange(F.size)
    a, b = np.meshgrid(idx, idx)
    add, mul = T.add(a.ravel(), b.ravel()), T.mul(a.ravel(), b.ravel())
    for k, (i, j) in enumerate(zip(a.ravel(), b.ravel())):
        x, y = F.element(int(i)), F.element(int(j))
        assert add[k] == (x + y).index()
        assert mul[k] == (x * y).index()
    for k in range(5):
        pw = T.power(idx, k)
        assert all(pw[i] == (F.element(i) ** k).index() for i in range(F.size))


@pytest.mark.parametrize("small,big", [((2, 1), (2, 4)), ((2, 2), (2, 4)), ((3, 1), (3, 2)), ((2, 2), (2, 6))])
def test_embedding_is_a_ring_homomorphism(small, big):
    S, B = build_field(*small), build_field(*big)
    elems = list(enumerate_field(S))
    images = {x: embed(x, B) for x in elems}
    assert len(set(images.values())) == len(elems)
    for x in elems:
        for y in elems:
            assert images[x + y] == images[x] + images[y]
            assert images[x * y] == images[x] * images[y]


def test_embedding_rejects_non_subfield():
    with pytest.raises(FieldMismatch):
        embed(build_field(2, 2).gen(), build_field(2, 3))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL_FIELDS), st.data())
def test_field_axioms(pe, data):
    F = build_field(*pe)
    pick = st.integers(0, F.size - 1).map(F.element)
    a, b, c = data.draw(pick), data.draw(pick), data.draw(pick)
    assert a * (b + c) == a * b + a * c
    assert (a - b) + b == a
    if not b.is_zero():
        assert (a / b) * b == a
    assert a ** F.size == a


def test_coercion():
    F = build_field(3, 2)
    assert F([1, 2]) == FFElem(F, (1, 2))
    # x^2 = -1 in F_3[x]/(x^2 + 1)
    assert F([0, 0, 1]) == F(-1)
