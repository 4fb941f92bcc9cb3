"""Finite fields F_{p^e} with dense coefficient-vector elements.

Elements of F_{p^e} = F_p[x]/(m(x)) are stored as length-e tuples of residues,
lowest degree first.  The modulus m is the lexicographically least monic
irreducible polynomial of degree e (coefficient vectors compared low degree
first), so ``build_field(p, e)`` is a pure function of ``(p, e)``.

Arithmetic interface
--------------------
Anything that needs field arithmetic goes through :class:`FFElem` operators
(``+ - * / ** -x``) or :func:`arith`.  Bulk point counting uses
:class:`FieldTables`, which encodes elements as integers (their rank in the
enumeration order) and supplies vectorised ``add``/``mul``/``power`` on numpy
arrays.  A faster representation (Zech logs, Montgomery form) can replace
either layer without touching callers as long as these signatures hold.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np
import sympy

from .errors import BudgetExceeded, DivisionByZero, FieldMismatch, NotPrime

DEFAULT_BUDGET = 10**8


def enumeration_budget() -> int:
    """Maximum number of candidate points any single enumeration may visit.

    ``ZETAREG_BUDGET`` in the environment overrides the default of 10^8.
    """
    value = os.environ.get("ZETAREG_BUDGET")
    if value:
        return int(value)
    return DEFAULT_BUDGET


# ---------------------------------------------------------------------------
# Polynomials over F_p as coefficient tuples, lowest degree first, no trailing
# zeros (the zero polynomial is the empty tuple).

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def _pmod(a, m, p):
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] * inv_lead % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return _trim(a[:dm])


def _pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _psub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim((x - y) % p for x, y in zip(a, b))


def _pgcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base, exponent, m, p):
    result = (1,)
    base = _pmod(base, m, p)
    while exponent:
        if exponent & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        exponent >>= 1
    return result


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over F_p."""
    f = _trim(c % p for c in poly)
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = (0, 1)
    for r in sympy.primefactors(n):
        h = _psub(_ppowmod(x, p ** (n // r), f, p), x, p)
        if len(_pgcd(f, h, p)) != 1:
            return False
    return _psub(_ppowmod(x, p**n, f, p), x, p) == ()


@lru_cache(maxsize=None)
def _least_irreducible(p: int, e: int) -> tuple[int, ...]:
    # itertools.product varies the last slot fastest; reversing each tuple
    # gives low-degree-first lexicographic order.
    for tail in product(range(p), repeat=e):
        candidate = tail[::-1] + (1,)
        if is_irreducible(candidate, p):
            return candidate
    raise AssertionError(f"no irreducible polynomial of degree {e} over F_{p}")


@dataclass(frozen=True)
class FieldDesc:
    p: int
    e: int
    modulus: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.p**self.e

    @property
    def q(self) -> int:
        return self.size

    def __call__(self, value) -> "FFElem":
        """Coerce an int (prime-field residue) or coefficient vector."""
        return FFElem.of(self, value)

    def zero(self) -> "FFElem":
        return FFElem(self, (0,) * self.e)

    def one(self) -> "FFElem":
        return FFElem(self, (1,) + (0,) * (self.e - 1))

    def gen(self) -> "FFElem":
        """The class of x (equal to -m(0) when e = 1)."""
        if self.e == 1:
            return FFElem(self, ((-self.modulus[0]) % self.p,))
        return FFElem(self, (0, 1) + (0,) * (self.e - 2))

    def element(self, index: int) -> "FFElem":
        """Inverse of :meth:`FFElem.index`."""
        coeffs = []
        for _ in range(self.e):
            index, c = divmod(index, self.p)
            coeffs.append(c)
        return FFElem(self, tuple(reversed(coeffs)))

    def to_json(self) -> dict:
        return {"p": self.p, "e": self.e}

    def __repr__(self):
        return f"GF({self.p}^{self.e})"


def build_field(p: int, e: int = 1) -> FieldDesc:
    if not isinstance(p, int) or not sympy.isprime(p):
        raise NotPrime(f"{p} is not prime")
    if e < 1:
        raise ValueError("extension degree must be positive")
    return _build_field(p, e)


@lru_cache(maxsize=None)
def _build_field(p: int, e: int) -> FieldDesc:
    return FieldDesc(p, e, _least_irreducible(p, e))


@dataclass(frozen=True)
class FFElem:
    field: FieldDesc
    coeffs: tuple[int, ...]

    @classmethod
    def of(cls, field: FieldDesc, value) -> "FFElem":
        if isinstance(value, FFElem):
            if value.field != field:
                raise FieldMismatch(f"{value.field} vs {field}")
            return value
        if isinstance(value, (int, np.integer)):
            value = [int(value)]
        coeffs = [int(c) for c in value]
        if len(coeffs) > field.e:
            coeffs = list(_pmod(coeffs, field.modulus, field.p))
        coeffs = [c % field.p for c in coeffs] + [0] * (field.e - len(coeffs))
        return cls(field, tuple(coeffs))

    def index(self) -> int:
        """Rank of this element in :func:`enumerate_field` order."""
        idx = 0
        for c in self.coeffs:
            idx = idx * self.field.p + c
        return idx

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _other(self, other) -> "FFElem":
        if isinstance(other, FFElem):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other
        return FFElem.of(self.field, other)

    def __add__(self, other):
        other = self._other(other)
        p = self.field.p
        return FFElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FFElem(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        other = self._other(other)
        f = self.field
        prod = _pmod(_pmul(_trim(self.coeffs), _trim(other.coeffs), f.p), f.modulus, f.p)
        return FFElem.of(f, prod)

    __rmul__ = __mul__

    def inverse(self) -> "FFElem":
        if self.is_zero():
            raise DivisionByZero(f"inverse of zero in {self.field}")
        return self ** (self.field.size - 2)

    def __truediv__(self, other):
        return self * self._other(other).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self):
        if self.field.e == 1:
            return f"{self.coeffs[0]}"
        terms = [f"{c}*x^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


def arith(op: str, *args) -> FFElem:
    """Dispatch ``op`` in {add, mul, neg, inv, pow} over field elements.

    ``pow`` takes an element and an integer exponent.
    """
    if op == "add":
        a, b = args
        return a + b
    if op == "mul":
        a, b = args
        return a * b
    if op == "neg":
        (a,) = args
        return -a
    if op == "inv":
        (a,) = args
        return a.inverse()
    if op == "pow":
        a, n = args
        return a**n
    raise ValueError(f"unknown operation {op!r}")


def enumerate_field(field: FieldDesc, budget: int | None = None) -> Iterator[FFElem]:
    """All p^e elements in coefficient-vector lexicographic order."""
    budget = enumeration_budget() if budget is None else budget
    if field.size > budget:
        raise BudgetExceeded(f"{field} has {field.size} elements, budget {budget}")
    for coeffs in product(range(field.p), repeat=field.e):
        yield FFElem(field, coeffs)


def primitive_element(field: FieldDesc) -> FFElem:
    """First generator of the multiplicative group in enumeration order."""
    n = field.size - 1
    exps = [n // r for r in sympy.primefactors(n)] if n > 1 else []
    for idx in range(1, field.size):
        g = field.element(idx)
        if all((g**k).coeffs != field.one().coeffs for k in exps):
            return g
    raise AssertionError("multiplicative group is not cyclic?")


class FieldTables:
    """Vectorised arithmetic on integer-encoded elements of one field.

    Element ``i`` is ``field.element(i)``; 0 is the zero element.
    """

    def __init__(self, field: FieldDesc):
        self.field = field
        self.p = field.p
        self.size = q = field.size
        g = primitive_element(field)
        exp = np.zeros(q - 1, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        x = field.one()
        for k in range(q - 1):
            idx = x.index()
            exp[k] = idx
            log[idx] = k
            x = x * g
        self.exp = exp
        self.log = log
        self.weights = np.array([self.p ** (field.e - 1 - i) for i in range(field.e)], dtype=np.int64)
        idx = np.arange(q, dtype=np.int64)
        self.digits = (idx[:, None] // self.weights[None, :]) % self.p

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self.field.e == 1:
            return (a + b) % self.p
        return ((self.digits[a] + self.digits[b]) % self.p) @ self.weights

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        nz = (a != 0) & (b != 0)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        la = np.broadcast_to(self.log[a], out.shape)
        lb = np.broadcast_to(self.log[b], out.shape)
        out[nz] = self.exp[(la[nz] + lb[nz]) % (self.size - 1)]
        return out

    def power(self, a: np.ndarray, k: int) -> np.ndarray:
        if k == 0:
            return np.full_like(a, self.field.one().index())
        out = np.zeros_like(a)
        nz = a != 0
        out[nz] = self.exp[(self.log[a[nz]] * k) % (self.size - 1)]
        return out


@lru_cache(maxsize=64)
def field_tables(field: FieldDesc) -> FieldTables:
    return FieldTables(field)


@lru_cache(maxsize=None)
def _embedding_root(small: FieldDesc, big: FieldDesc) -> FFElem | None:
    if small.e == 1:
        return None
    for idx in range(big.size):
        a = big.element(idx)
        acc = big.zero()
        for c in reversed(small.modulus):
            acc = acc * a + c
        if acc.is_zero():
            return a
    raise AssertionError(f"{small} does not embed in {big}")


def embed(value: FFElem, big: FieldDesc) -> FFElem:
    """Image of ``value`` under a fixed embedding F_{p^e} -> F_{p^{en}}.

    The embedding sends x to the first root of the small modulus in the
    big field's enumeration order, so it is deterministic.
    """
    small = value.field
    if small == big:
        return value
    if small.p != big.p or big.e % small.e:
        raise FieldMismatch(f"{small} does not embed in {big}")
    if small.e == 1:
        return FFElem.of(big, value.coeffs[0])
    alpha = _embedding_root(small, big)
    acc = big.zero()
    for c in reversed(value.coeffs):
        acc = acc * alpha + c
    return acc
