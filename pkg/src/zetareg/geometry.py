"""Variety descriptions and exact point counts #X(F_{q^n}) by enumeration."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np
import sympy

from .errors import (
    BudgetExceeded,
    FieldMismatch,
    InexactQuotient,
    InvalidSpec,
    NegativeCensus,
    NonHomogeneous,
)
from .ffield import FFElem, FieldDesc, build_field, embed, enumeration_budget, field_tables

DEFAULT_CHUNK = 2**16


@dataclass(frozen=True)
class MultiPoly:
    """Sparse polynomial over a finite field.

    ``terms`` maps exponent vectors to nonzero coefficients; construct with
    :meth:`build` so duplicate exponents are merged and zeros dropped.
    """

    field: FieldDesc
    nvars: int
    terms: tuple[tuple[tuple[int, ...], FFElem], ...]

    @classmethod
    def build(cls, field: FieldDesc, nvars: int, terms: Iterable) -> "MultiPoly":
        acc: dict[tuple[int, ...], FFElem] = {}
        for exps, coeff in terms:
            exps = tuple(int(k) for k in exps)
            if len(exps) != nvars or min(exps, default=0) < 0:
                raise InvalidSpec(f"bad exponent vector {exps} for {nvars} variables")
            c = FFElem.of(field, coeff)
            acc[exps] = acc[exps] + c if exps in acc else c
        kept = tuple(sorted((e, c) for e, c in acc.items() if not c.is_zero()))
        return cls(field, nvars, kept)

    @property
    def is_homogeneous(self) -> bool:
        return len({sum(e) for e, _ in self.terms}) <= 1

    def evaluate(self, point: Sequence[FFElem]) -> FFElem:
        """Scalar evaluation; the slow reference path."""
        total = self.field.zero()
        for exps, c in self.terms:
            term = c
            for x, k in zip(point, exps):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def over(self, big: FieldDesc) -> tuple[tuple[tuple[int, ...], int], ...]:
        """Terms with coefficients embedded in ``big`` and integer-encoded."""
        return tuple((e, embed(c, big).index()) for e, c in self.terms)


# --- variety AST -----------------------------------------------------------

class VarietySpec:
    """Base class of the variety AST; subclasses are immutable dataclasses."""

    @property
    def field(self) -> FieldDesc:
        raise NotImplementedError

    @property
    def dim(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class AffineSpace(VarietySpec):
    n: int
    base: FieldDesc

    @property
    def field(self):
        return self.base

    @property
    def dim(self):
        return self.n


@dataclass(frozen=True)
class ProjectiveSpace(VarietySpec):
    n: int
    base: FieldDesc

    @property
    def field(self):
        return self.base

    @property
    def dim(self):
        return self.n


def _declared_dim(ambient: int, polys, declared):
    if declared is not None:
        return declared
    return max(ambient - len(polys), -1)


@dataclass(frozen=True)
class AffineSub(VarietySpec):
    """V(polys) inside A^n.  Without ``declared_dim`` the polys are taken as
    a complete intersection."""

    n: int
    polys: tuple[MultiPoly, ...]
    base: FieldDesc
    declared_dim: int | None = None

    def __post_init__(self):
        for f in self.polys:
            if f.nvars != self.n or f.field != self.base:
                raise InvalidSpec("polynomial does not live on this affine space")

    @property
    def field(self):
        return self.base

    @property
    def dim(self):
        return _declared_dim(self.n, self.polys, self.declared_dim)


@dataclass(frozen=True)
class ProjectiveSub(VarietySpec):
    """V(polys) inside P^n, polys homogeneous in n + 1 variables."""

    n: int
    polys: tuple[MultiPoly, ...]
    base: FieldDesc
    declared_dim: int | None = None

    def __post_init__(self):
        for f in self.polys:
            if f.nvars != self.n + 1 or f.field != self.base:
                raise InvalidSpec("polynomial does not live on this projective space")
            if not f.is_homogeneous:
                raise NonHomogeneous(f"inhomogeneous polynomial in projective subvariety of P^{self.n}")

    @property
    def field(self):
        return self.base

    @property
    def dim(self):
        return _declared_dim(self.n, self.polys, self.declared_dim)


@dataclass(frozen=True)
class Product(VarietySpec):
    left: VarietySpec
    right: VarietySpec

    def __post_init__(self):
        if self.left.field != self.right.field:
            raise FieldMismatch("product factors over different base fields")

    @property
    def field(self):
        return self.left.field

    @property
    def dim(self):
        return self.left.dim + self.right.dim


@dataclass(frozen=True)
class DisjointUnion(VarietySpec):
    parts: tuple[VarietySpec, ...]
    base: FieldDesc

    def __post_init__(self):
        for part in self.parts:
            if part.field != self.base:
                raise FieldMismatch("union parts over different base fields")

    @property
    def field(self):
        return self.base

    @property
    def dim(self):
        return max((part.dim for part in self.parts), default=-1)


def _ambient_kind(spec):
    if isinstance(spec, (AffineSpace, AffineSub)):
        return "affine", spec.n
    if isinstance(spec, (ProjectiveSpace, ProjectiveSub)):
        return "projective", spec.n
    return None


@dataclass(frozen=True)
class Complement(VarietySpec):
    """ambient minus closed; closed must be cut out inside the same ambient."""

    ambient: VarietySpec
    closed: VarietySpec

    def __post_init__(self):
        kind = _ambient_kind(self.ambient)
        if kind is None or kind != _ambient_kind(self.closed):
            raise InvalidSpec("complement needs ambient and closed part on the same ambient space")
        if self.ambient.field != self.closed.field:
            raise FieldMismatch("complement over different base fields")
        outer = set(getattr(self.ambient, "polys", ()))
        inner = set(getattr(self.closed, "polys", ()))
        if not outer <= inner:
            raise InvalidSpec("closed part is not contained in the ambient subvariety")

    @property
    def field(self):
        return self.ambient.field

    @property
    def dim(self):
        return self.ambient.dim


@dataclass(frozen=True)
class BaseRestriction(VarietySpec):
    """A variety over F_{q^degree} regarded as a variety over F_q."""

    inner: VarietySpec
    degree: int

    def __post_init__(self):
        f = self.inner.field
        if self.degree < 1 or f.e % self.degree:
            raise InvalidSpec("restriction degree must divide the inner extension degree")

    @property
    def field(self):
        f = self.inner.field
        return build_field(f.p, f.e // self.degree)

    @property
    def dim(self):
        return self.inner.dim


def point(base: FieldDesc) -> VarietySpec:
    return AffineSpace(0, base)


# --- counting ----------------------------------------------------------------

def _count_chunk(args):
    big, q_nvars, terms_list, start, stop = args
    tables = field_tables(big)
    Q = tables.size
    idx = np.arange(start, stop, dtype=np.int64)
    coords = []
    for _ in range(q_nvars):
        idx, r = np.divmod(idx, Q)
        coords.append(r)
    alive = np.ones(stop - start, dtype=bool)
    for terms in terms_list:
        value = np.zeros(stop - start, dtype=np.int64)
        for exps, c in terms:
            mono = np.full(stop - start, c, dtype=np.int64)
            for x, k in zip(coords, exps):
                if k:
                    mono = tables.mul(mono, tables.power(x, k))
            value = tables.add(value, mono)
        alive &= value == 0
    return int(alive.sum())


def count_solutions(polys: Sequence[MultiPoly], nvars: int, big: FieldDesc,
                    jobs: int = 1, chunk: int = DEFAULT_CHUNK, budget: int | None = None) -> int:
    """Number of common zeros of ``polys`` in big^nvars, by enumeration.

    Candidates are split into contiguous chunks of the enumeration order and
    counted independently; the sum is deterministic.
    """
    budget = enumeration_budget() if budget is None else budget
    total = big.size**nvars
    if not polys:
        return total
    if total > budget:
        raise BudgetExceeded(f"{total} candidate points over {big} exceed budget {budget}")
    terms_list = tuple(f.over(big) for f in polys)
    tasks = [(big, nvars, terms_list, s, min(s + chunk, total)) for s in range(0, total, chunk)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return sum(pool.map(_count_chunk, tasks))
    return sum(_count_chunk(t) for t in tasks)


def count_points(spec: VarietySpec, n: int, jobs: int = 1, chunk: int = DEFAULT_CHUNK,
                 budget: int | None = None) -> int:
    """Exact #X(F_{q^n}) where F_q is the base field of ``spec``."""
    if n < 1:
        raise ValueError("n must be positive")
    base = spec.field
    big = build_field(base.p, base.e * n)
    Q = big.size
    kw = dict(jobs=jobs, chunk=chunk, budget=budget)
    if isinstance(spec, AffineSpace):
        return Q**spec.n
    if isinstance(spec, ProjectiveSpace):
        return (Q ** (spec.n + 1) - 1) // (Q - 1)
    if isinstance(spec, AffineSub):
        return count_solutions(spec.polys, spec.n, big, **kw)
    if isinstance(spec, ProjectiveSub):
        cone = count_solutions(spec.polys, spec.n + 1, big, **kw)
        num, rem = divmod(cone - 1, Q - 1)
        if rem:
            raise InexactQuotient(f"affine cone count {cone} - 1 not divisible by {Q - 1}")
        return num
    if isinstance(spec, Product):
        return count_points(spec.left, n, **kw) * count_points(spec.right, n, **kw)
    if isinstance(spec, DisjointUnion):
        return sum(count_points(part, n, **kw) for part in spec.parts)
    if isinstance(spec, Complement):
        return count_points(spec.ambient, n, **kw) - count_points(spec.closed, n, **kw)
    if isinstance(spec, BaseRestriction):
        k = spec.degree
        if n % k:
            return 0
        return k * count_points(spec.inner, n // k, **kw)
    raise InvalidSpec(f"unknown variety node {type(spec).__name__}")


def count_sequence(spec: VarietySpec, m: int, **kw) -> list[int]:
    """[N_1, ..., N_m]."""
    return [count_points(spec, n, **kw) for n in range(1, m + 1)]


def closed_point_census(spec_or_counts, D: int, **kw) -> dict[int, int]:
    """Number a_d of closed points of each degree d <= D (Moebius inversion)."""
    if isinstance(spec_or_counts, VarietySpec):
        counts = count_sequence(spec_or_counts, D, **kw)
    else:
        counts = list(spec_or_counts)[:D]
        if len(counts) < D:
            raise ValueError(f"need {D} counts, got {len(counts)}")
    census = {}
    for d in range(1, D + 1):
        s = sum(sympy.mobius(d // m) * counts[m - 1] for m in sympy.divisors(d))
        a, rem = divmod(int(s), d)
        if rem or a < 0:
            raise NegativeCensus(f"degree {d}: sum {s} gives non-natural point count")
        census[d] = a
    return census


@dataclass
class SNCCensus:
    """Point counts N_n(Y^(a)) per boundary level a, n = 1..D."""

    levels: dict[int, list[int]] = dc_field(default_factory=dict)

    def open_counts(self) -> list[int]:
        """sum_a (-1)^a N_n(Y^(a)), i.e. the counts of the open complement."""
        if not self.levels:
            return []
        D = len(next(iter(self.levels.values())))
        return [sum((-1) ** a * row[n] for a, row in self.levels.items()) for n in range(D)]


def snc_census(strata: Sequence[tuple[VarietySpec, int]], D: int, **kw) -> SNCCensus:
    """Tabulate counts of the strata Y^(a); strata at one level are summed."""
    census = SNCCensus()
    for spec, level in strata:
        row = count_sequence(spec, D, **kw)
        prev = census.levels.get(level, [0] * D)
        census.levels[level] = [a + b for a, b in zip(prev, row)]
    census.levels = dict(sorted(census.levels.items()))
    return census
