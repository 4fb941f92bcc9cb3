"""Finitely generated abelian groups, Smith normal form and Euler characteristics.

Matrices are numpy arrays of dtype ``object`` holding Python ints, so all
arithmetic is exact.  A group is presented by generators with one cyclic
relation each (:class:`Presentation`); maps act on generators by column
vectors.  Subgroups and subquotients are handled as lattices in Z^n, i.e. as
integer matrices whose columns generate them.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Sequence

import numpy as np

from .errors import (
    HypothesisViolated,
    InvalidMap,
    NotAComplex,
    NotFQ,
    RowsNotExact,
)


def int_matrix(rows, shape=None) -> np.ndarray:
    """Exact integer matrix from nested lists (``shape`` needed when empty)."""
    a = np.array(rows, dtype=object)
    if shape is not None:
        a = a.reshape(shape)
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix; pass shape for empty ones")
    out = zeros(*a.shape)
    for idx, x in np.ndenumerate(a):
        out[idx] = int(x)
    return out


def identity(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def zeros(m: int, n: int) -> np.ndarray:
    return np.zeros((m, n), dtype=object)


def det(A: np.ndarray) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    M = [[int(x) for x in row] for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# --- Smith normal form --------------------------------------------------------

def _snf_core(A: np.ndarray):
    """Return (U, D, V, Uinv, Vinv) with U A V = D, as nested lists."""
    m, n = A.shape
    D = [[int(x) for x in row] for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_add(i, j, c):  # row_i += c * row_j
        D[i] = [x + c * y for x, y in zip(D[i], D[j])]
        U[i] = [x + c * y for x, y in zip(U[i], U[j])]
        for r in Ui:
            r[j] -= c * r[i]

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def row_neg(i):
        D[i] = [-x for x in D[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    def col_add(i, j, c):  # col_i += c * col_j
        for r in D:
            r[i] += c * r[j]
        for r in V:
            r[i] += c * r[j]
        Vi[j] = [x - c * y for x, y in zip(Vi[j], Vi[i])]

    def col_swap(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return U, D, V, Ui, Vi
            if best[0] != t:
                row_swap(t, best[0])
            if best[1] != t:
                col_swap(t, best[1])
            piv = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    row_add(i, t, -(D[i][t] // piv))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    col_add(j, t, -(D[t][j] // piv))
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % piv), None)
            if bad is None:
                break
            row_add(t, bad, 1)
        if D[t][t] < 0:
            row_neg(t)
    return U, D, V, Ui, Vi


def _as_matrix(rows, m, n):
    return np.array(rows, dtype=object).reshape(m, n) if m and n else zeros(m, n)


def snf_full(A: np.ndarray):
    """(U, D, V, U^-1, V^-1) with U A V = D; see :func:`snf`."""
    A = np.asarray(A, dtype=object)
    m, n = A.shape
    U, D, V, Ui, Vi = _snf_core(A)
    return (_as_matrix(U, m, m), _as_matrix(D, m, n), _as_matrix(V, n, n),
            _as_matrix(Ui, m, m), _as_matrix(Vi, n, n))


def is_smith_form(D: np.ndarray) -> bool:
    m, n = D.shape
    for i in range(m):
        for j in range(n):
            if i != j and D[i, j] != 0:
                return False
    diag = [D[i, i] for i in range(min(m, n))]
    if any(d < 0 for d in diag):
        return False
    for a, b in zip(diag, diag[1:]):
        if a == 0 and b != 0:
            return False
        if a != 0 and b % a:
            return False
    return True


def snf(A, verify: bool = True):
    """Smith normal form: unimodular U, V and diagonal D with U A V = D.

    The diagonal is non-negative with d_1 | d_2 | ... and zeros last.  With
    ``verify`` the product and both determinants are rechecked exactly.
    """
    A = np.asarray(A, dtype=object)
    U, D, V, _, _ = snf_full(A)
    if verify:
        if not np.array_equal(U.dot(A).dot(V) if A.size else zeros(*A.shape), D):
            raise AssertionError("SNF check U A V = D failed")
        if abs(det(U)) != 1 or abs(det(V)) != 1:
            raise AssertionError("SNF transform is not unimodular")
        if not is_smith_form(D):
            raise AssertionError("SNF diagonal violates the divisibility chain")
    return U, D, V


def diagonal(D: np.ndarray) -> list[int]:
    return [int(D[i, i]) for i in range(min(D.shape))]


def rank(A: np.ndarray) -> int:
    if A.size == 0:
        return 0
    _, D, _, _, _ = snf_full(A)
    return sum(1 for d in diagonal(D) if d)


def _mul(A, B):
    if A.shape[1] == 0 or A.shape[0] == 0 or B.shape[1] == 0:
        return zeros(A.shape[0], B.shape[1])
    return A.dot(B)


def hstack(*mats) -> np.ndarray:
    rows = {m.shape[0] for m in mats}
    if len(rows) != 1:
        raise ValueError("row mismatch in hstack")
    return np.concatenate(mats, axis=1) if mats else zeros(0, 0)


# --- lattices in Z^n --------------------------------------------------------

def lattice_basis(G: np.ndarray) -> np.ndarray:
    """Independent columns spanning the same lattice as the columns of G."""
    n = G.shape[0]
    if G.shape[1] == 0 or n == 0:
        return zeros(n, 0)
    _, D, _, Ui, _ = snf_full(G)
    d = [x for x in diagonal(D) if x]
    return hstack(*[Ui[:, [i]] * d[i] for i in range(len(d))]) if d else zeros(n, 0)


def kernel_basis(M: np.ndarray) -> np.ndarray:
    """Basis of {x in Z^n : M x = 0}."""
    m, n = M.shape
    if m == 0 or n == 0:
        return identity(n)
    _, D, V, _, _ = snf_full(M)
    r = sum(1 for x in diagonal(D) if x)
    return V[:, r:]


def preimage(M: np.ndarray, L: np.ndarray) -> np.ndarray:
    """Basis of {x in Z^n : M x in span_Z(L)}."""
    n = M.shape[1]
    K = kernel_basis(hstack(M, L))
    return lattice_basis(K[:n, :])


def in_lattice(v: np.ndarray, L: np.ndarray) -> bool:
    """Whether every column of v lies in span_Z(L)."""
    n = v.shape[0]
    if v.shape[1] == 0:
        return True
    if L.shape[1] == 0 or n == 0:
        return all(x == 0 for x in v.flat)
    U, D, _, _, _ = snf_full(L)
    w = U.dot(v)
    d = diagonal(D)
    for i in range(n):
        di = d[i] if i < len(d) else 0
        for x in w[i]:
            if (di == 0 and x != 0) or (di != 0 and x % di):
                return False
    return True


def lattice_equal(A: np.ndarray, B: np.ndarray) -> bool:
    return in_lattice(A, B) and in_lattice(B, A)


def subquotient(K: np.ndarray, N: np.ndarray) -> "FGAbGroup":
    """span(K) / span(N) for lattices N <= K in Z^n.

    K must have independent columns (as returned by :func:`lattice_basis`).
    """
    r = K.shape[1]
    if r == 0:
        return FGAbGroup()
    # solve K X = N: with U K V = D (D has r nonzero entries), X = V D^-1 (U N)[:r]
    U, D, V, _, _ = snf_full(K)
    d = diagonal(D)
    if any(x == 0 for x in d):
        raise ValueError("subquotient numerator must have independent columns")
    W = _mul(U, N)
    rows = []
    for i in range(r):
        row = []
        for x in W[i]:
            if x % d[i]:
                raise ValueError("denominator lattice is not contained in numerator")
            row.append(x // d[i])
        rows.append(row)
    if N.shape[1] == 0:
        return FGAbGroup(free_rank=r)
    for i in range(r, W.shape[0]):
        if any(x != 0 for x in W[i]):
            raise ValueError("denominator lattice is not contained in numerator")
    X = _mul(V, _as_matrix(rows, r, N.shape[1]))
    return FGAbGroup.from_relations(X)


# --- groups -------------------------------------------------------------------

@dataclass(frozen=True)
class Presentation:
    """Direct sum of cyclic groups Z/orders[i] (order 0 means Z)."""

    orders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(o) for o in self.orders))
        if any(o < 0 for o in self.orders):
            raise ValueError("cyclic orders must be non-negative")

    @property
    def ngens(self) -> int:
        return len(self.orders)

    def relations(self) -> np.ndarray:
        n = self.ngens
        R = zeros(n, n)
        for i, o in enumerate(self.orders):
            R[i, i] = o
        return R

    def canonical(self) -> "FGAbGroup":
        return FGAbGroup.from_relations(self.relations())

    @property
    def presentation(self) -> "Presentation":
        return self


def direct_sum(*groups) -> Presentation:
    return Presentation(tuple(o for g in groups for o in _pres(g).orders))


def _pres(g) -> Presentation:
    if isinstance(g, Presentation):
        return g
    if isinstance(g, FGAbGroup):
        return g.presentation
    raise TypeError(f"not a group: {g!r}")


@dataclass(frozen=True)
class FGAbGroup:
    """Z^free_rank + Z/d_1 + ... + Z/d_k with 2 <= d_1 | d_2 | ... | d_k."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors {self.torsion} break the divisibility chain")

    @classmethod
    def from_relations(cls, R: np.ndarray) -> "FGAbGroup":
        """Z^n / span(columns of R)."""
        n = R.shape[0]
        if R.shape[1] == 0 or n == 0:
            return cls(free_rank=n)
        _, D, _, _, _ = snf_full(R)
        d = diagonal(D)
        nonzero = [x for x in d if x]
        return cls(free_rank=n - len(nonzero), torsion=tuple(x for x in nonzero if x > 1))

    @classmethod
    def from_orders(cls, orders: Sequence[int]) -> "FGAbGroup":
        return Presentation(tuple(orders)).canonical()

    @classmethod
    def cyclic(cls, n: int) -> "FGAbGroup":
        return cls.from_orders([n])

    @property
    def presentation(self) -> Presentation:
        return Presentation((0,) * self.free_rank + self.torsion)

    @property
    def orders(self):
        return self.presentation.orders

    @property
    def torsion_order(self) -> int:
        return prod(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def to_json(self) -> dict:
        return {"free": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data) -> "FGAbGroup":
        return cls.from_orders([0] * int(data.get("free", 0)) + [int(d) for d in data.get("torsion", [])])

    def __str__(self):
        parts = (["Z" if self.free_rank == 1 else f"Z^{self.free_rank}"] if self.free_rank else [])
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) or "0"


def localize(G: FGAbGroup, p: int) -> FGAbGroup:
    """G tensor Z[1/p]: p-parts of the invariant factors removed."""
    orders = []
    for d in G.torsion:
        while d % p == 0:
            d //= p
        orders.append(d)
    return FGAbGroup.from_orders([0] * G.free_rank + orders)


def _zero_in(target: Presentation, M: np.ndarray) -> bool:
    return in_lattice(M, target.relations())


@dataclass(frozen=True, eq=False)
class FGMap:
    """Homomorphism given by its matrix on the presentation generators."""

    source: Presentation
    target: Presentation
    matrix: np.ndarray

    def __init__(self, source, target, matrix, check: bool = True):
        source, target = _pres(source), _pres(target)
        M = np.asarray(matrix, dtype=object)
        if M.size == 0:
            M = zeros(target.ngens, source.ngens)
        M = M.reshape(target.ngens, source.ngens)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", M)
        if check and not _zero_in(target, _mul(M, source.relations())):
            raise InvalidMap("matrix does not send relations to relations")

    def __matmul__(self, other: "FGMap") -> "FGMap":
        """Composition self o other."""
        if other.target != self.source:
            raise InvalidMap("composition of incompatible maps")
        return FGMap(other.source, self.target, _mul(self.matrix, other.matrix), check=False)

    def is_zero(self) -> bool:
        return _zero_in(self.target, self.matrix)

    def equals(self, other: "FGMap") -> bool:
        return (self.source == other.source and self.target == other.target
                and _zero_in(self.target, self.matrix - other.matrix))


def zero_map(source, target) -> FGMap:
    source, target = _pres(source), _pres(target)
    return FGMap(source, target, zeros(target.ngens, source.ngens))


def identity_map(group) -> FGMap:
    g = _pres(group)
    return FGMap(g, g, identity(g.ngens))


def scalar_map(group, n: int) -> FGMap:
    g = _pres(group)
    return FGMap(g, g, identity(g.ngens) * n)


def kernel_lattice(f: FGMap) -> np.ndarray:
    return preimage(f.matrix, f.target.relations())


def ker_coker(f: FGMap) -> tuple[FGAbGroup, FGAbGroup]:
    ker = subquotient(kernel_lattice(f), f.source.relations())
    m = f.target.ngens
    coker = FGAbGroup.from_relations(hstack(f.matrix, f.target.relations())) if m else FGAbGroup()
    return ker, coker


def chi_from_groups(ker: FGAbGroup, coker: FGAbGroup) -> Fraction:
    if ker.free_rank or coker.free_rank:
        raise NotFQ(f"kernel {ker} / cokernel {coker} has positive free rank")
    return Fraction(coker.torsion_order, ker.torsion_order)


def chi(f) -> Fraction:
    """#Coker(f)_tor / #Ker(f)_tor; NotFQ if either has positive free rank."""
    if isinstance(f, FQMap):
        return f.chi()
    return chi_from_groups(*ker_coker(f))


# --- FQ objects -------------------------------------------------------------

UNKNOWN = "unknown"


@dataclass(frozen=True)
class FQGroup:
    """(finitely generated part) + (uniquely divisible part of given rank).

    A genuine FQ object has ``fg.free_rank == 0``.  Entries such as CH_0(X)
    carry a free part too; :attr:`is_fq` says which case applies.
    ``divisible_rank`` may be the string ``"unknown"``.
    """

    fg: FGAbGroup
    divisible_rank: int | str = 0

    @property
    def finite(self) -> FGAbGroup:
        return self.fg

    @property
    def is_fq(self) -> bool:
        return self.fg.free_rank == 0

    @property
    def torsion_order(self) -> int:
        return self.fg.torsion_order

    def to_json(self) -> dict:
        data = self.fg.to_json()
        data["divisible"] = self.divisible_rank
        return data

    @classmethod
    def from_json(cls, data) -> "FQGroup":
        div = data.get("divisible", 0)
        return cls(FGAbGroup.from_json(data), div if div == UNKNOWN else int(div))

    def __str__(self):
        s = str(self.fg)
        if self.divisible_rank not in (0, UNKNOWN):
            s += f" + Q^{self.divisible_rank}"
        elif self.divisible_rank == UNKNOWN:
            s += " + (divisible, rank unknown)"
        return s


@dataclass(frozen=True)
class FQMap:
    """Map of FQ objects: an FGMap on the f.g. parts plus declared behaviour
    ("zero", "iso" or "unspecified") on the uniquely divisible parts."""

    finite: FGMap
    source_divisible: int | str = 0
    target_divisible: int | str = 0
    divisible: str = "unspecified"

    def chi(self) -> Fraction:
        a, b = self.source_divisible, self.target_divisible
        if self.divisible == "iso" and a != b and UNKNOWN not in (a, b):
            raise InvalidMap("declared isomorphism between divisible parts of different rank")
        if self.divisible == "unspecified" and (UNKNOWN in (a, b) or a != b):
            raise NotFQ("divisible-part behaviour unspecified for unequal or unknown ranks")
        # torsion of ker/coker only sees the finite part
        return chi(self.finite)


# --- exact sequences and complexes -------------------------------------------

def is_exact_at(f: FGMap, g: FGMap) -> bool:
    """Whether A -f-> B -g-> C is exact at B."""
    if f.target != g.source:
        raise InvalidMap("maps are not composable")
    if not (g @ f).is_zero():
        return False
    ker_g = kernel_lattice(g)
    im_f = hstack(f.matrix, f.target.relations())
    return lattice_equal(ker_g, im_f)


@dataclass
class ChiReport:
    holds: bool
    lhs: Fraction
    rhs: Fraction
    details: dict

    def __bool__(self):
        return self.holds


def chi_compose_check(f: FGMap, g: FGMap) -> ChiReport:
    """chi(g o f) against chi(g) * chi(f)."""
    gf = g @ f
    lhs = chi(gf)
    cf, cg = chi(f), chi(g)
    return ChiReport(lhs == cf * cg, lhs, cf * cg, {"chi_f": cf, "chi_g": cg})


@dataclass
class SnakeDiagram:
    """Rows 0 -> A -i-> B -pi-> C -> 0 and 0 -> A' -> B' -> C' -> 0 with
    vertical maps f: A -> A', g: B -> B', h: C -> C'."""

    i: FGMap
    pi: FGMap
    i2: FGMap
    pi2: FGMap
    f: FGMap
    g: FGMap
    h: FGMap


def _short_exact(i: FGMap, pi: FGMap) -> bool:
    zero_src = zero_map(Presentation(()), i.source)
    zero_tgt = zero_map(pi.target, Presentation(()))
    return is_exact_at(zero_src, i) and is_exact_at(i, pi) and is_exact_at(pi, zero_tgt)


def chi_snake_check(diagram: SnakeDiagram) -> ChiReport:
    """chi(f) chi(g)^-1 chi(h) = 1 for a map of short exact sequences."""
    dg = diagram
    if not (_short_exact(dg.i, dg.pi) and _short_exact(dg.i2, dg.pi2)):
        raise RowsNotExact("rows of the diagram are not short exact")
    if not ((dg.g @ dg.i).equals(dg.i2 @ dg.f) and (dg.h @ dg.pi).equals(dg.pi2 @ dg.g)):
        raise InvalidMap("diagram does not commute")
    cf, ch = chi(dg.f), chi(dg.h)
    cg = chi(dg.g)
    return ChiReport(cf / cg * ch == 1, cg, cf * ch, {"chi_f": cf, "chi_g": cg, "chi_h": ch})


@dataclass
class FGComplex:
    """Bounded homological complex C_lo <- ... <- C_hi.

    ``groups[k]`` sits in degree ``lo + k``; ``diffs[k]`` is d: C_{lo+k+1} -> C_{lo+k}.
    """

    groups: list
    diffs: list
    lo: int = 0

    def __post_init__(self):
        self.groups = [_pres(g) for g in self.groups]
        if len(self.diffs) != max(len(self.groups) - 1, 0):
            raise NotAComplex("need one differential between consecutive groups")
        for k, d in enumerate(self.diffs):
            if d.source != self.groups[k + 1] or d.target != self.groups[k]:
                raise NotAComplex(f"differential {k} has the wrong source or target")
        for k in range(len(self.diffs) - 1):
            if not (self.diffs[k] @ self.diffs[k + 1]).is_zero():
                raise NotAComplex(f"d o d != 0 at degree {self.lo + k + 2}")

    @property
    def hi(self) -> int:
        return self.lo + len(self.groups) - 1

    @property
    def length(self) -> int:
        """Number of possibly nonzero terms."""
        nonzero = [k for k, g in enumerate(self.groups) if g.ngens]
        return (nonzero[-1] - nonzero[0] + 1) if nonzero else 0

    def group(self, i: int) -> Presentation:
        k = i - self.lo
        return self.groups[k] if 0 <= k < len(self.groups) else Presentation(())

    def diff(self, i: int) -> FGMap:
        """d_i: C_i -> C_{i-1}."""
        k = i - 1 - self.lo
        if 0 <= k < len(self.diffs):
            return self.diffs[k]
        return zero_map(self.group(i), self.group(i - 1))

    def cycles(self, i: int) -> np.ndarray:
        return kernel_lattice(self.diff(i))

    def boundaries(self, i: int) -> np.ndarray:
        """Image of d_{i+1} plus the relations of C_i."""
        return hstack(self.diff(i + 1).matrix, self.group(i).relations())

    def homology_at(self, i: int) -> FGAbGroup:
        return subquotient(self.cycles(i), self.boundaries(i))


def homology(C: FGComplex) -> dict[int, FGAbGroup]:
    """H_i = Ker d_i / Im d_{i+1} for every degree of the complex."""
    return {i: C.homology_at(i) for i in range(C.lo, C.hi + 1)}


def free_complex_homology(mats: Sequence[np.ndarray], sizes: Sequence[int],
                          invert: int | None = None) -> list[FGAbGroup]:
    """Homology of 0 <- Z^{n_0} <- Z^{n_1} <- ... from the Smith forms alone.

    ``mats[k]`` is d_{k+1}: Z^{n_{k+1}} -> Z^{n_k}.  With ``invert = p`` the
    ring is Z[1/p] and p-power invariant factors become units.
    """
    ranks, factors = [], []
    for M in mats:
        d = [x for x in diagonal(snf(M)[1])] if M.size else []
        nz = [x for x in d if x]
        ranks.append(len(nz))
        factors.append(nz)
    out = []
    for k, n in enumerate(sizes):
        r_out = ranks[k - 1] if k >= 1 else 0
        r_in = ranks[k] if k < len(mats) else 0
        tors = factors[k] if k < len(mats) else []
        if invert:
            stripped = []
            for x in tors:
                while x % invert == 0:
                    x //= invert
                stripped.append(x)
            tors = stripped
        out.append(FGAbGroup.from_orders([0] * (n - r_out - r_in) + list(tors)))
    return out


@dataclass
class ChainMap:
    source: FGComplex
    target: FGComplex
    maps: dict  # degree -> FGMap

    def __post_init__(self):
        for i in range(min(self.source.lo, self.target.lo), max(self.source.hi, self.target.hi) + 1):
            f_i, f_im1 = self.at(i), self.at(i - 1)
            lhs = self.target.diff(i) @ f_i
            rhs = f_im1 @ self.source.diff(i)
            if not lhs.equals(rhs):
                raise InvalidMap(f"chain map does not commute at degree {i}")

    def at(self, i: int) -> FGMap:
        if i in self.maps:
            return self.maps[i]
        return zero_map(self.source.group(i), self.target.group(i))

    def degrees(self):
        return range(min(self.source.lo, self.target.lo), max(self.source.hi, self.target.hi) + 1)


def induced_ker_coker(f: ChainMap, i: int) -> tuple[FGAbGroup, FGAbGroup]:
    """Kernel and cokernel of H_i(f): H_i(C) -> H_i(C')."""
    C, D = f.source, f.target
    Z, B = C.cycles(i), C.boundaries(i)
    Z2, B2 = D.cycles(i), D.boundaries(i)
    M = f.at(i).matrix
    # z in Z with f(z) in B2
    coeffs = preimage(_mul(M, Z), B2)
    ker = subquotient(lattice_basis(_mul(Z, coeffs)), B)
    coker = subquotient(Z2, hstack(_mul(M, Z), B2))
    return ker, coker


def chi_complex_check(f: ChainMap) -> ChiReport:
    """prod_i chi(H_i(f))^{(-1)^i} against prod_i chi(f_i)^{(-1)^i}."""
    lhs = rhs = Fraction(1)
    for i in f.degrees():
        k, c = ker_coker(f.at(i))
        if not (k.is_finite and c.is_finite):
            raise HypothesisViolated(f"level map in degree {i} has infinite kernel or cokernel")
        rhs *= chi_from_groups(k, c) ** (-1) ** i
    for i in f.degrees():
        lhs *= chi_from_groups(*induced_ker_coker(f, i)) ** (-1) ** i
    return ChiReport(lhs == rhs, lhs, rhs, {})
