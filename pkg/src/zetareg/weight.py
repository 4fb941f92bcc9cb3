"""Weight homology of simple-normal-crossing configurations.

An :class:`SNCConfig` lists the connected components (strata) of each
Y^(a), a = 0..d, with Y^(0) the compactification itself, and for every
stratum at level a+1 the stratum at level a obtained by dropping the j-th
smallest divisor index.  The weight complex has Lambda^{strata at level a}
in degree a and differential sum_j (-1)^j (face_j)_*.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .abgroup import (
    FGAbGroup,
    FGComplex,
    FGMap,
    Presentation,
    _mul,
    free_complex_homology,
    hstack,
    identity,
    lattice_basis,
    lattice_equal,
    localize,
    preimage,
    subquotient,
    zeros,
)
from .errors import BoundednessViolated, IncoherentIncidence, NotAComplex, NotExact, SignIncoherent


@dataclass(frozen=True)
class Lam:
    """Coefficient ring: Z (``p is None``) or Z[1/p]."""

    p: int | None = None

    def __str__(self):
        return "Z" if self.p is None else f"Z[1/{self.p}]"

    @classmethod
    def parse(cls, text) -> "Lam":
        if text in (None, "Z"):
            return cls()
        if isinstance(text, int):
            return cls(text)
        text = str(text).strip()
        if text.startswith("Z[1/") and text.endswith("]"):
            return cls(int(text[4:-1]))
        raise ValueError(f"unknown coefficient ring {text!r}")

    def apply(self, G: FGAbGroup) -> FGAbGroup:
        return G if self.p is None else localize(G, self.p)


@dataclass
class SNCConfig:
    dim: int
    levels: list[list[Hashable]]
    faces: dict[tuple[Hashable, int], Hashable] = field(default_factory=dict)

    def __post_init__(self):
        self.levels = [list(level) for level in self.levels]
        while len(self.levels) > 1 and not self.levels[-1]:
            self.levels.pop()
        if len(self.levels) > self.dim + 1:
            raise BoundednessViolated(
                f"{len(self.levels)} nonempty levels for dimension {self.dim}; at most dim + 1 allowed")
        seen = {}
        for a, level in enumerate(self.levels):
            for s in level:
                if s in seen:
                    raise IncoherentIncidence(f"stratum id {s!r} appears twice")
                seen[s] = a
        self._level_of = seen
        for a in range(1, len(self.levels)):
            for s in self.levels[a]:
                for j in range(a):
                    t = self.faces.get((s, j))
                    if t is None:
                        raise IncoherentIncidence(f"stratum {s!r} has no face for drop position {j}")
                    if seen.get(t) != a - 1:
                        raise IncoherentIncidence(f"face {j} of {s!r} is {t!r}, not a level-{a - 1} stratum")
        for (s, j), t in self.faces.items():
            if s not in seen or not 0 <= j < seen[s]:
                raise IncoherentIncidence(f"face entry ({s!r}, {j}) does not match any stratum")
        # simplicial identity d_j d_k = d_{k-1} d_j for j < k
        for a in range(2, len(self.levels)):
            for s in self.levels[a]:
                for j in range(a):
                    for k in range(j + 1, a):
                        left = self.faces[(self.faces[(s, k)], j)]
                        right = self.faces[(self.faces[(s, j)], k - 1)]
                        if left != right:
                            raise IncoherentIncidence(
                                f"stratum {s!r}: dropping {k} then {j} gives {left!r}, "
                                f"dropping {j} then {k - 1} gives {right!r}")
        # a level-a stratum lies on exactly a distinct components
        comps = {s: frozenset([s]) for s in (self.levels[1] if len(self.levels) > 1 else [])}
        for a in range(2, len(self.levels)):
            for s in self.levels[a]:
                comps[s] = frozenset().union(*(comps[self.faces[(s, j)]] for j in range(a)))
                if len(comps[s]) != a:
                    raise IncoherentIncidence(
                        f"stratum {s!r} lies on {len(comps[s])} components, expected {a}")

    def level_of(self, s) -> int:
        return self._level_of[s]

    def differential(self, a: int) -> np.ndarray:
        """Matrix of Lambda^{level a} -> Lambda^{level a-1}, a >= 1."""
        src, tgt = self.levels[a], self.levels[a - 1]
        pos = {t: i for i, t in enumerate(tgt)}
        M = zeros(len(tgt), len(src))
        for c, s in enumerate(src):
            for j in range(a):
                M[pos[self.faces[(s, j)]], c] += (-1) ** j
        return M

    def boundary_sizes_and_diffs(self) -> tuple[list[int], list[np.ndarray]]:
        """Weight complex of the boundary Y: Y^(a+1) in degree a.

        Faces towards Y^(0) are forgotten; every other face keeps its sign,
        so the differentials are those of the full complex shifted by one.
        """
        sizes = [len(level) for level in self.levels[1:]]
        return sizes, [self.differential(a + 1) for a in range(1, len(sizes))]

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "levels": [list(level) for level in self.levels],
            "faces": [{"from": s, "drop": j, "to": t} for (s, j), t in sorted(
                self.faces.items(), key=lambda kv: (self._level_of[kv[0][0]], str(kv[0][0]), kv[0][1]))],
        }

    @classmethod
    def from_json(cls, data) -> "SNCConfig":
        faces = {}
        for entry in data.get("faces", []):
            key = (entry["from"], int(entry["drop"]))
            if key in faces:
                raise IncoherentIncidence(f"duplicate face entry {key}")
            faces[key] = entry["to"]
        return cls(int(data["dim"]), data["levels"], faces)


@dataclass
class WeightComplex:
    """Lambda^{pi_0(Y^(a))} in degree a, as a complex over Z plus the ring."""

    complex: FGComplex
    ring: Lam
    dim: int

    def matrices(self) -> list[np.ndarray]:
        return [d.matrix for d in self.complex.diffs]

    def sizes(self) -> list[int]:
        return [g.ngens for g in self.complex.groups]


def _free_complex(sizes: Sequence[int], mats: Sequence[np.ndarray], lo: int = 0) -> FGComplex:
    groups = [Presentation((0,) * n) for n in sizes]
    diffs = [FGMap(groups[k + 1], groups[k], mats[k], check=False) for k in range(len(mats))]
    return FGComplex(groups, diffs, lo=lo)


def build_snc_complex(cfg: SNCConfig, ring: Lam | None = None) -> WeightComplex:
    ring = ring or Lam()
    sizes = [len(level) for level in cfg.levels]
    mats = [cfg.differential(a) for a in range(1, len(sizes))]
    try:
        C = _free_complex(sizes, mats)
    except NotAComplex as exc:
        raise IncoherentIncidence(str(exc)) from exc
    if C.hi > cfg.dim:
        raise BoundednessViolated(f"weight complex reaches degree {C.hi} > dim {cfg.dim}")
    return WeightComplex(C, ring, cfg.dim)


def weight_homology(W: WeightComplex) -> list[FGAbGroup]:
    """H_0^W, ..., H_dim^W over the complex's coefficient ring."""
    hs = free_complex_homology(W.matrices(), W.sizes(), invert=W.ring.p)
    return hs + [FGAbGroup()] * (W.dim + 1 - len(hs))


def weight_homology_from_levels(W: WeightComplex) -> list[FGAbGroup]:
    """Same groups via kernels and images of lattices (independent of the
    Smith-diagonal shortcut), localised afterwards."""
    C = W.complex
    hs = [W.ring.apply(C.homology_at(i)) for i in range(C.lo, C.hi + 1)]
    return hs + [FGAbGroup()] * (W.dim + 1 - len(hs))


# --- localization sequence -----------------------------------------------------

@dataclass
class _Sub:
    """Subquotient Z/B of Z^n with Z given by a basis."""

    Z: np.ndarray
    B: np.ndarray

    def group(self) -> FGAbGroup:
        return subquotient(self.Z, self.B)


def _cycles_mod_boundaries(C: FGComplex, i: int) -> _Sub:
    return _Sub(C.cycles(i), C.boundaries(i))


def _exact_at(A: _Sub, alpha: np.ndarray, B: _Sub, beta: np.ndarray, C: _Sub) -> bool:
    """Exactness of H(A) -alpha-> H(B) -beta-> H(C) at H(B) (chain-level maps)."""
    if B.Z.shape[1] == 0:
        return True
    coeffs = preimage(_mul(beta, B.Z), C.B)
    ker = hstack(_mul(B.Z, coeffs), B.B)
    im = hstack(_mul(alpha, A.Z), B.B)
    return lattice_equal(ker, im)


@dataclass
class LocalizationReport:
    exact: bool
    groups: dict  # name -> {degree: FGAbGroup}
    failures: list

    def to_json(self):
        return {
            "exact": self.exact,
            "groups": {k: {str(i): g.to_json() for i, g in v.items()} for k, v in self.groups.items()},
            "failures": self.failures,
        }


def localization_check(cfg: SNCConfig, ring: Lam | None = None) -> LocalizationReport:
    """Check exactness of ... -> H_i(Y) -> H_i(X) -> H_i(U) -> H_{i-1}(Y) -> ...

    X is the compactification with the constant complex Lambda^{pi_0}[0], Y
    the boundary with its own weight complex, and U's complex the mapping
    cone of the chain map Y -> X (which is the inclusion-induced sum on the
    lowest term).  Exactness is tested over Z, which implies it over Z[1/p].
    """
    ring = ring or Lam()
    n0 = len(cfg.levels[0])
    X = _free_complex([n0], [])
    ysizes, ydiffs = cfg.boundary_sizes_and_diffs()
    Y = _free_complex(ysizes, ydiffs)
    phi0 = cfg.differential(1) if len(cfg.levels) > 1 else zeros(n0, 0)

    # cone_n = Y_{n-1} + X_n, d(y, x) = (-d_Y y, phi(y) + d_X x)
    top = max(Y.hi + 1, X.hi)
    sizes = []
    for n in range(0, top + 1):
        sizes.append((Y.group(n - 1).ngens, X.group(n).ngens))
    mats = []
    for n in range(1, top + 1):
        ys, xs = sizes[n]
        yt, xt = sizes[n - 1]
        M = zeros(yt + xt, ys + xs)
        if ys and yt:
            M[:yt, :ys] = -Y.diff(n - 1).matrix
        if n - 1 == 0 and ys:
            M[yt:, :ys] = phi0
        mats.append(M)
    cone = _free_complex([a + b for a, b in sizes], mats)

    def phi_at(i):
        return phi0 if i == 0 else zeros(X.group(i).ngens, Y.group(i).ngens)

    def incl_at(i):
        ys, xs = sizes[i] if i < len(sizes) else (0, 0)
        M = zeros(ys + xs, X.group(i).ngens)
        if xs:
            M[ys:, :] = identity(xs)
        return M

    def proj_at(i):
        ys, xs = sizes[i] if i < len(sizes) else (0, 0)
        M = zeros(ys, ys + xs)
        if ys:
            M[:, :ys] = identity(ys)
        return M

    groups = {"Y": {}, "X": {}, "U": {}}
    failures = []
    for i in range(top + 1, -1, -1):
        HY, HX, HU, HY1 = (_cycles_mod_boundaries(Y, i), _cycles_mod_boundaries(X, i),
                           _cycles_mod_boundaries(cone, i), _cycles_mod_boundaries(Y, i - 1))
        HU1 = _cycles_mod_boundaries(cone, i + 1)
        if i <= top:
            groups["Y"][i] = ring.apply(HY.group())
            groups["X"][i] = ring.apply(HX.group())
            groups["U"][i] = ring.apply(HU.group())
        checks = [
            ("H(Y)", i, _exact_at(HU1, proj_at(i + 1), HY, phi_at(i), HX)),
            ("H(X)", i, _exact_at(HY, phi_at(i), HX, incl_at(i), HU)),
            ("H(U)", i, _exact_at(HX, incl_at(i), HU, proj_at(i), HY1)),
        ]
        for where, deg, ok in checks:
            if not ok:
                failures.append({"at": where, "degree": deg})
    return LocalizationReport(not failures, groups, failures)


def require_exact(report: LocalizationReport) -> LocalizationReport:
    if not report.exact:
        f = report.failures[0]
        raise NotExact(f"localization sequence not exact at {f['at']} in degree {f['degree']}", f["degree"])
    return report


# --- double complexes ------------------------------------------------------------

@dataclass
class DoubleComplexFG:
    """Bounded grid D[a][b] with commuting squares.

    ``horizontal[(a, b)]``: D[a][b] -> D[a-1][b] and ``vertical[(a, b)]``:
    D[a][b] -> D[a][b-1]; missing maps are zero.  The total differential is
    h + (-1)^a v, which turns commuting squares into anticommuting ones.
    """

    grid: dict  # (a, b) -> Presentation / FGAbGroup
    horizontal: dict = field(default_factory=dict)
    vertical: dict = field(default_factory=dict)

    def __post_init__(self):
        from .abgroup import _pres
        self.grid = {k: _pres(g) for k, g in self.grid.items()}
        for (a, b) in self.grid:
            h, v = self.h(a, b), self.v(a, b)
            if not (self.h(a - 1, b) @ h).is_zero():
                raise NotAComplex(f"row {b} is not a complex at column {a}")
            if not (self.v(a, b - 1) @ v).is_zero():
                raise NotAComplex(f"column {a} is not a complex at row {b}")
            if not (self.v(a - 1, b) @ h).equals(self.h(a, b - 1) @ v):
                raise SignIncoherent(f"square at ({a}, {b}) does not commute")

    def group(self, a, b) -> Presentation:
        return self.grid.get((a, b), Presentation(()))

    def _map(self, table, key, src, tgt):
        f = table.get(key)
        if f is None:
            from .abgroup import zero_map
            return zero_map(src, tgt)
        return f

    def h(self, a, b) -> FGMap:
        return self._map(self.horizontal, (a, b), self.group(a, b), self.group(a - 1, b))

    def v(self, a, b) -> FGMap:
        return self._map(self.vertical, (a, b), self.group(a, b), self.group(a, b - 1))

    def bounds(self):
        keys = [k for k, g in self.grid.items()]
        if not keys:
            return 0, -1, 0, -1
        return (min(a for a, _ in keys), max(a for a, _ in keys),
                min(b for _, b in keys), max(b for _, b in keys))

    def column(self, a) -> FGComplex:
        _, _, b0, b1 = self.bounds()
        groups = [self.group(a, b) for b in range(b0, b1 + 1)]
        diffs = [self.v(a, b) for b in range(b0 + 1, b1 + 1)]
        return FGComplex(groups, diffs, lo=b0)


def total_complex(D: DoubleComplexFG) -> FGComplex:
    """tot_n = sum_{a+b=n} D_{a,b} with differential h + (-1)^a v."""
    a0, a1, b0, b1 = D.bounds()
    if a1 < a0:
        return FGComplex([], [])
    lo, hi = a0 + b0, a1 + b1

    def summands(n):
        return [(a, n - a) for a in range(a0, a1 + 1) if b0 <= n - a <= b1]

    groups, offsets = [], []
    for n in range(lo, hi + 1):
        orders, off, pos = [], {}, 0
        for a, b in summands(n):
            off[(a, b)] = pos
            orders.extend(D.group(a, b).orders)
            pos += D.group(a, b).ngens
        groups.append(Presentation(tuple(orders)))
        offsets.append(off)
    diffs = []
    for n in range(lo + 1, hi + 1):
        src, tgt = groups[n - lo], groups[n - 1 - lo]
        M = zeros(tgt.ngens, src.ngens)
        for (a, b), s in offsets[n - lo].items():
            ns = D.group(a, b).ngens
            if not ns:
                continue
            if (a - 1, b) in offsets[n - 1 - lo]:
                t = offsets[n - 1 - lo][(a - 1, b)]
                nt = D.group(a - 1, b).ngens
                if nt:
                    M[t:t + nt, s:s + ns] += D.h(a, b).matrix
            if (a, b - 1) in offsets[n - 1 - lo]:
                t = offsets[n - 1 - lo][(a, b - 1)]
                nt = D.group(a, b - 1).ngens
                if nt:
                    M[t:t + nt, s:s + ns] += (-1) ** a * D.v(a, b).matrix
        diffs.append(FGMap(src, tgt, M, check=False))
    try:
        return FGComplex(groups, diffs, lo=lo)
    except NotAComplex as exc:
        raise SignIncoherent(f"total differential squares to nonzero: {exc}") from exc


@dataclass
class SpectralPages:
    E1: dict
    E2: dict
    degenerate: bool
    converges: bool | None
    tot_homology: dict


def ss_pages(D: DoubleComplexFG) -> SpectralPages:
    """E1 = vertical homology, E2 = homology of E1 under the horizontal maps.

    When E2 sits in a single row or column the spectral sequence degenerates
    and E2 in total degree n is compared with H_n(tot D).
    """
    from .abgroup import homology as _homology
    a0, a1, b0, b1 = D.bounds()
    cols = {a: D.column(a) for a in range(a0, a1 + 1)}
    subs = {}
    for a in range(a0, a1 + 1):
        for b in range(b0, b1 + 1):
            subs[(a, b)] = _cycles_mod_boundaries(cols[a], b)
    E1 = {k: s.group() for k, s in subs.items()}
    E2 = {}
    for (a, b), s in subs.items():
        if s.Z.shape[1] == 0:
            E2[(a, b)] = FGAbGroup()
            continue
        h_out = D.h(a, b).matrix
        tgt = subs.get((a - 1, b))
        if tgt is not None and h_out.shape[0]:
            coeffs = preimage(_mul(h_out, s.Z), tgt.B)
            ker = lattice_basis(hstack(_mul(s.Z, coeffs), s.B))
        else:
            ker = s.Z
        src = subs.get((a + 1, b))
        im = s.B if src is None else hstack(_mul(D.h(a + 1, b).matrix, src.Z), s.B)
        E2[(a, b)] = subquotient(ker, im)
    nonzero = [k for k, g in E2.items() if not g.is_trivial]
    degenerate = len({b for _, b in nonzero}) <= 1 or len({a for a, _ in nonzero}) <= 1
    tot = _homology(total_complex(D)) if a1 >= a0 else {}
    converges = None
    if degenerate:
        converges = True
        for n in range(a0 + b0, a1 + b1 + 1):
            terms = [E2[k] for k in E2 if k[0] + k[1] == n and not E2[k].is_trivial]
            if len(terms) > 1:
                converges = None  # extension problem; not decided at E2
                break
            expected = terms[0] if terms else FGAbGroup()
            if tot.get(n, FGAbGroup()) != expected:
                converges = False
    return SpectralPages(E1, E2, degenerate, converges, tot)


# --- audits ------------------------------------------------------------------------

@dataclass
class AuditEntry:
    label: str
    dim: int
    homology: list
    tags: tuple = ()


def vanishing_audit(results: Sequence[AuditEntry]) -> dict:
    """Flag H_j != 0 for j > dim, and any nonzero group on A^1-product scenarios."""
    flags = []
    for r in results:
        for j, g in enumerate(r.homology):
            if j > r.dim and not g.is_trivial:
                flags.append({"label": r.label, "degree": j, "reason": "H_j nonzero above dimension"})
            if "a1_product" in r.tags and not g.is_trivial:
                flags.append({"label": r.label, "degree": j, "reason": "nonzero weight homology of X x A^1"})
    return {"ok": not flags, "flags": flags, "checked": len(results)}


# --- random configurations ------------------------------------------------------

def random_snc_config(rng: random.Random, max_components: int = 5, max_dim: int = 3) -> SNCConfig:
    """A valid incidence structure built from a random point model.

    Each divisor component is a random set of atoms; connected components of
    an intersection are classes of successively refined random labellings,
    so containments between strata are automatically coherent.
    """
    d = rng.randint(0, max_dim)
    ncomp = rng.randint(0, max_components)
    atoms = list(range(rng.randint(1, 8)))
    sets = [frozenset(x for x in atoms if rng.random() < 0.6) for _ in range(ncomp)]
    labels = [[rng.randint(0, 1) for _ in atoms] for _ in range(d + 1)]

    def key(S, x):
        return tuple(labels[k][x] for k in range(len(S) + 1))

    from itertools import combinations
    levels, faces, comp_of = [], {}, {}
    next_id = 0
    for a in range(0, d + 1):
        level = []
        for S in combinations(range(ncomp), a):
            pts = set(atoms)
            for i in S:
                pts &= sets[i]
            blocks = {}
            for x in sorted(pts):
                blocks.setdefault(key(S, x), []).append(x)
            for k in sorted(blocks):
                sid = next_id
                next_id += 1
                comp_of[(S, k)] = sid
                level.append(sid)
                rep = blocks[k][0]
                for j in range(a):
                    T = S[:j] + S[j + 1:]
                    faces[(sid, j)] = comp_of[(T, key(T, rep))]
        if not level:
            break
        levels.append(level)
    return SNCConfig(d, levels, faces)
