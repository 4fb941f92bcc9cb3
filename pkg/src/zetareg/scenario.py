"""Scenario files and verification reports.

A scenario is a JSON document (``"schema": 1``) naming a base field, a
variety, optional boundary data and Chow profiles, and a list of targets.
Every target produces one report entry with exact rationals rendered as
``"num/den"`` strings; a report never depends on timing or scheduling.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import chowcat
from .abgroup import FGAbGroup
from .chowcat import ChowProfile, RegulatorAssembly
from .errors import (
    BudgetExceeded,
    IncompleteProfile,
    InvalidSpec,
    NotFQ,
    NotStabilized,
    ParseError,
    ZetaRegError,
)
from .ffield import FieldDesc, build_field
from .geometry import (
    AffineSpace,
    AffineSub,
    BaseRestriction,
    Complement,
    DisjointUnion,
    MultiPoly,
    ProjectiveSpace,
    ProjectiveSub,
    Product,
    VarietySpec,
    count_points,
    count_sequence,
)
from .weight import (
    AuditEntry,
    Lam,
    SNCConfig,
    build_snc_complex,
    localization_check,
    vanishing_audit,
    weight_homology,
)
from .zeta import (
    RationalFunctionQ,
    base_change,
    fmt_rational,
    special_value,
    strip_sign_ppower,
    zeta_from_counts,
)

SCHEMA = 1
STATEMENTS = ("main_zero", "negative_r", "smooth_proper", "base_change",
              "snc_multiplicativity", "weight_vanishing")


# --- parsing ----------------------------------------------------------------------

def _need(data, key, where):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"missing key {key!r}", where)
    return data[key]


def parse_field(data, where="field") -> FieldDesc:
    try:
        return build_field(int(_need(data, "p", where)), int(data.get("e", 1)))
    except ZetaRegError as exc:
        raise ParseError(str(exc), where) from exc


def parse_poly(data, base: FieldDesc, nvars: int, where: str) -> MultiPoly:
    """A polynomial is a list of [exponents, coefficient]; a coefficient is an
    int (prime-field residue) or a coefficient list, constant term first."""
    if not isinstance(data, list):
        raise ParseError("polynomial must be a list of [exponents, coefficient] terms", where)
    terms = []
    for k, term in enumerate(data):
        if not (isinstance(term, list) and len(term) == 2 and isinstance(term[0], list)):
            raise ParseError("term must be [exponents, coefficient]", f"{where}[{k}]")
        terms.append((term[0], term[1]))
    try:
        return MultiPoly.build(base, nvars, terms)
    except (ZetaRegError, TypeError, ValueError) as exc:
        raise ParseError(str(exc), where) from exc


def parse_variety(data, base: FieldDesc, where: str = "variety") -> VarietySpec:
    kind = _need(data, "type", where)
    try:
        if kind == "point":
            return AffineSpace(0, base)
        if kind == "affine_space":
            return AffineSpace(int(_need(data, "n", where)), base)
        if kind == "projective_space":
            return ProjectiveSpace(int(_need(data, "n", where)), base)
        if kind in ("affine_sub", "projective_sub"):
            n = int(_need(data, "n", where))
            nvars = n if kind == "affine_sub" else n + 1
            polys = tuple(parse_poly(f, base, nvars, f"{where}.polys[{k}]")
                          for k, f in enumerate(_need(data, "polys", where)))
            cls = AffineSub if kind == "affine_sub" else ProjectiveSub
            return cls(n, polys, base, data.get("dim"))
        if kind == "product":
            return Product(parse_variety(_need(data, "left", where), base, f"{where}.left"),
                           parse_variety(_need(data, "right", where), base, f"{where}.right"))
        if kind == "union":
            parts = tuple(parse_variety(x, base, f"{where}.parts[{k}]")
                          for k, x in enumerate(_need(data, "parts", where)))
            return DisjointUnion(parts, base)
        if kind == "complement":
            return Complement(parse_variety(_need(data, "ambient", where), base, f"{where}.ambient"),
                              parse_variety(_need(data, "closed", where), base, f"{where}.closed"))
        if kind == "restriction":
            k = int(_need(data, "degree", where))
            inner = build_field(base.p, base.e * k)
            return BaseRestriction(parse_variety(_need(data, "inner", where), inner, f"{where}.inner"), k)
    except ParseError:
        raise
    except ZetaRegError as exc:
        raise ParseError(f"{type(exc).__name__}: {exc}", where) from exc
    raise ParseError(f"unknown variety type {kind!r}", where)


def parse_profile(ref, base: FieldDesc, catalog: dict, where: str) -> ChowProfile:
    if not isinstance(ref, dict):
        raise ParseError("profile reference must be an object", where)
    p, e = base.p, base.e
    if "catalog" in ref:
        tag = ref["catalog"]
        if tag not in catalog:
            raise ParseError(f"unknown catalog profile {tag!r}", where)
        return catalog[tag]
    if "projective_space" in ref:
        return chowcat.projective_space_profile(int(ref["projective_space"]), p, e, int(ref.get("k", 1)))
    if "point" in ref:
        return chowcat.point_profile(p, e, int(ref.get("k", 1)))
    if "curve" in ref:
        c = ref["curve"]
        try:
            return chowcat.curve_profile(_need(c, "P", where), p, e, int(c.get("k", 1)),
                                         c.get("tag", "curve"), c.get("pic0"))
        except (ValueError, ZetaRegError) as exc:
            raise ParseError(str(exc), where) from exc
    if "bundle" in ref:
        inner = parse_profile(ref["bundle"], base, catalog, f"{where}.bundle")
        return chowcat.projective_bundle_profile(inner, int(_need(ref, "n", where)))
    if "inline" in ref:
        try:
            return ChowProfile.from_json(ref["inline"])
        except (KeyError, ValueError) as exc:
            raise ParseError(f"bad inline profile: {exc}", where) from exc
    raise ParseError("unrecognised profile reference", where)


@dataclass
class Target:
    statement: str
    params: dict = field(default_factory=dict)


@dataclass
class Scenario:
    name: str
    base: FieldDesc
    variety: VarietySpec | None
    raw: dict
    targets: list
    snc_raw: dict | None = None
    strata: dict = field(default_factory=dict)      # id -> VarietySpec
    profiles: dict = field(default_factory=dict)    # id or "X" -> ChowProfile
    ring: Lam = field(default_factory=Lam)
    regime: str = "sign_and_p_power"
    m: int = 6
    m_max: int = 12
    bound: tuple | None = None
    guard: int = 2
    tags: tuple = ()

    @property
    def q(self) -> int:
        return self.base.size


def load_scenario(data: dict, source: str = "<scenario>", catalog: dict | None = None) -> Scenario:
    if not isinstance(data, dict):
        raise ParseError("scenario must be a JSON object", source)
    if data.get("schema") != SCHEMA:
        raise ParseError(f"unsupported schema {data.get('schema')!r}", f"{source}:schema")
    catalog = chowcat.load_catalog() if catalog is None else catalog
    base = parse_field(_need(data, "field", source), f"{source}:field")
    variety = parse_variety(data["variety"], base, f"{source}:variety") if "variety" in data else None
    strata, profiles = {}, {}
    for sid, entry in (data.get("strata") or {}).items():
        where = f"{source}:strata.{sid}"
        if "variety" in entry:
            strata[sid] = parse_variety(entry["variety"], base, where + ".variety")
        if "profile" in entry:
            profiles[sid] = parse_profile(entry["profile"], base, catalog, where + ".profile")
    if "profile" in data:
        profiles["X"] = parse_profile(data["profile"], base, catalog, f"{source}:profile")
    targets = []
    for k, t in enumerate(data.get("targets", [])):
        st = _need(t, "statement", f"{source}:targets[{k}]")
        if st not in STATEMENTS:
            raise ParseError(f"unknown statement {st!r}", f"{source}:targets[{k}]")
        targets.append(Target(st, dict(t.get("params", {}))))
    counts = data.get("counts", {})
    regime = data.get("regime", "sign_and_p_power")
    if regime not in ("sign_only", "sign_and_p_power"):
        raise ParseError(f"unknown regime {regime!r}", f"{source}:regime")
    try:
        ring = Lam.parse(data.get("coefficients", "Z"))
    except ValueError as exc:
        raise ParseError(str(exc), f"{source}:coefficients") from exc
    bound = counts.get("bound")
    return Scenario(
        name=str(data.get("name", Path(source).stem)),
        base=base, variety=variety, raw=data, targets=targets,
        snc_raw=data.get("snc"), strata=strata, profiles=profiles, ring=ring, regime=regime,
        m=int(counts.get("m", 6)), m_max=int(counts.get("m_max", 12)), bound=tuple(bound) if bound else None,
        guard=int(counts.get("guard", 2)), tags=tuple(data.get("tags", ())),
    )


def read_scenario(path, catalog=None) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(path)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from exc
    return load_scenario(data, str(path), catalog)


# --- evaluation helpers ---------------------------------------------------------------

class _Context:
    """Per-scenario cache of counts and zeta functions."""

    def __init__(self, s: Scenario, jobs: int = 1):
        self.s = s
        self.jobs = jobs
        self._zeta = {}

    def zeta(self, spec: VarietySpec) -> RationalFunctionQ:
        """Z from counts N_1..N_m, extending m until the reconstruction
        stabilizes (up to ``m_max`` or the enumeration budget)."""
        key = id(spec)
        if key not in self._zeta:
            s = self.s
            counts = count_sequence(spec, s.m, jobs=self.jobs)
            while True:
                try:
                    Z = zeta_from_counts(counts, s.bound, s.guard)
                    break
                except NotStabilized:
                    if s.bound is not None or len(counts) >= s.m_max:
                        raise
                    try:
                        counts.append(count_points(spec, len(counts) + 1, jobs=self.jobs))
                    except BudgetExceeded as exc:
                        raise NotStabilized(f"not stabilized with {len(counts)} counts; {exc}") from exc
            self._zeta[key] = (Z, counts)
        return self._zeta[key][0]

    def counts(self, spec: VarietySpec) -> list[int]:
        self.zeta(spec)
        return self._zeta[id(spec)][1]

    def snc(self) -> SNCConfig:
        if self.s.snc_raw is None:
            raise InvalidSpec("scenario has no SNC configuration")
        return SNCConfig.from_json(self.s.snc_raw)

    def profile(self, key: str) -> ChowProfile:
        if key not in self.s.profiles:
            raise IncompleteProfile(f"no Chow profile for {key!r}")
        return self.s.profiles[key]

    def assembly(self) -> RegulatorAssembly:
        s = self.s
        if s.snc_raw is not None:
            cfg = self.snc()
            terms = [[self.profile(str(sid)) for sid in level] for level in cfg.levels]
            H = weight_homology(build_snc_complex(cfg, s.ring))
            return RegulatorAssembly(cfg.dim, terms, H)
        X = self.profile("X")
        return RegulatorAssembly(X.dim, [[X]], [FGAbGroup(free_rank=X.pi0)])


def _compare(lhs: Fraction, rhs: Fraction, p: int) -> dict:
    return {
        "sign_only": abs(lhs) == abs(rhs),
        "sign_and_p_power": strip_sign_ppower(lhs, p) == strip_sign_ppower(rhs, p),
    }


def _value_entry(s: Scenario, lhs: Fraction, rhs: Fraction) -> dict:
    cmp = _compare(lhs, rhs, s.base.p)
    return {
        "lhs": fmt_rational(lhs),
        "rhs": fmt_rational(rhs),
        "lhs_stripped": fmt_rational(strip_sign_ppower(lhs, s.base.p)),
        "rhs_stripped": fmt_rational(strip_sign_ppower(rhs, s.base.p)),
        "comparisons": cmp,
        "regime": s.regime,
        "verdict": "match" if cmp[s.regime] else "mismatch",
    }


def _need_variety(s: Scenario) -> VarietySpec:
    if s.variety is None:
        raise InvalidSpec("scenario has no variety")
    return s.variety


# --- targets ------------------------------------------------------------------------

def verify_main_zero(ctx: _Context, params: dict) -> dict:
    s = ctx.s
    Z = ctx.zeta(_need_variety(s))
    lhs = special_value(Z, s.q, 0)
    asm = ctx.assembly()
    spade = chowcat.spadesuit_check(asm)
    details = {"zeta": str(Z), "laurent": lhs.to_json(), "spadesuit": spade.to_json()}
    if spade.status == "failed":
        return {"verdict": "spadesuit-failed", "details": details}
    if spade.status == "undeterminable":
        return {"verdict": "skipped", "reason": spade.reason, "details": details}
    try:
        reg = chowcat.regulator_chi(asm, s.ring.p)
    except NotFQ as exc:
        return {"verdict": "spadesuit-failed", "reason": str(exc), "details": details}
    details["regulator"] = reg.to_json()
    out = _value_entry(s, lhs.leading, reg.value)
    out["details"] = details
    return out


def verify_negative_r(ctx: _Context, params: dict) -> dict:
    s = ctx.s
    r = int(_need(params, "r", "negative_r.params"))
    if r >= 0:
        raise InvalidSpec("negative_r needs r < 0")
    X = ctx.profile("X")
    Z = ctx.zeta(_need_variety(s))
    lhs = special_value(Z, s.q, r)
    rhs = Fraction(1)
    factors = []
    for i in range(0, 2 * (X.dim - r) + 1):
        g = X.lookup(r, i)
        if g.divisible_rank == chowcat.UNKNOWN:
            raise IncompleteProfile(f"CH_{r}(X, {i}) has unknown divisible rank")
        rhs *= Fraction(g.torsion_order) ** (-1) ** i
        if g.torsion_order != 1:
            factors.append({"i": i, "group": str(g), "exponent": (-1) ** i})
    out = _value_entry(s, lhs.leading, rhs)
    out["details"] = {"zeta": str(Z), "laurent": lhs.to_json(), "factors": factors}
    return out


def verify_smooth_proper(ctx: _Context, params: dict) -> dict:
    s = ctx.s
    X = ctx.profile("X")
    if X.pi0 != 1:
        return {"verdict": "skipped", "reason": "product formula needs a connected variety"}
    comp = X.components[0]
    if comp.get("index", 1) != 1:
        return {"verdict": "skipped", "reason": "degree map over the constant field is not onto"}
    Z = ctx.zeta(_need_variety(s))
    lhs = special_value(Z, s.q, 0)
    if lhs.order != -1:
        # a geometrically irreducible smooth proper variety has a simple pole at t = 1
        return {"verdict": "error", "error": "PoleOrder",
                "reason": f"pole order {-lhs.order} at t = 1, expected 1",
                "details": {"zeta": str(Z), "laurent": lhs.to_json()}}
    k = int(comp["constant_degree"])
    # product over the constant field K, then the base-change factor [K:k]
    rhs = chowcat.smooth_proper_product(X) / k
    out = _value_entry(s, lhs.leading, rhs)
    out["details"] = {"zeta": str(Z), "laurent": lhs.to_json(), "constant_degree": k}
    return out


def verify_base_change(ctx: _Context, params: dict) -> dict:
    s = ctx.s
    X = _need_variety(s)
    if not isinstance(X, BaseRestriction):
        raise InvalidSpec("base_change needs a restriction variety")
    k = X.degree
    Zk = ctx.zeta(X)
    ZK = ctx.zeta(X.inner)
    functional = Zk == base_change(ZK, k)
    vk = special_value(Zk, s.q, 0)
    vK = special_value(ZK, s.q**k, 0)
    lemma = vK.leading == k * vk.leading and vK.order == vk.order
    return {
        "lhs": fmt_rational(vK.leading),
        "rhs": fmt_rational(k * vk.leading),
        "comparisons": {"exact": lemma, "functional_equation": functional},
        "verdict": "match" if lemma and functional else "mismatch",
        "details": {"zeta_k": str(Zk), "zeta_K": str(ZK), "degree": k},
    }


def verify_snc_multiplicativity(ctx: _Context, params: dict) -> dict:
    s = ctx.s
    cfg = ctx.snc()
    Z_U = ctx.zeta(_need_variety(s))
    product = RationalFunctionQ.one()
    per_level = []
    for a, level in enumerate(cfg.levels):
        missing = [sid for sid in level if str(sid) not in s.strata]
        if missing:
            raise InvalidSpec(f"strata {missing} have no variety")
        Y = DisjointUnion(tuple(s.strata[str(sid)] for sid in level), s.base)
        Z_a = ctx.zeta(Y)
        per_level.append(str(Z_a))
        product = product * Z_a ** ((-1) ** a)
    ok = product == Z_U
    return {
        "lhs": str(Z_U),
        "rhs": str(product),
        "comparisons": {"exact": ok},
        "verdict": "match" if ok else "mismatch",
        "details": {"levels": per_level},
    }


def verify_weight_vanishing(ctx: _Context, params: dict) -> dict:
    s = ctx.s
    cfg = ctx.snc()
    H = weight_homology(build_snc_complex(cfg, s.ring))
    audit = vanishing_audit([AuditEntry(s.name, cfg.dim, H, s.tags)])
    loc = localization_check(cfg, s.ring)
    ok = audit["ok"] and loc.exact
    expected = params.get("expected")
    if expected is not None:
        exp = [FGAbGroup.from_json(g) for g in expected]
        exp += [FGAbGroup()] * (len(H) - len(exp))
        ok = ok and exp == H
    return {
        "lhs": [str(g) for g in H],
        "rhs": [str(FGAbGroup.from_json(g)) for g in expected] if expected is not None else None,
        "comparisons": {"audit": audit["ok"], "localization": loc.exact},
        "verdict": "match" if ok else "mismatch",
        "details": {"coefficients": str(s.ring), "flags": audit["flags"], "localization_failures": loc.failures},
    }


VERIFIERS = {
    "main_zero": verify_main_zero,
    "negative_r": verify_negative_r,
    "smooth_proper": verify_smooth_proper,
    "base_change": verify_base_change,
    "snc_multiplicativity": verify_snc_multiplicativity,
    "weight_vanishing": verify_weight_vanishing,
}


def run_scenario(s: Scenario, jobs: int = 1) -> dict:
    ctx = _Context(s, jobs)
    entries = []
    for t in s.targets:
        head = {"statement": t.statement, "params": t.params}
        try:
            body = VERIFIERS[t.statement](ctx, t.params)
        except ZetaRegError as exc:
            body = {"verdict": "error", "error": type(exc).__name__, "reason": str(exc)}
        entries.append({**head, **body})
    return {
        "schema": SCHEMA,
        "scenario": s.name,
        "field": {"p": s.base.p, "e": s.base.e},
        "coefficients": str(s.ring),
        "exponent_convention": chowcat.EXPONENTS.describe(),
        "targets": entries,
    }


def report_ok(report: dict) -> bool:
    return all(t["verdict"] in ("match", "skipped") for t in report["targets"])


def dumps(report: Any) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
