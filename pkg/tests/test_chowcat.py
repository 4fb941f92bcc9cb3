from fractions import Fraction

import pytest

from oracles import elliptic_f2_counts
from zetareg.abgroup import FGAbGroup, FQGroup, UNKNOWN
from zetareg.chowcat import (
    EXPONENTS,
    ChowProfile,
    ExponentConvention,
    RegulatorAssembly,
    calibrate_exponents,
    catalog_entries,
    curve_profile,
    load_catalog,
    point_profile,
    projective_bundle_profile,
    projective_space_profile,
    regulator_chi,
    smooth_proper_product,
    spadesuit_check,
    tate_chow,
)
from zetareg.errors import BoundednessViolated, IncompleteBase, IncompleteProfile, NonIntegralP1, NotFQ
from zetareg.ffield import build_field
from zetareg.geometry import MultiPoly, ProjectiveSub, count_sequence
from zetareg.zeta import RationalFunctionQ, base_change, special_value, zeta_from_counts

Z = FGAbGroup(free_rank=1)


def cyc(n):
    return FQGroup(FGAbGroup.cyclic(n), 0)


def test_tate_chow():
    assert tate_chow(2, 0, 0).fg == Z
    assert tate_chow(3, 1, 1) == cyc(2)
    assert tate_chow(2, 2, 3) == cyc(3)
    assert tate_chow(2, 1, 0).fg.is_trivial
    assert tate_chow(2, -1, 0).fg.is_trivial


def test_projective_space_entries():
    P2 = projective_space_profile(2, 3)
    assert P2.lookup(0, 0).fg == Z
    assert P2.lookup(0, 1) == cyc(2)
    assert P2.lookup(0, 3) == cyc(8)
    assert P2.lookup(-1, 1) == cyc(2)
    assert P2.lookup(-1, 3) == cyc(8) and P2.lookup(-1, 5) == cyc(26)
    assert P2.lookup(3, 0).fg.is_trivial


def test_bundle_over_point_matches_direct_recipe():
    direct = projective_space_profile(3, 2)
    keys = [(r, i) for r in range(-3, 4) for i in range(0, 2 * (3 - r) + 1)]
    bundle = projective_bundle_profile(point_profile(2).materialize(
        [(r, i) for r in range(-3, 1) for i in range(0, 13)]), 3, keys)
    for key in keys:
        assert bundle.lookup(*key) == direct.lookup(*key), key


def test_bundle_needs_base_data():
    E = curve_profile([1, 0, 2], 2, pic0_structure=[3])
    assert E.lookup(-1, 0).fg.is_trivial
    with pytest.raises(IncompleteBase):
        projective_bundle_profile(ChowProfile("bare", 2, 1, 1, table={(0, 0): FQGroup(Z, 0)}), 1,
                                  keys=[(0, 1)])
    EP1 = projective_bundle_profile(E, 1, keys=[(0, 0), (1, 0)])
    assert EP1.lookup(1, 0).fg == FGAbGroup.from_orders([0, 0, 3])


def test_bundled_catalog_matches_recipes():
    bundled = load_catalog()
    fresh = {p.tag: p for p in catalog_entries()}
    assert bundled.keys() == fresh.keys()
    for tag, prof in fresh.items():
        assert bundled[tag].table == prof.table, tag
        assert bundled[tag].components == prof.components


def test_profile_json_roundtrip():
    E = curve_profile([1, 0, 2], 2)
    back = ChowProfile.from_json(E.to_json())
    assert back.order_only == {(0, 0)} and back.recipe == E.recipe


def test_curve_profiles():
    E = curve_profile([1, 0, 2], 2, pic0_structure=[3])
    assert E.lookup(0, 0).fg == FGAbGroup.from_orders([0, 3])
    assert E.lookup(0, 1) == cyc(1)
    assert E.lookup(1, 0).fg == Z
    assert curve_profile([1, 0, 2], 2).lookup(0, 0).torsion_order == 3
    with pytest.raises(NonIntegralP1):
        curve_profile([1, -2, 0], 2)
    with pytest.raises(ValueError):
        curve_profile([1, 0, 2], 2, pic0_structure=[2])
    with pytest.raises(IncompleteProfile):
        E.lookup(-1, 3)


def test_curve_regulator_and_smooth_proper():
    E = curve_profile([1, 0, 2], 2, pic0_structure=[3])
    assert regulator_chi(RegulatorAssembly(1, [[E]])).value == 3
    assert smooth_proper_product(E) == 3


def test_curve_with_larger_constant_field():
    # E over F_4 regarded over F_2: counts over F_{4^n} are N_{2n} of E over F_2
    F4 = build_field(2, 2)
    f = MultiPoly.build(F4, 3, [((3, 0, 0), 1), ((0, 2, 1), 1), ((0, 1, 2), 1)])
    direct = count_sequence(ProjectiveSub(2, (f,), F4), 2)
    counts_K = elliptic_f2_counts(12)[1::2]
    assert direct == counts_K[:2] == [9, 9]
    Z_K = zeta_from_counts(counts_K)
    assert Z_K == RationalFunctionQ.make([1, 4, 4], [1, -5, 4])
    Z_E = RationalFunctionQ.make([1, 0, 2], [1, -3, 2])
    Z_minus = RationalFunctionQ.make([1, 0, 2], [1, 3, 2])
    assert base_change(Z_K, 2) == Z_E * Z_minus
    EK = curve_profile([1, 4, 4], 2, k=2, pic0_structure=[9])
    reg = regulator_chi(RegulatorAssembly(1, [[EK]])).value
    assert reg == abs(special_value(base_change(Z_K, 2), 2, 0).leading) == Fraction(3, 2)


def test_calibration_is_unique_and_frozen():
    assert calibrate_exponents() == EXPONENTS
    assert EXPONENTS.describe() == "#CH_0(X_a,b)_tor^((-1)^(a+b)), chi(deg_a)^((-1)^(a+1))"


@pytest.mark.parametrize("q", [2, 3, 5])
def test_regulator_of_open_examples(q):
    gm = RegulatorAssembly(1, [[projective_space_profile(1, q)], [point_profile(q), point_profile(q)]])
    assert regulator_chi(gm).value == Fraction(1, q - 1)
    lines = RegulatorAssembly(2, [[projective_space_profile(2, q)],
                                  [projective_space_profile(1, q)] * 2, [point_profile(q)]])
    assert regulator_chi(lines).value == Fraction(1, q + 1)


def test_regulator_with_p_inverted():
    P1 = projective_space_profile(1, 3)
    assert regulator_chi(RegulatorAssembly(1, [[P1]])).value == Fraction(1, 2)
    E = curve_profile([1, 0, 2], 2, pic0_structure=[3])
    assert regulator_chi(RegulatorAssembly(1, [[E]]), ring_p=3).value == 1


def test_other_conventions_disagree():
    P1 = RegulatorAssembly(1, [[projective_space_profile(1, 3)]])
    assert regulator_chi(P1, convention=ExponentConvention(1, 1, 1, 1)).value == 2


def test_degree_map_with_free_cokernel():
    prof = ChowProfile("two free", 2, 1, 0, [{"constant_degree": 1, "index": 1}] * 2,
                       table={(0, 0): FQGroup(Z, 0)})
    with pytest.raises(NotFQ):
        regulator_chi(RegulatorAssembly(0, [[prof]]))


def test_unknown_entries():
    with pytest.raises(IncompleteProfile):
        ChowProfile("bad", 2, 1, 1, table={(0, 1): FQGroup(FGAbGroup(), UNKNOWN)})
    bare = ChowProfile("bare", 2, 1, 1, table={(0, 0): FQGroup(Z, 0)})
    with pytest.raises(IncompleteProfile):
        regulator_chi(RegulatorAssembly(1, [[bare]]))
    assert not bare.known(0, 1) and bare.known(2, 0)
    idx = ChowProfile("idx", 2, 1, 0, [{"constant_degree": 1, "index": UNKNOWN}],
                      table={(0, 0): FQGroup(Z, 0)})
    with pytest.raises(IncompleteProfile):
        idx.degree_map()


def test_index_enters_degree_cokernel():
    prof = ChowProfile("index 2", 2, 1, 0, [{"constant_degree": 1, "index": 2}],
                       table={(0, 0): FQGroup(Z, 0)})
    res = regulator_chi(RegulatorAssembly(0, [[prof]]))
    assert res.factors[-1]["value"] == "2/1" and res.beta == Fraction(1, 2)


def test_assembly_boundedness():
    with pytest.raises(BoundednessViolated):
        RegulatorAssembly(0, [[point_profile(2)], [point_profile(2)]])
    assert len(RegulatorAssembly(0, [[point_profile(2)], []]).terms) == 1


def test_spadesuit_states():
    q = 3
    assert spadesuit_check(RegulatorAssembly(1, [[projective_space_profile(1, q)]])).status == "satisfied"
    lines = RegulatorAssembly(2, [[projective_space_profile(2, q)],
                                  [projective_space_profile(1, q)] * 2, [point_profile(q)]],
                              weight_homology=[FGAbGroup()] * 3)
    assert spadesuit_check(lines).status == "satisfied"
    tori = RegulatorAssembly(2, [[projective_space_profile(2, q)], [point_profile(q)] * 3],
                             weight_homology=[FGAbGroup(), FGAbGroup(), Z])
    assert spadesuit_check(tori).status == "satisfied"  # rational E1 argument
    bare = ChowProfile("bare", q, 1, 2, table={(0, 0): FQGroup(Z, 0)})
    unknown = RegulatorAssembly(2, [[bare], [point_profile(q)]], weight_homology=[FGAbGroup(), FGAbGroup(), Z])
    assert spadesuit_check(unknown).status == "undeterminable"
    # deliberately inconsistent data: every cell on the i = 2 diagonal is torsion
    torsion = {(0, i): FQGroup(FGAbGroup(), 0) for i in range(0, 5)}
    fake = ChowProfile("fake", q, 1, 2, table=torsion)
    fake_pt = ChowProfile("fake point", q, 1, 0, table={(0, 0): FQGroup(FGAbGroup(), 0)})
    failing = RegulatorAssembly(2, [[fake], [point_profile(q)], [fake_pt]],
                                weight_homology=[FGAbGroup(), FGAbGroup(), Z])
    assert spadesuit_check(failing).status == "failed"
