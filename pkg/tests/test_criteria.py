import json

import numpy as np
import pytest

from coordlens import catalog
from coordlens.criteria import (CONJ_CENTRALIZER_FORMULA, COMPARISON_FORMULA_RPS, StarTable, class_verdict,
                                crit_anchored, crit_bounded_torsion, crit_conj_centralizer, crit_p,
                                crit_perfect_dagger, group_verdict, obstruction_center_hom, obstruction_decomposable,
                                obstruction_nilpotent, structure_verdict, transported_formula, verify_perfect_star)
from coordlens.groups import SizeGuardError, direct_product
from coordlens.logic import evaluator
from coordlens.reduced import defines_comparison, defines_support_relation, make_ideal, reduced_product


def g(name):
    return catalog.group(name)


# ------------------------------------------------------------ individual criteria
def test_conj_centralizer():
    assert crit_conj_centralizer(g("A5")).passed
    r = crit_conj_centralizer(g("S3"))
    assert not r.passed and r.witness["element"] == "(123)"
    # the double transpositions form a class centralized by the Klein four-group
    s4 = crit_conj_centralizer(g("S4"))
    assert not s4.passed and len(s4.witness["centralizer"]) == 4


@pytest.mark.parametrize("name,p,passed", [("S3", 2, True), ("Dih5", 2, True), ("C4", 2, False), ("S4", 3, True),
                                           ("S4", 2, False), ("C5", 2, False)])
def test_crit_p(name, p, passed):
    assert crit_p(g(name), p).passed is passed


def test_crit_p_distinguishes_missing_torsion():
    assert crit_p(g("C5"), 2).witness == {"reason": "no p-torsion"}
    assert "centralizer" in crit_p(g("C4"), 2).witness
    with pytest.raises(ValueError):
        crit_p(g("S3"), 4)


@pytest.mark.parametrize("name,m,n,passed", [("Dih5", 2, 2, True), ("S3", 2, 2, True), ("C6", 2, 2, False)])
def test_bounded_torsion(name, m, n, passed):
    r = crit_bounded_torsion(g(name), m, n)
    assert r.passed is passed
    if name == "C6":
        assert "condition 2" in r.witness


@pytest.mark.parametrize("name,m,passed", [("SL2_5", 2, True), ("A5", 1, True), ("S4", 2, False)])
def test_perfect_dagger(name, m, passed):
    r = crit_perfect_dagger(g(name), m)
    assert r.passed is passed
    if name == "S4":
        assert r.detail == "not perfect"


def test_commutator_condition_on_a5():
    a5 = g("A5")
    table = StarTable(a5, 1)
    e = a5.identity
    assert verify_perfect_star(a5, 1, e, e, table)
    for a in range(a5.order):
        if a != e:
            assert verify_perfect_star(a5, 1, a, 7, table)
    for b in range(a5.order):
        if b != e:
            assert verify_perfect_star(a5, 1, e, b, table) is False
    with pytest.raises(SizeGuardError):
        StarTable(a5, 3)


def test_anchored_transposition_criterion():
    assert crit_anchored(g("S3")).passed
    r = crit_anchored(g("S4"))
    assert not r.passed and r.witness["element"] == "(12)(34)"


# ------------------------------------------------------------ obstructions
def test_obstructions_reverify():
    q8 = obstruction_nilpotent(g("Q8"))
    assert q8 and q8.reverify() and sorted(q8.witness["image"]) == ["-1", "1"]
    hom = obstruction_center_hom(g("S3"), g("SL2_5"))
    assert hom and hom.reverify()
    dec = obstruction_decomposable(g("C6"))
    assert dec and dec.reverify()
    a5 = g("A5")
    assert obstruction_nilpotent(a5) is None and obstruction_decomposable(a5) is None
    assert obstruction_center_hom(a5, a5) is None


# ------------------------------------------------------------ verdicts
@pytest.mark.parametrize("name,outcome,reason", [
    ("A5", "recognizes", "conj-centralizer"), ("S3", "recognizes", "crit_p(2)"), ("S4", "recognizes", "crit_p(3)"),
    ("Dih5", "recognizes", "crit_p(2)"), ("SL2_5", "recognizes", "perfect-dagger(1)"), ("Q8", "fails", "nilpotent"),
    ("C6", "fails", "decomposable"), ("Dih4", "fails", "nilpotent"), ("GL2_3", "fails", "center-hom"),
])
def test_group_verdicts(name, outcome, reason):
    v = group_verdict(g(name))
    assert (v.outcome, v.reason) == (outcome, reason)
    if outcome == "recognizes":
        assert v.certificates and all(c.passed for c in v.certificates) and not v.obstructions
    else:
        assert v.obstructions and all(o.reverify() for o in v.obstructions)


def test_class_with_sl25_and_s3_fails_by_center_hom():
    v = class_verdict([g("S3"), g("SL2_5")])
    assert v.outcome == "fails" and v.reason == "center-hom"
    assert v.obstructions[0].witness["target"] == "SL2_5"


def test_symmetric_class_is_open_with_anchor_note():
    v = class_verdict([g(f"S{n}") for n in range(3, 6)])
    assert v.outcome == "open"
    assert any("S4" in note for note in v.notes)
    assert v.members["S3"] == ["crit_p(2)"] and "conj-centralizer" in v.members["S5"]


def test_direct_square_fails():
    v = class_verdict([direct_product(g("S3"), g("S3"))])
    assert v.outcome == "fails" and v.reason == "decomposable"


def test_no_group_gets_both_certificate_and_obstruction():
    for name in catalog.LISTED:
        e = catalog.entry(name)
        if e.kind != "group" or name in ("S7", "A6", "GL3_2"):
            continue
        v = group_verdict(g(name))
        assert not (v.certificates and v.obstructions)


def test_gl22_anomaly_is_reported_not_hidden():
    v = group_verdict(g("GL2_2"))
    assert v.outcome == "recognizes"
    assert catalog.entry("GL2_2").expected.outcome == "fails"


def test_timeout_gives_open_with_note():
    v = class_verdict([g("S5"), g("A5")], timeout=0.0)
    assert v.outcome in ("open", "fails")
    if v.outcome == "open":
        assert any("time limit" in n for n in v.notes)


def test_verdict_json_shape():
    d = group_verdict(g("S3")).to_json(timings=True)
    assert set(d) >= {"schema", "groups", "outcome", "reason", "basis", "witnesses", "millis"}
    assert "millis" not in group_verdict(g("S3")).to_json()
    json.dumps(d)


def test_structure_verdicts():
    v = structure_verdict(catalog.rps())
    assert v.outcome == "recognizes" and v.certificates[0].formula == COMPARISON_FORMULA_RPS
    assert structure_verdict(catalog.chain(4)).outcome == "open"


# ------------------------------------------------------------ soundness against reduced products
def _certified_formula(name):
    v = group_verdict(g(name))
    assert v.outcome == "recognizes"
    return v.certificates[0].formula


@pytest.mark.parametrize("name", ["S3", "Dih5"])
def test_recognition_certificate_defines_support_containment(name):
    phi = transported_formula(_certified_formula(name))
    rp = reduced_product([g(name).structure] * 2, make_ideal(2))
    assert defines_support_relation(rp, phi).holds


def test_s4_certificate_on_sampled_assignments():
    phi = transported_formula(_certified_formula("S4"))
    rp = reduced_product([g("S4").structure] * 2, make_ideal(2))
    rng = np.random.default_rng(7)
    idx = rng.integers(0, rp.size, size=(3000, 4))
    # bias half the samples towards equal pairs so both sides of the implication occur
    idx[::2, 1] = idx[::2, 0]
    idx[1::4, 3] = idx[1::4, 2]
    got = evaluator(rp.structure, phi, ("x", "y", "u", "v")).rows(idx.astype(np.int32)).astype(bool)
    co = rp.coords[idx]
    want = np.all((co[:, 0] != co[:, 1]) | (co[:, 2] == co[:, 3]), axis=1)
    assert np.array_equal(got, want)


def test_transported_conj_formula_fails_in_s4_squared():
    phi = transported_formula(CONJ_CENTRALIZER_FORMULA)
    rp = reduced_product([g("S4").structure] * 2, make_ideal(2))
    # agree(x,y) = {0} sits inside agree(u,v) = {0}, yet the formula is false
    x, y = rp.element("e,e"), rp.element("e,(12)(34)")
    u, v = rp.element("e,e"), rp.element("e,(34)")
    assert not evaluator(rp.structure, phi, ("x", "y", "u", "v")).holds([x, y, u, v])


def test_rps_comparison_formula_defines_agreement_containment():
    m = catalog.rps()
    rp = reduced_product([m, m], make_ideal(2))
    assert defines_comparison(rp, COMPARISON_FORMULA_RPS, ("x", "y", "t")).holds
