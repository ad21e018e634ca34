import itertools
import math

import numpy as np
import pytest

from coordlens import catalog
from coordlens.catalog import CatalogError
from coordlens.groups import (FiniteGroup, GroupError, GroupHom, SizeGuardError, abelianization_invariants,
                              commutator_set, commutator_subgroup, commutator_width, direct_product,
                              extend_from_generators, hom_to_center_exists, is_decomposable, is_nilpotent,
                              is_perfect, lower_central_series, nilpotent_center_hom, normal_subgroups,
                              subset_product)
from coordlens.logic import evaluate

SMALL = ["S3", "S4", "A4", "A5", "C4", "C6", "Dih4", "Dih5", "Dih6", "Q8", "SL2_3", "GL2_2"]


def brute_classes(g):
    seen, out = set(), []
    for a in range(g.order):
        if a in seen:
            continue
        cls = sorted({int(g.table[g.table[x, a], g.inverse[x]]) for x in range(g.order)})
        seen.update(cls)
        out.append(tuple(cls))
    return sorted(out)


def brute_centralizer(g, elems):
    return [x for x in range(g.order) if all(g.table[x, s] == g.table[s, x] for s in elems)]


@pytest.mark.parametrize("name", SMALL)
def test_group_axioms_hold(name):
    g = catalog.group(name)
    t, e = g.table, g.identity
    ar = np.arange(g.order)
    assert np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar)
    assert np.all(t[ar, g.inverse] == e)
    left = t[t[:, :, None], ar[None, None, :]]      # (ab)c
    right = t[ar[:, None, None], t[None, :, :]]     # a(bc)
    assert np.array_equal(left, right)


@pytest.mark.parametrize("name", SMALL)
def test_conjugacy_classes_match_brute_force(name):
    g = catalog.group(name)
    assert sorted(g.conjugacy_classes) == brute_classes(g)
    assert [c[0] for c in g.conjugacy_classes] == sorted(c[0] for c in g.conjugacy_classes)
    assert all(g.order % len(c) == 0 for c in g.conjugacy_classes)
    singles = sorted(c[0] for c in g.conjugacy_classes if len(c) == 1)
    assert singles == list(g.center.elements)


@pytest.mark.parametrize("name", SMALL)
def test_class_centralizer_is_intersection_of_point_centralizers(name):
    g = catalog.group(name)
    for cls in g.conjugacy_classes:
        assert list(g.class_centralizer(cls[0]).elements) == brute_centralizer(g, cls)


@pytest.mark.parametrize("name,classes", [("S4", 5), ("C5", 5), ("Q8", 5), ("S5", 7), ("A5", 5), ("SL2_5", 9)])
def test_class_counts(name, classes):
    assert len(catalog.group(name).conjugacy_classes) == classes


def test_named_centralizers_and_centers():
    s3 = catalog.group("S3")
    assert s3.class_centralizer(s3.element("(123)")).order == 3
    s4 = catalog.group("S4")
    assert s4.class_centralizer(s4.element("(12)")).order == 1
    assert s4.centralizer([s4.identity]).order == 24
    q8 = catalog.group("Q8")
    assert q8.center.order == 2 and (q8.element("-1"),) in q8.conjugacy_classes
    assert catalog.group("C6").center.order == 6


@pytest.mark.parametrize("name", ["A5", "SL2_5", "S4", "C4", "Q8", "A4", "SL2_3"])
def test_commutator_width_is_minimal(name):
    g = catalog.group(name)
    w = commutator_width(g)
    derived = commutator_subgroup(g).mask
    if derived.sum() == 1:
        assert w == 0
        return
    comm = commutator_set(g)
    cur = comm.copy()
    for _ in range(w - 1):
        cur = subset_product(g, cur, comm)
    assert np.array_equal(cur, derived)
    if w > 1:
        prev = comm.copy()
        for _ in range(w - 2):
            prev = subset_product(g, prev, comm)
        assert not np.array_equal(prev, derived)


def test_perfect_groups_and_widths():
    a5, sl = catalog.group("A5"), catalog.group("SL2_5")
    assert is_perfect(a5) and commutator_width(a5) == 1
    assert is_perfect(sl) and commutator_width(sl) <= 2
    assert not is_perfect(catalog.group("C4"))


def test_lower_central_series():
    assert is_nilpotent(catalog.group("Q8")) and len(lower_central_series(catalog.group("Q8"))) == 3
    s3 = lower_central_series(catalog.group("S3"))
    assert not is_nilpotent(catalog.group("S3")) and s3[-1].order == 3
    assert is_nilpotent(catalog.group("C6"))


@pytest.mark.parametrize("name,count", [("SL2_5", 3), ("A5", 2), ("C6", 4), ("S4", 4), ("Q8", 6)])
def test_normal_subgroup_counts(name, count):
    subs = normal_subgroups(catalog.group(name))
    assert len(subs) == count
    assert all(s.is_normal() for s in subs)


def test_sl25_normal_subgroups_are_trivial_center_whole():
    g = catalog.group("SL2_5")
    assert [s.order for s in normal_subgroups(g)] == [1, 2, 120]
    assert normal_subgroups(g)[1] == g.center


def _brute_normal(g):
    out = set()
    classes = g.conjugacy_classes
    for r in range(len(classes) + 1):
        for combo in itertools.combinations(classes, r):
            s = {x for c in combo for x in c} | {g.identity}
            if all(g.table[a, b] in s for a in s for b in s):
                out.add(frozenset(s))
    return out


@pytest.mark.parametrize("name", ["S3", "S4", "A4", "Dih4", "Q8", "C6", "Dih6"])
def test_normal_subgroups_match_class_union_brute_force(name):
    g = catalog.group(name)
    assert {frozenset(s.elements) for s in normal_subgroups(g)} == _brute_normal(g)


@pytest.mark.parametrize("name", ["Q8", "Dih4", "Dih8", "Dih6"])
def test_nilpotent_center_hom(name):
    g = catalog.group(name)
    if not is_nilpotent(g):
        assert nilpotent_center_hom(g) is None
        return
    h = nilpotent_center_hom(g)
    assert h is not None and h.is_homomorphism() and not h.is_trivial()
    assert set(h.image().elements) <= set(g.center.elements)


def test_nilpotent_center_hom_refuses_non_nilpotent():
    assert nilpotent_center_hom(catalog.group("S3")) is None


def _brute_hom_to_center(g, h):
    center = list(h.center.elements)
    gens = list(g.generators)
    for imgs in itertools.product(center, repeat=len(gens)):
        m = extend_from_generators(g, h, gens, imgs)
        if m is not None and np.any(m != h.identity):
            return True
    return False


@pytest.mark.parametrize("src,dst", [
    ("S3", "SL2_5"), ("A5", "A5"), ("Q8", "Q8"), ("S4", "C2"), ("A4", "C3"), ("A4", "C2"), ("Dih5", "Dih4"),
    ("C6", "S3"), ("SL2_3", "C3"), ("C4", "Q8"), ("S3", "S3"), ("Dih4", "C4"),
])
def test_hom_to_center_matches_generator_enumeration(src, dst):
    g, h = catalog.group(src), catalog.group(dst)
    hom = hom_to_center_exists(g, h)
    assert (hom is not None) == _brute_hom_to_center(g, h)
    if hom is not None:
        assert hom.is_homomorphism() and not hom.is_trivial()
        assert set(hom.image().elements) <= set(h.center.elements)


def test_s3_into_sl25_hits_the_center():
    hom = hom_to_center_exists(catalog.group("S3"), catalog.group("SL2_5"))
    assert hom.image().order == 2


@pytest.mark.parametrize("name,decomposable", [("C6", True), ("S3", False), ("Q8", False), ("Dih6", True),
                                               ("C4", False), ("A5", False)])
def test_decomposability(name, decomposable):
    g = catalog.group(name)
    w = is_decomposable(g)
    assert (w is not None) == decomposable
    if w:
        a, b = w
        prods = {int(g.table[x, y]) for x in a.elements for y in b.elements}
        assert len(prods) == g.order == a.order * b.order


def test_direct_product_is_decomposable_with_right_order():
    p = direct_product(catalog.group("S3"), catalog.group("C2"))
    assert p.order == 12 and is_decomposable(p) is not None


def test_hom_invariants_are_enforced():
    g = catalog.group("S3")
    with pytest.raises(Exception):
        GroupHom(g, g, np.arange(g.order)[::-1])


def test_abelianization():
    assert abelianization_invariants(catalog.group("S4")) == [2]
    assert abelianization_invariants(catalog.group("A5")) == []
    assert sorted(abelianization_invariants(catalog.group("C6"))) in ([6], [2, 3])


def test_size_guard_fails_fast():
    with pytest.raises(SizeGuardError):
        normal_subgroups(catalog.group("S7"), bound=1000)


def test_group_structure_bridge():
    s5 = catalog.group("S5").structure
    assert evaluate(s5, "(A x)(x*inv(x) = e)")
    assert catalog.group("C2").structure.size == 2


def test_bad_table_rejected():
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1], [0, 1]])


# ------------------------------------------------------------ catalog
@pytest.mark.parametrize("name,order", [
    ("S3", 6), ("S4", 24), ("S5", 120), ("A4", 12), ("A5", 60), ("C7", 7), ("Dih5", 10), ("Dih4", 8), ("Q8", 8),
    ("SL2_3", 24), ("SL2_5", 120), ("GL2_3", 48), ("GL2_2", 6), ("GL3_2", 168), ("SL2_4", 60),
])
def test_catalog_orders_follow_closed_forms(name, order):
    assert catalog.group(name).order == order


def test_sl25_center_order_two():
    assert catalog.group("SL2_5").center.order == 2


def test_gl22_and_s3_share_class_fingerprint():
    fp = lambda g: sorted(len(c) for c in g.conjugacy_classes)
    assert fp(catalog.group("GL2_2")) == fp(catalog.group("S3"))


def test_rps_loser_is_unique():
    m = catalog.rps()
    mul = m.functions["*"]
    for t in range(3):
        assert sum(1 for s in range(3) if s != t and mul[s, t] == t) == 1
    lab = {l: i for i, l in enumerate(m.labels)}
    assert mul[lab["R"], lab["P"]] == lab["P"] and mul[lab["P"], lab["S"]] == lab["S"]
    assert mul[lab["S"], lab["R"]] == lab["R"]
    assert np.array_equal(mul, mul.T)


def test_dihedral_expectations():
    assert catalog.entry("Dih5").expected.outcome == "recognizes"
    assert catalog.entry("Dih4").expected.outcome == "fails"


def test_gl_over_two_carries_anomaly_note():
    assert catalog.entry("GL2_2").expected.anomaly
    assert not catalog.entry("GL2_3").expected.anomaly


@pytest.mark.parametrize("bad", ["S", "Q6", "SL2", "X4", "RPS3", "C3_2", ""])
def test_bad_catalog_names(bad):
    with pytest.raises(CatalogError):
        catalog.entry(bad)


def test_catalog_listing_builds():
    for e in catalog.list_entries():
        if e.name in ("S7", "GL3_2", "A6"):
            continue
        obj = catalog.get(e.name)
        assert obj is catalog.get(e.name)


def test_permutation_labels_round_trip():
    g = catalog.group("S4")
    for a in range(g.order):
        assert g.element(g.labels[a]) == a


def test_load_group_from_table_and_permutations(tmp_path):
    g = catalog.load_group({"table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]], "name": "Z3"})
    assert g.order == 3 and g.is_abelian()
    h = catalog.load_group({"permutations": ["(12)", "(123)"], "degree": 3})
    assert h.order == 6 and not h.is_abelian()
    p = tmp_path / "g.json"
    p.write_text('{"permutations": ["(1234)", "(13)"], "degree": 4}')
    assert catalog.load_group(str(p)).order == 8
    with pytest.raises(GroupError):
        catalog.load_group({"nothing": 1})


def test_factorial_orders_for_symmetric_family():
    for n in range(2, 7):
        assert catalog.group(f"S{n}").order == math.factorial(n)
