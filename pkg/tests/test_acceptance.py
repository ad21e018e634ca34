"""Acceptance suite: one block per criterion.

Every test records its outcome under a criterion number and the terminal
summary prints one PASS/FAIL line per criterion (see conftest.py). The
criteria that cannot hold as stated are strict xfails; the parts of them
that do hold are asserted by separate tests.
"""
import itertools
import random
import time
from collections import defaultdict

import numpy as np
import pytest

from coordlens import catalog
from coordlens import paperchecks as pc
from coordlens.criteria import (StarTable, class_verdict, crit_p, group_verdict, satisfies_dagger, structure_verdict,
                                transported_formula, verify_perfect_star)
from coordlens.graphprod import (complete_graph_oracle, conjugate, conjugate_to_vertex, head_tail, inverse,
                                 is_reduced, make_spec, multiply, normal_form, random_spec, random_word, rc_classify)
from coordlens.groups import (commutator_width, is_nilpotent, is_perfect, nilpotent_center_hom, normal_subgroups)
from coordlens.groups.core import commutator_subgroup
from coordlens.logic import definable_set, equivalent_in
from coordlens.logic.structure import pure_set
from coordlens.logic.reference import naive_holds
from coordlens.paperchecks.structures import ZSUPP_TARGET, ZSUPP_VARS, zsupp_text
from coordlens.paperchecks.symmetric import two_cycle_text
from coordlens.reduced import (LosPreconditionError, defines_support_relation, largest_S_support, los_exhaustive,
                               make_ideal, reduced_product, supp_phi, support_identities)

from gen import random_formula, random_h_formula, random_instance

# criterion -> list of (part, passed, detail)
RESULTS: dict[int, list[tuple[str, bool, str]]] = defaultdict(list)


def record(n: int, part: str, ok: bool, detail: str = "") -> bool:
    RESULTS[n].append((part, bool(ok), detail))
    return ok


def summary_lines() -> list[str]:
    lines = []
    for n in range(1, 11):
        parts = RESULTS.get(n)
        if not parts:
            lines.append(f"criterion {n:2d}: NOT RUN")
            continue
        bad = [p for p in parts if not p[1]]
        status = "PASS" if not bad else "FAIL"
        note = "; ".join(f"{p}: {d}" if d else p for p, _, d in (bad or parts))
        lines.append(f"criterion {n:2d}: {status}  ({note})")
    return lines


def _cycle_type(perm) -> tuple[int, ...]:
    seen, out = set(), []
    for s in range(len(perm)):
        if s in seen:
            continue
        n, x = 0, s
        while x not in seen:
            seen.add(x)
            x, n = perm[x], n + 1
        if n > 1:
            out.append(n)
    return tuple(sorted(out))


# ------------------------------------------------------------ 1: symmetric-group formula
EXPECTED_SIZES = {3: 4, 4: 7, 5: 11, 6: 31, 7: 22}


def _two_cycle_sets(n):
    g = catalog.group(f"S{n}")
    got = {x for (x,) in definable_set(g.structure, two_cycle_text(), ["z"])}
    wanted = {(), (2,)} | ({(2, 2, 2)} if n == 6 else set())
    expected = {i for i, p in enumerate(g.permutations) if _cycle_type(list(p)) in wanted}
    return got, expected


@pytest.mark.parametrize("n", [3, 5, 6, 7])
def test_c1_two_cycle_sets_exact(n):
    got, expected = _two_cycle_sets(n)
    assert len(expected) == EXPECTED_SIZES[n]
    ok = record(1, f"S{n}", got == expected, f"{len(got)} elements")
    assert ok


@pytest.mark.xfail(strict=True, reason="in S4 the formula also accepts the three double transpositions (10, not 7)")
def test_c1_two_cycle_set_s4():
    got, expected = _two_cycle_sets(4)
    ok = record(1, "S4", got == expected, f"{len(got)} elements, expected {len(expected)}")
    assert ok


# ------------------------------------------------------------ 2: transfer to reduced products
def test_c2_los_500_instances():
    rng = random.Random(99)
    start = time.perf_counter()
    done = failures = 0
    while done < 500:
        factors, ideal = random_instance(rng, max_k=4)
        if max(f.size for f in factors) > 5:
            continue
        rp = reduced_product(factors, ideal)
        phi = random_h_formula(rng, rp.signature, ["x", "y"][: rng.randint(1, 2)], rng.randint(0, 4))
        if len(phi.free_vars) > 2:
            continue
        try:
            ok, _ = los_exhaustive(rp, phi)
        except LosPreconditionError:
            continue
        failures += not ok
        done += 1
    secs = time.perf_counter() - start
    assert record(2, "los", failures == 0 and secs <= 120, f"{done} instances, {failures} failures, {secs:.1f}s")


# ------------------------------------------------------------ 3: padded existential formula
@pytest.mark.xfail(strict=True, reason="the padding element may coincide with z or w; literal formula not equivalent")
def test_c3_zsupp_literal():
    ok = True
    for n in (3, 4, 5):
        res = equivalent_in(pure_set(n), zsupp_text(), ZSUPP_TARGET, ZSUPP_VARS)
        ok &= record(3, f"size {n}", res.equivalent, "" if res.equivalent else f"counterexample {res.counterexample}")
    assert ok


def test_c3_padding_avoiding_z_w_is_equivalent():
    # recorded under criterion 3 only as a note; the criterion itself concerns the literal formula
    for n in (3, 4, 5):
        assert equivalent_in(pure_set(n), zsupp_text(("z", "w")), ZSUPP_TARGET, ZSUPP_VARS).equivalent


# ------------------------------------------------------------ 4: Boolean supports
def _direct_support(rp, phi, elems, variables):
    mask = 0
    for i, f in enumerate(rp.factors):
        env = {v: rp.tuple_of(a)[i] for v, a in zip(variables, elems)}
        if naive_holds(f, phi, env):
            mask |= 1 << i
    return rp.algebra.element(mask)


def test_c4_support_identities_and_largest_support():
    rng = random.Random(4)
    start = time.perf_counter()
    done = largest = mismatches = 0
    while done < 200:
        factors, ideal = random_instance(rng, max_k=3)
        rp = reduced_product(factors, ideal)
        variables = ("x", "y")
        phi = random_formula(rng, rp.signature, list(variables), 2)
        psi = random_formula(rng, rp.signature, list(variables), 2)
        elems = [rng.randrange(rp.size) for _ in variables]
        direct = _direct_support(rp, phi, elems, variables)
        mismatches += supp_phi(rp, phi, elems, variables, check=True) != direct
        mismatches += not all(support_identities(rp, phi, psi, elems, variables).values())
        h = random_h_formula(rng, rp.signature, ["x"], 2)
        if h.free_vars == {"x"}:
            try:
                r = largest_S_support(rp, h, elems[:1], ("x",))
            except (ValueError, LosPreconditionError):
                pass
            else:
                mismatches += not r.agrees or r.largest != _direct_support(rp, h, elems[:1], ("x",))
                largest += 1
        done += 1
    secs = time.perf_counter() - start
    assert record(4, "supports", mismatches == 0 and largest >= 50 and secs <= 30,
                  f"{done} instances, {largest} largest-support checks, {mismatches} mismatches, {secs:.1f}s")


# ------------------------------------------------------------ 5: catalog verdicts
RECOGNIZES = ["A5", "Dih3", "Dih5", "Dih7", "SL2_5", "SL2_7"]
FAILS = ["Q8", "Dih4", "Dih6", "Dih8", "C2", "C3", "C4", "C5", "C6", "S2", "GL2_3"]


@pytest.mark.parametrize("name", RECOGNIZES + ["RPS"])
def test_c5_recognized(name):
    obj = catalog.get(name)
    v = structure_verdict(obj) if name == "RPS" else group_verdict(obj)
    ok = v.outcome == "recognizes" and v.certificates and all(c.passed for c in v.certificates)
    assert record(5, name, ok, f"{v.outcome} ({v.reason})")


@pytest.mark.parametrize("name", FAILS)
def test_c5_fails_with_witness(name):
    v = group_verdict(catalog.group(name))
    ok = v.outcome == "fails" and v.obstructions and all(o.reverify() for o in v.obstructions)
    assert record(5, name, ok, f"{v.outcome} ({v.reason})")


def test_c5_class_s3_sl25_fails():
    v = class_verdict([catalog.group("S3"), catalog.group("SL2_5")])
    ok = v.outcome == "fails" and all(o.reverify() for o in v.obstructions)
    assert record(5, "{S3,SL2_5}", ok, f"{v.outcome} ({v.reason})")


def test_c5_gl22_is_flagged_not_failed():
    res = pc.run("criteria.catalog_verdicts", "ci")
    flagged = sorted(i["name"] for i in res.instances if i.get("flagged"))
    assert record(5, "GL2_2 flagged", "GL2_2" in flagged, f"flagged {flagged}")


def test_c5_symmetric_members_individually_recognized():
    members = {f"S{n}": group_verdict(catalog.group(f"S{n}")) for n in range(3, 8)}
    assert all(v.outcome == "recognizes" for v in members.values())


@pytest.mark.xfail(strict=True, reason="no single formula is certified for S3..S7 as a class: the anchored "
                                       "transposition formula fails in S4 and the common criteria do not cover it")
def test_c5_symmetric_class():
    v = class_verdict([catalog.group(f"S{n}") for n in range(3, 8)])
    assert record(5, "S3..S7 class", v.outcome == "recognizes", f"{v.outcome}")


# ------------------------------------------------------------ 6: support-containment definability
@pytest.mark.parametrize("name", ["S3", "Dih5"])
def test_c6_torsion_formula_defines_containment(name):
    g = catalog.group(name)
    cert = crit_p(g, 2)
    assert cert.passed
    rp = reduced_product([g.structure] * 2, make_ideal(2))
    res = defines_support_relation(rp, transported_formula(cert.formula))
    assert record(6, f"{name}^2", res.holds, f"{res.checked} assignments")


@pytest.mark.parametrize("names,gens", [(["S3", "S3"], []), (["C3", "C2", "C3"], [[0]]), (["C2", "C2", "C2"], [])])
def test_c6_naive_implication_refuted(names, gens):
    rp = reduced_product([catalog.group(n).structure for n in names], make_ideal(len(names), gens))
    assert len(rp.algebra.elements) >= 4
    res = defines_support_relation(rp, "x = y -> u = v")
    cex = res.counterexample or {}
    assert record(6, f"naive on {rp.name}", not res.holds and bool(cex),
                  f"formula true with agree(x,y)={cex.get('agree(x,y)')} not inside agree(u,v)={cex.get('agree(u,v)')}")


# ------------------------------------------------------------ 7: graph products
def test_c7_confluence():
    rng = random.Random(7)
    bad = 0
    for _ in range(200):
        s = random_spec(rng, 6)
        w = random_word(s, rng.randint(0, 12), rng)
        want = normal_form(s, w)
        bad += not is_reduced(s, want)
        bad += sum(normal_form(s, w, random.Random(seed)) != want for seed in range(20))
    assert record(7, "confluence", bad == 0, f"{bad} disagreements")


def test_c7_generalities():
    rng = random.Random(8)
    bad = 0
    for _ in range(1000):
        s = random_spec(rng, 5)
        u = normal_form(s, random_word(s, rng.randint(1, 6), rng))
        v = normal_form(s, random_word(s, rng.randint(1, 6), rng))
        uv = multiply(s, u, v)
        bad += len(inverse(s, u)) != len(u) or len(uv) > len(u) + len(v)
        bad += multiply(s, u, inverse(s, u)) != ()
        if u and v:
            hu, hv, huv = head_tail(s, u), head_tail(s, v), head_tail(s, uv)
            if not hu.V & hv.V:
                bad += not (hu.head <= huv.head <= hu.head | hv.head)
    assert record(7, "generalities", bad == 0, f"{bad} violations")


def test_c7_conjugate_to_vertex():
    rng = random.Random(9)
    done = bad = 0
    while done < 100:
        s = random_spec(rng, 5)
        if rc_classify(s).outcome != "recognizes" or max(s.sizes()) < 3:
            continue
        w = normal_form(s, random_word(s, rng.randint(1, 6), rng))
        if not w:
            continue
        v = rng.randrange(s.n)
        r = conjugate_to_vertex(s, w, v)
        ht = head_tail(s, r.conjugate)
        bad += not (ht.L == ht.R == {v} and r.conjugate == conjugate(s, r.conjugator, w))
        done += 1
    assert record(7, "conjugate_to_vertex", bad == 0, f"{done} instances, {bad} violations")


@pytest.mark.parametrize("groups", [["C6"], ["C2", "C3"], ["S3", "C2"], ["C2", "C3", "S3"], ["C4", "C2", "C2"]])
def test_c7_complete_graph_oracle(groups):
    n = len(groups)
    s = make_spec([f"v{i}" for i in range(n)], [(a, b) for a in range(n) for b in range(a + 1, n)], groups)
    prod, value = complete_graph_oracle(s)
    syllables = [[(i, a) for a in range(g.order) if a != g.identity] for i, g in enumerate(s.groups)]
    letters = [x for part in syllables for x in part]
    bad = 0
    # all words of length at most 3 over the generators, multiplied against each other
    words = [w for k in range(4) for w in itertools.product(letters, repeat=k)]
    seen = {}
    for w in words:
        nf = normal_form(s, w)
        x = value(w)
        bad += value(nf) != x or seen.setdefault(x, nf) != nf
    for w1 in words[:80]:
        for w2 in words[:80]:
            bad += value(multiply(s, w1, w2)) != int(prod.table[value(w1), value(w2)])
    bad += len(seen) != prod.order
    assert record(7, "complete " + "x".join(groups), bad == 0, f"{len(words)} words, {bad} mismatches")


# ------------------------------------------------------------ 8: perfect groups
def test_c8_a5_width_one():
    a5 = catalog.group("A5")
    assert record(8, "A5 width", is_perfect(a5) and commutator_width(a5) == 1, f"width {commutator_width(a5)}")


def test_c8_sl25():
    g = catalog.group("SL2_5")
    normals = [n.order for n in normal_subgroups(g)]
    z = g.center
    width = commutator_width(g)
    dagger, _ = satisfies_dagger(g)
    ok = (is_perfect(g) and width <= 2 and normals == [1, 2, 120] and z.order == 2 and dagger
          and commutator_subgroup(g).order == 120)
    assert record(8, "SL2_5", ok, f"width {width}, normal orders {normals}, dagger {dagger}")


def test_c8_star_condition_on_a5():
    a5 = catalog.group("A5")
    table = StarTable(a5, 1)
    # independent evaluation: centralizers of conjugate unions computed directly, cached per class pair
    cache = {}
    ci = a5.class_index

    def cent(z, t):
        key = (int(ci[z]), int(ci[t]))
        if key not in cache:
            union = set(a5.conjugacy_class(z)) | set(a5.conjugacy_class(t))
            cache[key] = frozenset(np.flatnonzero(a5.centralizer_mask(sorted(union))).tolist())
        return cache[key]

    facs = defaultdict(set)
    for z in range(a5.order):
        for t in range(a5.order):
            facs[a5.commutator(z, t)].add(cent(z, t))
    bad = 0
    for a in range(a5.order):
        for b in range(a5.order):
            brute = all(any(x <= y for y in facs[b]) for x in facs[a])
            bad += brute != table.holds(a, b) or verify_perfect_star(a5, 1, a, b, table) != brute
    assert record(8, "A5 star pairs", bad == 0, f"{a5.order ** 2} pairs, {bad} disagreements")


# ------------------------------------------------------------ 9: nilpotent obstruction
@pytest.mark.parametrize("name", ["Q8", "Dih4", "Dih8"])
def test_c9_nilpotent_center_hom(name):
    g = catalog.group(name)
    h = nilpotent_center_hom(g)
    ok = (is_nilpotent(g) and not g.is_abelian() and h is not None and h.is_homomorphism() and not h.is_trivial()
          and set(h.image().elements) <= set(g.center.elements))
    assert record(9, name, ok, f"image order {h.image().order if h else 0}")


def test_c9_every_nilpotent_nonabelian_catalog_group_is_covered():
    for name in catalog.LISTED:
        if catalog.entry(name).kind != "group" or name in ("S7", "A6"):
            continue
        g = catalog.group(name)
        if is_nilpotent(g) and not g.is_abelian:
            assert nilpotent_center_hom(g) is not None, name


# ------------------------------------------------------------ 10: RPS and linear order
def test_c10_rps():
    res = pc.run("rps.formulas", "full")
    assert record(10, "RPS", res.passed, res.status)


@pytest.mark.xfail(strict=True, reason="on finite chains the padding element can be the top; the literal order "
                                       "formula is not equivalent to f=k -> g=k")
def test_c10_linear_order():
    res = pc.run("order.formula", "full")
    assert record(10, "LO", res.passed, res.status + (f", counterexample {res.counterexamples[0]['assignment']}"
                                                      if res.counterexamples else ""))
