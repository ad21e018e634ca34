import itertools
import random

import pytest

from coordlens.graphprod import (GraphProductError, complete_graph_oracle, conjugate, conjugate_to_vertex,
                                 format_word, head_tail, inverse, is_reduced, load_spec, make_spec, multiply,
                                 normal_form, parse_word, random_spec, random_word, rc_classify)


def edge_c2():
    return make_spec(["u", "v"], [("u", "v")], ["C2", "C2"])


def free_c2():
    return make_spec(["u", "v"], [], ["C2", "C2"])


# ------------------------------------------------------------ normal forms
def test_commuting_pair_cancels():
    s = edge_c2()
    assert format_word(s, normal_form(s, parse_word(s, "u:1 * v:1 * u:1"))) == "v:1"


def test_free_product_word_is_already_normal():
    s = free_c2()
    w = parse_word(s, "u:1 * v:1 * u:1 * v:1")
    assert normal_form(s, w) == w and len(normal_form(s, w)) == 4


def test_empty_word():
    assert normal_form(edge_c2(), ()) == ()
    assert parse_word(edge_c2(), "e") == ()


def _free_reduce(spec, w):
    """Stack-based reduction, valid when no two vertices commute."""
    out = []
    for v, a in w:
        if out and out[-1][0] == v:
            b = int(spec.groups[v].table[out[-1][1], a])
            out.pop()
            if b != spec.groups[v].identity:
                out.append((v, b))
        else:
            out.append((v, a))
    return tuple(out)


def test_free_products_match_stack_reduction():
    rng = random.Random(3)
    for _ in range(300):
        s = random_spec(rng, 4, density=0.0)
        w = random_word(s, rng.randint(0, 14), rng)
        assert normal_form(s, w) == _free_reduce(s, w)


def test_rewriting_is_confluent():
    rng = random.Random(11)
    for _ in range(200):
        s = random_spec(rng, 6)
        w = random_word(s, rng.randint(0, 12), rng)
        want = normal_form(s, w)
        assert is_reduced(s, want)
        for seed in range(20):
            assert normal_form(s, w, random.Random(seed)) == want


@pytest.mark.parametrize("n", [1, 2, 3])
def test_complete_graph_agrees_with_direct_product(n):
    groups = ["C2", "C3", "S3"][:n]
    s = make_spec([f"v{i}" for i in range(n)], [(a, b) for a in range(n) for b in range(a + 1, n)], groups)
    prod, value = complete_graph_oracle(s)
    rng = random.Random(n)
    seen = {}
    for _ in range(400):
        w1, w2 = random_word(s, rng.randint(0, 6), rng), random_word(s, rng.randint(0, 6), rng)
        nf = multiply(s, w1, w2)
        assert value(nf) == int(prod.table[value(w1), value(w2)])
        # equal elements have equal normal forms
        seen.setdefault(value(nf), nf)
        assert seen[value(nf)] == nf
    # normal forms are exhaustive over one syllable per vertex
    elems = set()
    for choice in itertools.product(*[range(g.order) for g in s.groups]):
        w = [(i, a) for i, a in enumerate(choice) if a != s.groups[i].identity]
        elems.add(normal_form(s, w))
    assert len(elems) == prod.order


def test_generalities_on_random_pairs():
    rng = random.Random(5)
    for _ in range(1000):
        s = random_spec(rng, 5)
        u = normal_form(s, random_word(s, rng.randint(1, 6), rng))
        v = normal_form(s, random_word(s, rng.randint(1, 6), rng))
        assert len(inverse(s, u)) == len(u)
        uv = multiply(s, u, v)
        assert len(uv) <= len(u) + len(v)
        if not u or not v:
            continue
        hu, hv, huv = head_tail(s, u), head_tail(s, v), head_tail(s, uv)
        if not hu.V & hv.V:
            assert hu.head <= huv.head <= hu.head | hv.head


def test_head_tail_examples():
    s = free_c2()
    ht = head_tail(s, parse_word(s, "u:1 * v:1 * u:1 * v:1"))
    assert ht.L == {0} and ht.R == {1} and ht.length == 4
    e = edge_c2()
    ht = head_tail(e, normal_form(e, parse_word(e, "u:1 * v:1")))
    assert ht.L == ht.R == {0, 1}
    one = head_tail(s, parse_word(s, "u:1"))
    assert one.L == one.R == one.V == {0}
    with pytest.raises(GraphProductError):
        head_tail(s, parse_word(s, "u:1 * u:1"))


# ------------------------------------------------------------ conjugation
def test_free_product_conjugator_example():
    s = make_spec(["u", "v"], [], ["C3", "C2"])
    w = parse_word(s, "v:1")
    r = conjugate_to_vertex(s, w, "u")
    ht = head_tail(s, r.conjugate)
    assert ht.L == ht.R == {0}
    assert r.conjugate == conjugate(s, r.conjugator, w)


def test_already_at_vertex_needs_no_conjugator():
    s = make_spec(["u", "v"], [], ["C3", "C2"])
    r = conjugate_to_vertex(s, parse_word(s, "u:1 * v:1 * u:1"), "u")
    assert r.conjugator == ()


def test_conjugation_hypotheses_checked():
    s = make_spec(["u", "v"], [("u", "v")], ["C3", "C2"])
    with pytest.raises(GraphProductError):
        conjugate_to_vertex(s, parse_word(s, "u:1"), "u")
    with pytest.raises(GraphProductError):
        conjugate_to_vertex(free_c2(), parse_word(free_c2(), "u:1"), "v")
    with pytest.raises(GraphProductError):
        conjugate_to_vertex(make_spec(["u", "v"], [], ["C3", "C2"]), (), "u")


def test_conjugate_to_vertex_on_random_instances():
    rng = random.Random(17)
    done = 0
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
        assert ht.L == ht.R == {v}
        assert r.conjugate == conjugate(s, r.conjugator, w)
        done += 1


# ------------------------------------------------------------ classification
def test_classification_examples():
    path = rc_classify(3, [(0, 1), (1, 2)], [2, 3, 2], ["u", "v", "w"])
    assert path.outcome == "decomposable" and path.witness == {"X": ["v"], "Y": ["u", "w"]}
    assert rc_classify(2, [], [3, 2]).outcome == "recognizes"
    assert rc_classify(2, [], [2, 2]).outcome == "recognizes"
    assert rc_classify(4, [(0, 2)], [2, 2, 2, 2]).outcome == "open-RACG"
    with pytest.raises(GraphProductError):
        rc_classify(2, [], [1, 2])


def test_decomposable_witness_splits_commuting_halves():
    rng = random.Random(9)
    for _ in range(200):
        s = random_spec(rng, 6)
        c = rc_classify(s)
        if c.outcome != "decomposable":
            continue
        x = [s.vertex(v) for v in c.witness["X"]]
        y = [s.vertex(v) for v in c.witness["Y"]]
        assert all(s.commute(a, b) for a in x for b in y)


def test_spec_validation_and_loading(tmp_path):
    with pytest.raises(GraphProductError):
        make_spec(["u", "v"], [("u", "u")], ["C2", "C2"])
    with pytest.raises(GraphProductError):
        make_spec(["u"], [], ["C2", "C3"])
    p = tmp_path / "g.json"
    p.write_text('{"vertices": ["a", "b"], "edges": [], "groups": {"a": "C3", "b": "C2"}}')
    s = load_spec(str(p))
    assert s.sizes() == [3, 2]
    with pytest.raises(GraphProductError):
        load_spec({"vertices": ["a"]})
    with pytest.raises(GraphProductError):
        parse_word(s, "a1")
