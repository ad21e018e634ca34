import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coordlens import catalog
from coordlens.kernel import available_backends
from coordlens.logic import (GROUP, MAGMA, ORDER, PURE, And, Eq, Exists, Forall, HCertificate, HRefusal, Imp,
                             ParseError, SignatureError, Var, alpha_equal, classify_h, definable_set,
                             equivalent_in, evaluate, evaluator, parse, pure_set, to_text)
from coordlens.logic.evaluate import Evaluator
from coordlens.logic.reference import naive_holds

from gen import random_formula, random_h_formula, random_structure

SIGS = {"pure": PURE, "magma": MAGMA, "order": ORDER}


# ------------------------------------------------------------ parser
@pytest.mark.parametrize("text", [
    "x = y",
    "(E x)(x*y = y*x)",
    "(A x)(x = e -> inv(x) = e)",
    "!(x = y) | x*x = e <-> (A z)(z*x = x*z)",
    "x*y*z = (x*y)*z & inv(inv(x)) = x",
])
def test_print_then_parse_is_identity_up_to_bound_names(text):
    phi = parse(text, GROUP)
    assert alpha_equal(parse(to_text(phi), GROUP), phi)


def test_implication_binds_weaker_than_conjunction():
    phi = parse("x=y & y=z -> x=z")
    assert isinstance(phi, Imp) and isinstance(phi.left, And)


def test_bound_variables_are_renamed_apart():
    phi = parse("(E x)(x=y) & (A x)(x=x)")
    assert phi.left.var != phi.right.var
    assert phi.free_vars == {"y"}


@pytest.mark.parametrize("bad", ["(A x)(x=", "x = = y", "x & ", "(E X)(X=y)", "inv(x,y) = e", ""])
def test_malformed_text_raises_parse_error(bad):
    with pytest.raises((ParseError, SignatureError)):
        parse(bad, GROUP)


def test_unknown_symbol_rejected_by_signature():
    with pytest.raises(SignatureError):
        parse("le(x,y)", GROUP)
    with pytest.raises(SignatureError):
        parse("x*y = y", ORDER)


# ------------------------------------------------------------ evaluation vs oracle
def _oracle_grid(m, phi, order):
    return np.array([naive_holds(m, phi, dict(zip(order, vals)))
                     for vals in itertools.product(range(m.size), repeat=len(order))], dtype=bool)


@given(seed=st.integers(0, 2 ** 32 - 1), kind=st.sampled_from(sorted(SIGS)), size=st.integers(1, 4),
       depth=st.integers(0, 4))
def test_every_backend_matches_recursive_oracle(seed, kind, size, depth):
    rng = random.Random(seed)
    m = random_structure(rng, SIGS[kind], size)
    phi = random_formula(rng, SIGS[kind], ["x", "y"], depth)
    order = tuple(sorted(phi.free_vars))
    want = _oracle_grid(m, phi, order)
    for backend in available_backends():
        got = Evaluator(m, phi, order, backend=backend).grid().astype(bool)
        assert np.array_equal(got, want), (backend, to_text(phi))


@given(seed=st.integers(0, 2 ** 32 - 1), depth=st.integers(1, 3))
def test_group_formulas_match_oracle(seed, depth):
    rng = random.Random(seed)
    g = catalog.group(rng.choice(["S3", "C4", "Q8", "Dih4"]))
    phi = random_formula(rng, GROUP, ["x", "y"], depth)
    order = tuple(sorted(phi.free_vars))
    got = evaluator(g.structure, phi, order).grid().astype(bool)
    assert np.array_equal(got, _oracle_grid(g.structure, phi, order))


def test_rows_and_holds_agree_with_grid():
    g = catalog.group("S4")
    ev = evaluator(g.structure, "(E z)(z*x*inv(z) = y)", ("x", "y"))
    grid = ev.grid().reshape(24, 24)
    rows = np.array([[a, b] for a in range(24) for b in range(0, 24, 5)], dtype=np.int32)
    assert np.array_equal(ev.rows(rows).astype(bool), grid[rows[:, 0], rows[:, 1]])
    assert all(ev.holds((a, b)) == grid[a, b] for a, b in rows[:40])


def test_conjugacy_relation_gives_class_partition():
    g = catalog.group("S4")
    pairs = definable_set(g.structure, "(E z)(z*x*inv(z) = y)", ("x", "y"))
    assert len(pairs) == sum(len(c) ** 2 for c in g.conjugacy_classes)


def test_evaluate_accepts_labels():
    g = catalog.group("S3")
    assert evaluate(g.structure, "x*x = e", {"x": "(12)"})
    assert not evaluate(g.structure, "x*x = e", {"x": "(123)"})


def test_equivalent_in_returns_least_counterexample():
    m = pure_set(3)
    res = equivalent_in(m, "x = z -> y = z", "x = y", ("x", "y", "z"))
    assert not res.equivalent and res.checked == 27
    assert res.counterexample == {"x": 0, "y": 1, "z": 1}
    assert equivalent_in(m, "(A q)(x = y -> q = y)", "!(x = y)", ("x", "y")).equivalent


def test_inequality_claim_on_three_element_set():
    """(A z)(x=y -> z=y) expresses x != y once there are two elements."""
    for n in (2, 3, 4):
        assert equivalent_in(pure_set(n), "(A z)(x=y -> z=y)", "!(x=y)", ("x", "y")).equivalent
    assert not equivalent_in(pure_set(1), "(A z)(x=y -> z=y)", "!(x=y)", ("x", "y")).equivalent


# ------------------------------------------------------------ h-formula classification
@pytest.mark.parametrize("text", [
    "x = y",
    "(E z)(x*z = y) & (A w)(w*x = x*w)",
    "(A z)(z*z = e -> z*x = x*z)",
    "(E u)(u = x) & (A u)(u = x -> u*y = y*u)",
])
def test_h_formulas_get_verified_certificates(text):
    cert = classify_h(parse(text, GROUP))
    assert isinstance(cert, HCertificate)
    assert cert.verify()


@pytest.mark.parametrize("text,reason", [
    ("!(x = y)", "negation"),
    ("x = y | y = e", "disjunction"),
    ("x = y <-> y = e", "biconditional"),
    ("x = y -> y = e", "implication"),
])
def test_refusals_name_the_blocking_connective(text, reason):
    r = classify_h(parse(text, GROUP))
    assert isinstance(r, HRefusal)
    assert reason in r.reason


def test_guarded_universal_records_its_obligation():
    cert = classify_h(parse("(A z)(z = x -> z*z = e)", GROUP))
    assert isinstance(cert, HCertificate)
    (ob,) = cert.obligation_sentences()
    assert isinstance(ob, Forall) and evaluate(catalog.group("C2").structure, ob)


@given(seed=st.integers(0, 2 ** 32 - 1), depth=st.integers(0, 4))
def test_generated_h_formulas_are_certified(seed, depth):
    rng = random.Random(seed)
    phi = random_h_formula(rng, MAGMA, ["x", "y"], depth)
    cert = classify_h(phi)
    assert isinstance(cert, HCertificate) and cert.verify()


def test_variable_and_term_nodes_are_hashable_and_shared():
    a = Eq(Var("x"), Var("y"))
    assert hash(a) == hash(Eq(Var("x"), Var("y")))
    assert Exists("x", a).free_vars == {"y"}
