"""Sufficient criteria and obstructions for recognizing coordinates in finite groups.

Criteria certify that ``x = e -> y = e`` is equivalent to a formula preserved
by reduced products; obstructions exhibit structure (a direct decomposition or
a nontrivial map into a center) that rules recognition out. Neither side is a
complete decision procedure, so ``open`` is a legitimate verdict.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groups.core import (LATTICE_BOUND, FiniteGroup, SizeGuardError, Subgroup, commutator_subgroup,
                          commutator_width, is_nilpotent, normal_subgroups,
                          prime_factors)
from .groups.homs import GroupHom, hom_to_center_exists, is_decomposable, nilpotent_center_hom
from .logic.evaluate import evaluator
from .logic.hformulas import HCertificate, classify_h
from .logic.parser import parse
from .logic.signature import GROUP

SCHEMA = 1
DEFAULT_TIMEOUT = 60.0
STAR_ORDER_BOUND = 120

# x = e -> y = e, in the shapes the criteria certify
CONJ_CENTRALIZER_FORMULA = "(A z)((A t)(x*(t*z*inv(t)) = (t*z*inv(t))*x) -> (A t)(y*(t*z*inv(t)) = (t*z*inv(t))*y))"
TORSION_FORMULA = ("(A z)(((A t)(x*(t*z*inv(t)) = (t*z*inv(t))*x) & {power} = e) "
                   "-> (A t)(y*(t*z*inv(t)) = (t*z*inv(t))*y))")
TRANSPOSITION_FORMULA = "z*z = e & (A g)((z*g*z*inv(g))^6 = e) & (E g)((z*g*z*inv(g))^3 = e)"


def power_term(var: str, k: int) -> str:
    return "*".join([var] * k)


def torsion_formula(p: int) -> str:
    return TORSION_FORMULA.format(power=power_term("z", p))


def transposition_formula() -> str:
    t = TRANSPOSITION_FORMULA
    t = t.replace("(z*g*z*inv(g))^6", power_term("(z*g*z*inv(g))", 6))
    return t.replace("(z*g*z*inv(g))^3", power_term("(z*g*z*inv(g))", 3))


def anchored_formula(anchor: str) -> str:
    """``x' = e -> x = e`` built on a definable anchor set containing the identity."""
    anchor_y = anchor.replace("z", "w")
    rel = lambda a, b: f"(A t)({a}*(t*{b}*inv(t)) = (t*{b}*inv(t))*{a})"
    return (f"(E w)(({anchor_y}) & {rel('x', 'w')}) & "
            f"(A w)((({anchor_y}) & {rel('x', 'w')}) -> {rel('y', 'w')})")


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str
    witness: dict = field(default_factory=dict)
    formula: str | None = None

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {"criterion": self.name, "passed": self.passed, "detail": self.detail, "witness": self.witness}
        if self.formula:
            out["formula"] = self.formula
        return out


def _class_centralizer_trivial(g: FiniteGroup) -> np.ndarray:
    """Per element: is the centralizer of its conjugacy class trivial?"""
    out = np.zeros(g.order, dtype=bool)
    for cls in g.conjugacy_classes:
        out[list(cls)] = g.centralizer_mask(cls).sum() == 1
    return out


def crit_conj_centralizer(g: FiniteGroup) -> CriterionResult:
    trivial = _class_centralizer_trivial(g)
    bad = [a for a in range(g.order) if a != g.identity and not trivial[a]]
    if g.order == 1:
        return CriterionResult("conj-centralizer", False, "trivial group")
    if bad:
        a = bad[0]
        cent = g.class_centralizer(a)
        return CriterionResult("conj-centralizer", False, f"class of {g.labels[a]} has centralizer of order {cent.order}",
                               {"element": g.labels[a], "centralizer": cent.labels()})
    return CriterionResult("conj-centralizer", True, "every nontrivial class has trivial centralizer",
                           formula=CONJ_CENTRALIZER_FORMULA)


def crit_p(g: FiniteGroup, p: int) -> CriterionResult:
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    name = f"crit_p({p})"
    order_p = np.flatnonzero(g.element_orders == p)
    if order_p.size == 0:
        return CriterionResult(name, False, f"no elements of order {p}", {"reason": "no p-torsion"})
    trivial = _class_centralizer_trivial(g)
    bad = [int(a) for a in order_p if not trivial[a]]
    if bad:
        a = bad[0]
        return CriterionResult(name, False, f"class of {g.labels[a]} has a nontrivial centralizer",
                               {"element": g.labels[a], "centralizer": g.class_centralizer(a).labels()})
    generated = bool(g.closure_mask(order_p.tolist()).all())
    return CriterionResult(name, True, f"every element of order {p} has trivial class centralizer",
                           {"order_p_elements": int(order_p.size), "generate_group": generated},
                           formula=torsion_formula(p))


def crit_anchored(g: FiniteGroup, anchor: str = None) -> CriterionResult:
    """Some nontrivial element satisfies the anchor formula and all such have trivial class centralizer.

    With the anchor an h-formula in ``z`` satisfied by ``e``, this makes
    :func:`anchored_formula` equivalent to ``x = e -> y = e``.
    """
    anchor = anchor or transposition_formula()
    name = "anchored"
    cert = classify_h(parse(anchor, GROUP))
    if not isinstance(cert, HCertificate):
        return CriterionResult(name, False, "anchor formula is not in the preserved class")
    truth = evaluator(g.structure, anchor, ("z",)).grid().astype(bool)
    if not truth[g.identity]:
        return CriterionResult(name, False, "anchor formula excludes the identity")
    members = [a for a in np.flatnonzero(truth) if a != g.identity]
    if not members:
        return CriterionResult(name, False, "anchor set is trivial")
    trivial = _class_centralizer_trivial(g)
    bad = [int(a) for a in members if not trivial[a]]
    if bad:
        return CriterionResult(name, False, f"anchor element {g.labels[bad[0]]} has nontrivial class centralizer",
                               {"element": g.labels[bad[0]]})
    return CriterionResult(name, True, f"{len(members)} nontrivial anchor elements, all with trivial class centralizer",
                           {"anchor_size": len(members) + 1}, formula=anchored_formula(anchor))


def _divides_orders(g: FiniteGroup, m: int) -> np.ndarray:
    return m % g.element_orders == 0


def crit_bounded_torsion(g: FiniteGroup, m: int, n: int) -> CriterionResult:
    name = f"bounded-torsion({m},{n})"
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    tors = _divides_orders(g, m)
    elems = np.flatnonzero(tors & (np.arange(g.order) != g.identity))
    tab = g.table
    failures: dict[str, dict] = {}
    # (1) for nontrivial torsion a, b some conjugate of a fails to commute with b
    for a in elems:
        cls = np.asarray(g.conjugacy_class(int(a)))
        hit = next((int(b) for b in elems if np.all(tab[b, cls] == tab[cls, b])), None)
        if hit is not None:
            failures["condition 1"] = {"a": g.labels[int(a)], "b": g.labels[hit]}
            break
    # (2) products of at most n torsion elements cover the group
    reach = np.zeros(g.order, dtype=bool)
    reach[g.identity] = True
    t_idx = np.flatnonzero(tors)
    for _ in range(n):
        cur = np.flatnonzero(reach)
        reach[np.unique(tab[np.ix_(cur, t_idx)])] = True
    if not reach.all():
        failures["condition 2"] = {"element": g.labels[int(np.flatnonzero(~reach)[0])]}
    if elems.size == 0:
        failures["torsion"] = {"reason": "no nontrivial torsion elements"}
    if failures:
        return CriterionResult(name, False, "fails " + ", ".join(sorted(failures)), failures)
    return CriterionResult(name, True, "torsion classes are non-commuting and generate in bounded length")


def satisfies_dagger(g: FiniteGroup, bound: int = LATTICE_BOUND) -> tuple[bool, Subgroup | None]:
    """Every nonabelian normal subgroup has centralizer equal to the center."""
    center = g.center
    for h in normal_subgroups(g, bound):
        if h.is_abelian():
            continue
        if g.centralizer(h.generators()) != center:
            return False, h
    return True, None


def crit_perfect_dagger(g: FiniteGroup, m: int, bound: int = LATTICE_BOUND) -> CriterionResult:
    name = f"perfect-dagger({m})"
    derived = commutator_subgroup(g)
    if derived.order != g.order:
        return CriterionResult(name, False, "not perfect", {"derived_order": derived.order})
    width = commutator_width(g, bound)
    if width > m:
        return CriterionResult(name, False, f"commutator width {width} exceeds {m}", {"width": width})
    ok, h = satisfies_dagger(g, bound)
    if not ok:
        return CriterionResult(name, False, "a nonabelian normal subgroup has a centralizer larger than the center",
                               {"normal_subgroup_order": h.order})
    return CriterionResult(name, True, f"perfect, commutator width {width}, centralizer condition holds",
                           {"width": width, "center_order": g.center.order})


# ------------------------------------------------------ commutator condition
class StarTable:
    """Evaluates the commutator-factorization condition for all pairs at once.

    For each element ``c`` the table holds the set of centralizer masks
    ``C(z_1^G, t_1^G, ..., z_m^G, t_m^G)`` over factorizations
    ``c = [z_1,t_1] ... [z_m,t_m]``. The centralizer depends only on the
    classes involved, which keeps the sets small.
    """

    def __init__(self, g: FiniteGroup, m: int):
        if g.order > STAR_ORDER_BOUND or m > 2 or m < 1:
            raise SizeGuardError(f"commutator condition supports order <= {STAR_ORDER_BOUND}, m <= 2")
        self.group, self.m = g, m
        classes = g.conjugacy_classes
        cmask = [int(sum(1 << int(x) for x in np.flatnonzero(g.centralizer_mask(c)))) for c in classes]
        ci = g.class_index
        tab, inv, n = g.table, g.inverse, g.order
        one: list[set[int]] = [set() for _ in range(n)]
        ar = np.arange(n)
        for z in range(n):
            comm = tab[tab[tab[z, ar], inv[z]], inv[ar]]
            for t in range(n):
                one[comm[t]].add(cmask[ci[z]] & cmask[ci[t]])
        if m == 1:
            self.masks = one
        else:
            two: list[set[int]] = [set() for _ in range(n)]
            for c1 in range(n):
                for c2 in range(n):
                    target = two[tab[c1, c2]]
                    for a in one[c1]:
                        for b in one[c2]:
                            target.add(a & b)
            self.masks = two

    def holds(self, a: int, b: int) -> bool:
        """For every factorization of ``a`` some factorization of ``b`` has a larger centralizer."""
        mb = self.masks[b]
        return all(any((x & ~y) == 0 for y in mb) for x in self.masks[a])


def verify_perfect_star(g: FiniteGroup, m: int, a: int, b: int, table: StarTable | None = None) -> bool:
    """Evaluate the condition at ``(a, b)`` and assert it agrees with ``a = e -> b = e``."""
    table = table or StarTable(g, m)
    value = table.holds(a, b)
    expected = a != g.identity or b == g.identity
    if value != expected:
        raise AssertionError(f"commutator condition disagrees with the implication at ({g.labels[a]}, {g.labels[b]})")
    return value


# -------------------------------------------------------------- obstructions
@dataclass
class Obstruction:
    name: str
    detail: str
    witness: dict
    hom: GroupHom | None = None
    factors: tuple[Subgroup, Subgroup] | None = None

    def to_json(self) -> dict:
        return {"obstruction": self.name, "detail": self.detail, "witness": self.witness}

    def reverify(self) -> bool:
        if self.hom is not None:
            h = self.hom
            if not h.is_homomorphism() or h.is_trivial():
                return False
            return all(x in h.target.center for x in h.image().elements)
        if self.factors is not None:
            a, b = self.factors
            g = a.group
            tab = g.table
            prod = np.zeros(g.order, dtype=bool)
            prod[np.unique(tab[np.ix_(list(a.elements), list(b.elements))])] = True
            inter = a.mask & b.mask
            ea, eb = list(a.elements), list(b.elements)
            return bool(prod.all() and inter.sum() == 1 and a.is_normal() and b.is_normal()
                        and np.array_equal(tab[np.ix_(ea, eb)], tab[np.ix_(eb, ea)].T))
        return False


def obstruction_decomposable(g: FiniteGroup, bound: int = LATTICE_BOUND) -> Obstruction | None:
    pair = is_decomposable(g, bound)
    if pair is None:
        return None
    a, b = pair
    return Obstruction("decomposable", f"internal direct product of normal subgroups of orders {a.order} and {b.order}",
                       {"factors": [a.labels(), b.labels()]}, factors=pair)


def obstruction_nilpotent(g: FiniteGroup) -> Obstruction | None:
    if g.is_abelian():
        if g.order == 1:
            return None
        hom = GroupHom(g, g, np.arange(g.order))
        return Obstruction("nilpotent", "abelian: the identity map lands in the center",
                           {"map": hom.describe()}, hom=hom)
    if not is_nilpotent(g):
        return None
    hom = nilpotent_center_hom(g)
    if hom is None:
        return None
    return Obstruction("nilpotent", f"commutator map into the center with image of order {hom.image().order}",
                       {"map": hom.describe(), "image": hom.image().labels()}, hom=hom)


def obstruction_center_hom(g: FiniteGroup, h: FiniteGroup) -> Obstruction | None:
    hom = hom_to_center_exists(g, h)
    if hom is None:
        return None
    return Obstruction("center-hom", f"nontrivial homomorphism {g.name} -> Z({h.name})",
                       {"source": g.name, "target": h.name, "map": hom.describe(), "image": hom.image().labels()},
                       hom=hom)


# ------------------------------------------------------------------ verdicts
@dataclass
class Verdict:
    groups: list[str]
    outcome: str                   # recognizes | fails | open
    reason: str
    basis: str
    certificates: list[CriterionResult] = field(default_factory=list)
    obstructions: list[Obstruction] = field(default_factory=list)
    members: dict[str, list[str]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    millis: int = 0

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "schema": SCHEMA,
            "groups": self.groups,
            "outcome": self.outcome,
            "reason": self.reason,
            "basis": self.basis,
            "witnesses": [c.to_json() for c in self.certificates] + [o.to_json() for o in self.obstructions],
            "members": self.members,
            "notes": self.notes,
        }
        if timings:
            out["millis"] = self.millis
        return out


BASIS = {
    "conj-centralizer": "every nontrivial conjugacy class has trivial centralizer",
    "crit_p": "p-torsion exists and every element of order p has trivial class centralizer",
    "perfect-dagger": "perfect of bounded commutator width; nonabelian normal subgroups have central centralizers",
    "bounded-torsion": "torsion elements pairwise non-commuting up to conjugacy and generating in bounded length",
    "anchored": "a definable set of transposition-like elements with trivial class centralizers",
    "decomposable": "a nontrivial direct decomposition prevents recognition",
    "nilpotent": "a nilpotent nonabelian group maps nontrivially into its center",
    "center-hom": "a nontrivial homomorphism from one member into the center of another",
}


class _Clock:
    def __init__(self, timeout: float):
        self.start = time.perf_counter()
        self.timeout = timeout

    def expired(self) -> bool:
        return time.perf_counter() - self.start > self.timeout

    def millis(self) -> int:
        return int(1000 * (time.perf_counter() - self.start))


def _obstructions(groups: Sequence[FiniteGroup], bound: int, notes: list[str], clock: _Clock) -> list[Obstruction]:
    for g in groups:
        if g.order > bound:
            notes.append(f"decomposability of {g.name} not checked: order {g.order} exceeds {bound}")
            continue
        d = obstruction_decomposable(g, bound)
        if d:
            return [d]
    for g in groups:
        n = obstruction_nilpotent(g)
        if n:
            return [n]
    for g in groups:
        for h in groups:
            if clock.expired():
                notes.append("time limit reached during the center-hom scan")
                return []
            c = obstruction_center_hom(g, h)
            if c:
                return [c]
    return []


def _uniform(groups, fn, label) -> list[CriterionResult] | None:
    results = []
    for g in groups:
        r = fn(g)
        if not r.passed:
            return None
        results.append(r)
    return results


def _member_criteria(g: FiniteGroup) -> list[str]:
    found = []
    if crit_conj_centralizer(g).passed:
        found.append("conj-centralizer")
    for p in prime_factors(g.order):
        if crit_p(g, p).passed:
            found.append(f"crit_p({p})")
    return found


def class_verdict(groups: Sequence[FiniteGroup], bound: int = LATTICE_BOUND,
                  timeout: float = DEFAULT_TIMEOUT, anchored: bool | None = None) -> Verdict:
    """Verdict for the class of the given finite groups.

    Obstructions are looked for first (decomposition, nilpotency, maps into a
    center for every ordered pair including self-pairs); then uniform
    criteria in a fixed order: conjugacy-class centralizers, crit_p for each
    prime dividing some order, perfect-dagger for m = 1..3, bounded torsion
    for (m, n) in {2,3}^2.
    """
    groups = list(groups)
    clock = _Clock(timeout)
    names = [g.name for g in groups]
    notes: list[str] = []
    obs = _obstructions(groups, bound, notes, clock)
    if obs:
        o = obs[0]
        return Verdict(names, "fails", o.name, BASIS[o.name], obstructions=obs, notes=notes, millis=clock.millis())
    members = {g.name: _member_criteria(g) for g in groups}
    attempts: list[tuple[str, callable]] = [("conj-centralizer", crit_conj_centralizer)]
    primes = sorted({p for g in groups for p in prime_factors(g.order)})
    attempts += [(f"crit_p({p})", lambda g, p=p: crit_p(g, p)) for p in primes]
    small = all(g.order <= bound for g in groups)
    if small:
        attempts += [(f"perfect-dagger({m})", lambda g, m=m: crit_perfect_dagger(g, m, bound)) for m in (1, 2, 3)]
    attempts += [(f"bounded-torsion({m},{n})", lambda g, m=m, n=n: crit_bounded_torsion(g, m, n))
                 for m in (2, 3) for n in (2, 3)]
    winner = None
    for label, fn in attempts:
        if clock.expired():
            notes.append(f"time limit of {timeout:.0f}s reached before trying {label}")
            break
        certs = _uniform(groups, fn, label)
        if certs is not None:
            winner = (label, certs)
            break
    want_anchor = anchored if anchored is not None else all(
        g.name.startswith("S") and g.name[1:].isdigit() and int(g.name[1:]) >= 3 for g in groups)
    if winner is None and want_anchor:
        for g in groups:
            r = crit_anchored(g)
            if not r.passed:
                notes.append(f"transposition-anchored formula fails in {g.name}: {r.detail}")
                break
        else:
            winner = ("anchored", [crit_anchored(g) for g in groups])
    if winner is None:
        if not small:
            notes.append("perfect-dagger not tried: normal-subgroup enumeration exceeds the bound")
        return Verdict(names, "open", "no criterion or obstruction applies",
                       "the criteria are sufficient conditions only", members=members, notes=notes,
                       millis=clock.millis())
    label, certs = winner
    key = label.split("(")[0]
    return Verdict(names, "recognizes", label, BASIS[key], certificates=certs, members=members,
                   notes=notes, millis=clock.millis())


def group_verdict(g: FiniteGroup, **kw) -> Verdict:
    return class_verdict([g], **kw)


# ------------------------------------------------------- structure verdicts
COMPARISON_FORMULA_RPS = "(E s)(s*t=t & (A sp)(sp*t=t -> s*sp=sp) & (x*s)*(y*s)=(y*s))"


def structure_verdict(structure, formula: str = COMPARISON_FORMULA_RPS) -> Verdict:
    """Recognition for a structure via an h-formula equivalent to ``x = t -> y = t``."""
    from .logic.evaluate import equivalent_in
    from .logic.signature import SignatureError
    clock = _Clock(DEFAULT_TIMEOUT)
    name = structure.name or "structure"
    try:
        phi = parse(formula, structure.signature)
    except SignatureError as exc:
        return Verdict([name], "open", "no comparison formula for this signature", "no criterion applies",
                       notes=[str(exc)], millis=clock.millis())
    cert = classify_h(phi)
    target = parse("x=t -> y=t", structure.signature)
    if structure.size < 3:
        return Verdict([name], "open", "too small", "comparison formulas need three elements",
                       millis=clock.millis())
    res = equivalent_in(structure, phi, target, ["x", "y", "t"])
    if isinstance(cert, HCertificate) and (not cert.obligations or cert.discharged_in([structure])) and res.equivalent:
        c = CriterionResult("comparison-formula", True, "h-formula equivalent to x=t -> y=t",
                            {"checked": res.checked}, formula=formula)
        return Verdict([name], "recognizes", "comparison-formula",
                       "an h-formula expresses x=t -> y=t", certificates=[c], millis=clock.millis())
    return Verdict([name], "open", "comparison formula not certified", "no criterion applies",
                   notes=[f"counterexample: {res.counterexample}"] if res.counterexample else [],
                   millis=clock.millis())


def transported_formula(formula: str, x: str = "x", y: str = "y") -> str:
    """Replace ``x``/``y`` in an ``x = e -> y = e`` formula by ``x*inv(y)``/``u*inv(v)``."""
    from .logic.formula import App, Var, substitute
    phi = parse(formula, GROUP)
    a = App("*", (Var("x"), App("inv", (Var("y"),))))
    b = App("*", (Var("u"), App("inv", (Var("v"),))))
    phi = substitute(phi, {x: Var("__a"), y: Var("__b")})
    return substitute(phi, {"__a": a, "__b": b})


__all__ = [
    "BASIS", "COMPARISON_FORMULA_RPS", "CONJ_CENTRALIZER_FORMULA", "DEFAULT_TIMEOUT", "CriterionResult", "Obstruction", "StarTable", "Verdict",
    "anchored_formula", "class_verdict", "crit_anchored", "crit_bounded_torsion", "crit_conj_centralizer",
    "crit_p", "crit_perfect_dagger", "group_verdict", "obstruction_center_hom", "obstruction_decomposable",
    "obstruction_nilpotent", "satisfies_dagger", "structure_verdict", "torsion_formula",
    "transported_formula", "transposition_formula", "verify_perfect_star",
]
