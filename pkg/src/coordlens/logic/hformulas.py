"""Recognition of the formula class preserved by reduced products.

The class is built from atomic formulas with conjunction, both quantifiers
and the guarded universal ``(E x)phi & (A x)(phi -> psi)``. A bare
``(A x)(phi -> psi)`` is also accepted, but then ``(E x)phi`` is recorded as
an obligation the ambient theory has to prove.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .formula import (ATOMIC, And, Exists, Forall, Imp, alpha_equal, forall)
from .structure import FiniteStructure


@dataclass(frozen=True)
class Derivation:
    rule: str
    formula: object
    children: tuple["Derivation", ...] = ()
    var: str | None = None


@dataclass(frozen=True)
class HCertificate:
    formula: object
    derivation: Derivation
    obligations: tuple = field(default=())

    ok = True

    def obligation_sentences(self) -> list:
        """Each obligation universally closed over its remaining free variables."""
        return [forall(sorted(ob.free_vars), ob) for ob in self.obligations]

    def replay(self):
        return _rebuild(self.derivation)

    def verify(self) -> bool:
        """Rebuild the formula from the derivation and compare up to bound names."""
        return alpha_equal(self.replay(), self.formula) and _check_rules(self.derivation)

    def discharged_in(self, structures: Iterable[FiniteStructure]) -> bool:
        from .evaluate import evaluate
        return all(evaluate(m, s) for m in structures for s in self.obligation_sentences())


@dataclass(frozen=True)
class HRefusal:
    formula: object
    blocking: object
    path: tuple[str, ...]
    reason: str

    ok = False


def _rebuild(d: Derivation):
    if d.rule == "atomic":
        return d.formula
    kids = [_rebuild(c) for c in d.children]
    if d.rule == "and":
        return And(kids[0], kids[1])
    if d.rule == "exists":
        return Exists(d.var, kids[0])
    if d.rule == "forall":
        return Forall(d.var, kids[0])
    if d.rule == "guarded-forall":
        return Forall(d.var, Imp(kids[0], kids[1]))
    if d.rule == "guarded":
        guard, again, body = kids
        return And(Exists(d.var, guard), Forall(d.formula.right.var, Imp(again, body)))
    raise ValueError(f"unknown rule {d.rule!r}")


def _check_rules(d: Derivation) -> bool:
    phi = d.formula
    if d.rule == "atomic":
        ok = isinstance(phi, ATOMIC)
    elif d.rule == "and":
        ok = isinstance(phi, And)
    elif d.rule in ("exists", "forall"):
        ok = isinstance(phi, Exists if d.rule == "exists" else Forall) and phi.var == d.var
    elif d.rule == "guarded-forall":
        ok = isinstance(phi, Forall) and isinstance(phi.body, Imp)
    elif d.rule == "guarded":
        ok = _is_guarded(phi)
    else:
        ok = False
    return ok and all(_check_rules(c) for c in d.children)


def _is_guarded(phi) -> bool:
    if not (isinstance(phi, And) and isinstance(phi.left, Exists) and isinstance(phi.right, Forall)
            and isinstance(phi.right.body, Imp)):
        return False
    guard = Exists(phi.right.var, phi.right.body.left)
    return alpha_equal(phi.left, guard)


def classify_h(phi) -> HCertificate | HRefusal:
    """Certificate of membership, or the first node (pre-order) that blocks it."""
    obligations: list = []
    result = _classify(phi, (), obligations)
    if isinstance(result, HRefusal):
        return HRefusal(phi, result.blocking, result.path, result.reason)
    return HCertificate(phi, result, tuple(obligations))


def _classify(phi, path, obligations):
    if isinstance(phi, ATOMIC):
        return Derivation("atomic", phi)
    if isinstance(phi, And):
        if _is_guarded(phi):
            guard = _classify(phi.left.body, path + ("left", "body"), obligations)
            if isinstance(guard, HRefusal):
                return guard
            again = _classify(phi.right.body.left, path + ("right", "body", "left"), obligations)
            if isinstance(again, HRefusal):
                return again
            body = _classify(phi.right.body.right, path + ("right", "body", "right"), obligations)
            if isinstance(body, HRefusal):
                return body
            return Derivation("guarded", phi, (guard, again, body), phi.left.var)
        left = _classify(phi.left, path + ("left",), obligations)
        if isinstance(left, HRefusal):
            return left
        right = _classify(phi.right, path + ("right",), obligations)
        if isinstance(right, HRefusal):
            return right
        return Derivation("and", phi, (left, right))
    if isinstance(phi, Exists):
        body = _classify(phi.body, path + ("body",), obligations)
        if isinstance(body, HRefusal):
            return body
        return Derivation("exists", phi, (body,), phi.var)
    if isinstance(phi, Forall):
        if isinstance(phi.body, Imp):
            local: list = []
            guard = _classify(phi.body.left, path + ("body", "left"), local)
            if isinstance(guard, HRefusal):
                return guard
            body = _classify(phi.body.right, path + ("body", "right"), local)
            if isinstance(body, HRefusal):
                return body
            obligations.extend(local)
            obligations.append(Exists(phi.var, phi.body.left))
            return Derivation("guarded-forall", phi, (guard, body), phi.var)
        body = _classify(phi.body, path + ("body",), obligations)
        if isinstance(body, HRefusal):
            return body
        return Derivation("forall", phi, (body,), phi.var)
    kind = type(phi).__name__.lower()
    reasons = {
        "not": "negation is not allowed",
        "or": "disjunction is not allowed",
        "iff": "biconditional is not allowed",
        "imp": "implication is only allowed directly under a universal quantifier",
    }
    return HRefusal(phi, phi, path, reasons.get(kind, f"{kind} is not allowed"))
