"""Immutable syntax trees for terms and formulas."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping


# ---------------------------------------------------------------- terms
@dataclass(frozen=True)
class Var:
    name: str

    @property
    def free_vars(self) -> frozenset[str]:
        return frozenset((self.name,))


@dataclass(frozen=True)
class Const:
    name: str

    @property
    def free_vars(self) -> frozenset[str]:
        return frozenset()


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple["Term", ...]
    _fv: frozenset = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "_fv", frozenset().union(*(a.free_vars for a in self.args)))

    @property
    def free_vars(self) -> frozenset[str]:
        return self._fv


Term = Var | Const | App


# ------------------------------------------------------------- formulas
class _Node:
    __slots__ = ()

    @property
    def free_vars(self) -> frozenset[str]:
        return self._fv

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Eq(_Node):
    left: Term
    right: Term
    _fv: frozenset = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_fv", self.left.free_vars | self.right.free_vars)


@dataclass(frozen=True)
class Rel(_Node):
    name: str
    args: tuple[Term, ...]
    _fv: frozenset = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "_fv", frozenset().union(*(a.free_vars for a in self.args)))


@dataclass(frozen=True)
class Truth(_Node):
    value: bool
    _fv: frozenset = field(default=frozenset(), compare=False, repr=False)


@dataclass(frozen=True)
class Not(_Node):
    body: "Formula"
    _fv: frozenset = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_fv", self.body.free_vars)


@dataclass(frozen=True)
class _Binary(_Node):
    left: "Formula"
    right: "Formula"
    _fv: frozenset = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_fv", self.left.free_vars | self.right.free_vars)


@dataclass(frozen=True)
class And(_Binary):
    pass


@dataclass(frozen=True)
class Or(_Binary):
    pass


@dataclass(frozen=True)
class Imp(_Binary):
    pass


@dataclass(frozen=True)
class Iff(_Binary):
    pass


@dataclass(frozen=True)
class _Quant(_Node):
    var: str
    body: "Formula"
    _fv: frozenset = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_fv", self.body.free_vars - {self.var})


@dataclass(frozen=True)
class Exists(_Quant):
    pass


@dataclass(frozen=True)
class Forall(_Quant):
    pass


Formula = Eq | Rel | Truth | Not | And | Or | Imp | Iff | Exists | Forall
ATOMIC = (Eq, Rel, Truth)
BINARY = (And, Or, Imp, Iff)
QUANTIFIERS = (Exists, Forall)


# ------------------------------------------------------------- builders
def conj(*parts: Formula) -> Formula:
    parts = [p for p in parts if p is not None]
    if not parts:
        return Truth(True)
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(*parts: Formula) -> Formula:
    if not parts:
        return Truth(False)
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def exists(names: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(names)):
        body = Exists(v, body)
    return body


def forall(names: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(names)):
        body = Forall(v, body)
    return body


# ------------------------------------------------------------ traversal
def subformulas(phi: Formula) -> Iterator[Formula]:
    """Pre-order walk over formula nodes."""
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Not):
            stack.append(node.body)
        elif isinstance(node, BINARY):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, QUANTIFIERS):
            stack.append(node.body)


def term_symbols(t: Term, funcs: set, consts: set) -> None:
    if isinstance(t, Const):
        consts.add(t.name)
    elif isinstance(t, App):
        funcs.add((t.fn, len(t.args)))
        for a in t.args:
            term_symbols(a, funcs, consts)


def symbols(phi: Formula) -> tuple[set, set, set]:
    """(relations with arity, functions with arity, constants) used by ``phi``."""
    rels, funcs, consts = set(), set(), set()
    for node in subformulas(phi):
        if isinstance(node, Rel):
            rels.add((node.name, len(node.args)))
            for a in node.args:
                term_symbols(a, funcs, consts)
        elif isinstance(node, Eq):
            term_symbols(node.left, funcs, consts)
            term_symbols(node.right, funcs, consts)
    return rels, funcs, consts


def bound_vars(phi: Formula) -> list[str]:
    return [n.var for n in subformulas(phi) if isinstance(n, QUANTIFIERS)]


def size(phi: Formula) -> int:
    return sum(1 for _ in subformulas(phi))


def quantifier_depth(phi: Formula) -> int:
    if isinstance(phi, ATOMIC):
        return 0
    if isinstance(phi, Not):
        return quantifier_depth(phi.body)
    if isinstance(phi, BINARY):
        return max(quantifier_depth(phi.left), quantifier_depth(phi.right))
    return 1 + quantifier_depth(phi.body)


# --------------------------------------------------------- substitution
def subst_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, App):
        return App(t.fn, tuple(subst_term(a, mapping) for a in t.args))
    return t


def rename_free(phi: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename free variables. Bound names that would capture are renamed first."""
    return substitute(phi, {k: Var(v) for k, v in mapping.items()})


def _fresh(base: str, avoid: set[str]) -> str:
    root = base.split("_")[0] if "_" in base and base.split("_")[-1].isdigit() else base
    k = 1
    while f"{root}_{k}" in avoid:
        k += 1
    return f"{root}_{k}"


def substitute(phi: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Capture-avoiding substitution of terms for free variables."""
    mapping = {k: v for k, v in mapping.items() if k in phi.free_vars}
    if not mapping:
        return phi
    if isinstance(phi, Eq):
        return Eq(subst_term(phi.left, mapping), subst_term(phi.right, mapping))
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(subst_term(a, mapping) for a in phi.args))
    if isinstance(phi, Not):
        return Not(substitute(phi.body, mapping))
    if isinstance(phi, BINARY):
        return type(phi)(substitute(phi.left, mapping), substitute(phi.right, mapping))
    if isinstance(phi, QUANTIFIERS):
        incoming = set().union(*(t.free_vars for t in mapping.values()))
        var, body = phi.var, phi.body
        if var in incoming:
            new = _fresh(var, incoming | body.free_vars | set(bound_vars(body)) | set(mapping))
            body = substitute(body, {var: Var(new)})
            var = new
        return type(phi)(var, substitute(body, mapping))
    return phi


def alpha_equal(a: Formula, b: Formula) -> bool:
    """Equality up to renaming of bound variables."""
    return _alpha(a, b, {}, {})


def _alpha_term(s: Term, t: Term, left: dict, right: dict) -> bool:
    if isinstance(s, Var) and isinstance(t, Var):
        ls, rt = left.get(s.name), right.get(t.name)
        if ls is None and rt is None:
            return s.name == t.name
        return ls is not None and ls == rt
    if isinstance(s, Const) and isinstance(t, Const):
        return s.name == t.name
    if isinstance(s, App) and isinstance(t, App):
        return s.fn == t.fn and len(s.args) == len(t.args) and all(
            _alpha_term(x, y, left, right) for x, y in zip(s.args, t.args))
    return False


def _alpha(a, b, left: dict, right: dict) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Truth):
        return a.value == b.value
    if isinstance(a, Eq):
        return _alpha_term(a.left, b.left, left, right) and _alpha_term(a.right, b.right, left, right)
    if isinstance(a, Rel):
        return a.name == b.name and len(a.args) == len(b.args) and all(
            _alpha_term(x, y, left, right) for x, y in zip(a.args, b.args))
    if isinstance(a, Not):
        return _alpha(a.body, b.body, left, right)
    if isinstance(a, BINARY):
        return _alpha(a.left, b.left, left, right) and _alpha(a.right, b.right, left, right)
    depth = object()
    return _alpha(a.body, b.body, {**left, a.var: depth}, {**right, b.var: depth})


# ---------------------------------------------------------------- printing
_PREC = {Iff: 1, Imp: 2, Or: 3, And: 4}
_SYM = {Iff: "<->", Imp: "->", Or: "|", And: "&"}


def term_text(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if t.fn == "*" and len(t.args) == 2:
        left = term_text(t.args[0])
        right = term_text(t.args[1])
        if isinstance(t.args[1], App) and t.args[1].fn == "*":
            right = f"({right})"
        return f"{left}*{right}"
    return f"{t.fn}({', '.join(term_text(a) for a in t.args)})"


def to_text(phi: Formula) -> str:
    """Render in the input syntax; parsing the result gives back the same tree."""
    return _text(phi)


def _text(phi) -> str:
    if isinstance(phi, Truth):
        return "(A top_)(top_ = top_)" if phi.value else "!(A top_)(top_ = top_)"
    if isinstance(phi, Eq):
        return f"{term_text(phi.left)} = {term_text(phi.right)}"
    if isinstance(phi, Rel):
        return f"{phi.name}({', '.join(term_text(a) for a in phi.args)})"
    if isinstance(phi, Not):
        return "!" + _unary(phi.body)
    if isinstance(phi, QUANTIFIERS):
        q = "E" if isinstance(phi, Exists) else "A"
        return f"({q} {phi.var})" + _unary(phi.body)
    prec = _PREC[type(phi)]
    left, right = _text(phi.left), _text(phi.right)
    lp = _PREC.get(type(phi.left))
    rp = _PREC.get(type(phi.right))
    # '->' associates to the right, the others to the left
    if isinstance(phi, Imp):
        if lp is not None and lp <= prec:
            left = f"({left})"
        if rp is not None and rp < prec:
            right = f"({right})"
    else:
        if lp is not None and lp < prec:
            left = f"({left})"
        if rp is not None and rp <= prec:
            right = f"({right})"
    return f"{left} {_SYM[type(phi)]} {right}"


def _unary(phi) -> str:
    if isinstance(phi, (Rel, Not, *QUANTIFIERS)):
        return _text(phi)
    return f"({_text(phi)})"
