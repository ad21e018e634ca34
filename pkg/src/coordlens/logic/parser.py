"""Text syntax for formulas.

Variables are lowercase identifiers, ``*`` is the infix binary function,
connectives are ``! & | -> <->`` (tightest first, ``->`` right-associative),
quantifiers are written ``(A x)`` and ``(E x)`` and bind like negation.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (App, And, Const, Eq, Exists, Forall, Iff, Imp, Not, Or, Rel, Var,
                      QUANTIFIERS, BINARY, Truth, subformulas, symbols)
from .signature import Signature, SignatureError


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        pointer = ""
        if text:
            pointer = f"\n  {text}\n  {' ' * position}^"
        super().__init__(f"{message} at position {position}{pointer}")


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    pos: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[()!&|,=*])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if value == "*" and text.startswith("**", pos):
                raise ParseError("'**' is not an operator", pos + 1, text)
            out.append(Token(kind if kind != "punct" else value, value, pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, signature: Signature | None):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.sig = signature
        self.constants = set(signature.constants) if signature is not None else {"e"}

    # helpers -----------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        return ParseError(msg, tok.pos, self.text)

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            found = self.tok.value or "end of input"
            raise self.error(f"expected {kind!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    # formulas -----------------------------------------------------------
    def formula(self):
        left = self.implication()
        while self.tok.kind == "iff":
            self.i += 1
            left = Iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.tok.kind == "imp":
            self.i += 1
            return Imp(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.tok.kind == "|":
            self.i += 1
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.tok.kind == "&":
            self.i += 1
            left = And(left, self.unary())
        return left

    def _is_quantifier(self) -> bool:
        return (self.tok.kind == "(" and self.peek().kind == "ident" and self.peek().value in ("A", "E")
                and self.peek(2).kind == "ident" and self.peek(2).value[0].islower())

    def unary(self):
        if self.tok.kind == "!":
            self.i += 1
            return Not(self.unary())
        if self._is_quantifier():
            self.i += 1
            kind = Forall if self.expect("ident").value == "A" else Exists
            names = []
            while self.tok.kind in ("ident", ","):
                if self.tok.kind == ",":
                    self.i += 1
                    continue
                tok = self.expect("ident")
                if not tok.value[0].islower():
                    raise self.error(f"bad variable name {tok.value!r}", tok)
                names.append(tok.value)
            self.expect(")")
            body = self.unary()
            for name in reversed(names):
                body = kind(name, body)
            return body
        return self.atom()

    def atom(self):
        start = self.i
        if self.tok.kind == "(":
            try:
                left = self.term()
            except ParseError:
                left = None
            if left is not None and self.tok.kind == "=":
                self.i += 1
                return Eq(left, self.term())
            self.i = start + 1
            inner = self.formula()
            self.expect(")")
            return inner
        if self.tok.kind != "ident":
            found = self.tok.value or "end of input"
            raise self.error(f"expected a formula, found {found!r}")
        left = self.term()
        if self.tok.kind == "=":
            self.i += 1
            return Eq(left, self.term())
        if isinstance(left, App) and left.fn != "*":
            if self.sig is not None and left.fn in self.sig.functions:
                raise self.error(f"function {left.fn!r} used where a formula was expected")
            return Rel(left.fn, left.args)
        raise self.error("expected '='")

    # terms --------------------------------------------------------------
    def term(self):
        left = self.factor()
        while self.tok.kind == "*":
            self.i += 1
            left = App("*", (left, self.factor()))
        return left

    def factor(self):
        tok = self.tok
        if tok.kind == "(":
            self.i += 1
            inner = self.term()
            self.expect(")")
            return inner
        if tok.kind != "ident":
            found = tok.value or "end of input"
            raise self.error(f"expected a term, found {found!r}")
        self.i += 1
        if self.tok.kind == "(":
            self.i += 1
            args = [self.term()]
            while self.tok.kind == ",":
                self.i += 1
                args.append(self.term())
            self.expect(")")
            return App(tok.value, tuple(args))
        if tok.value in self.constants:
            return Const(tok.value)
        if not tok.value[0].islower():
            raise self.error(f"variables must start lowercase: {tok.value!r}", tok)
        return Var(tok.value)


def parse(text: str, signature: Signature | None = None, rename: bool = True):
    """Parse formula text.

    With ``signature`` every symbol is checked against it. With ``rename``
    bound variables that clash with free ones or with other binders get fresh
    names, so every binder in the result is unique.
    """
    p = _Parser(text, signature)
    phi = p.formula()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.value!r}")
    if signature is not None:
        check_signature(phi, signature)
    return alpha_normalize(phi) if rename else phi


def parse_term(text: str, signature: Signature | None = None):
    p = _Parser(text, signature)
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.value!r}")
    return t


def check_signature(phi, signature: Signature) -> None:
    rels, funcs, consts = symbols(phi)
    for name, arity in rels:
        if signature.relations.get(name) != arity:
            raise SignatureError(f"relation {name}/{arity} not in signature")
    for name, arity in funcs:
        if signature.functions.get(name) != arity:
            raise SignatureError(f"function {name}/{arity} not in signature")
    for name in consts:
        if name not in signature.constants:
            raise SignatureError(f"constant {name!r} not in signature")


def _all_names(phi) -> set[str]:
    names = set(phi.free_vars)
    for node in subformulas(phi):
        if isinstance(node, QUANTIFIERS):
            names.add(node.var)
    return names


def alpha_normalize(phi):
    """Give every binder a name distinct from all free variables and other binders."""
    used = _all_names(phi)
    free = set(phi.free_vars)
    taken: set[str] = set(free)

    def fresh(base: str) -> str:
        k = 1
        while f"{base}_{k}" in used or f"{base}_{k}" in taken:
            k += 1
        return f"{base}_{k}"

    def walk(node, env: dict):
        if isinstance(node, (Eq, Rel)):
            return _rename_atom(node, env)
        if isinstance(node, Truth):
            return node
        if isinstance(node, Not):
            return Not(walk(node.body, env))
        if isinstance(node, BINARY):
            return type(node)(walk(node.left, env), walk(node.right, env))
        name = node.var
        new = name if name not in taken else fresh(name)
        taken.add(new)
        return type(node)(new, walk(node.body, {**env, name: new}))

    return walk(phi, {})


def _rename_term(t, env):
    if isinstance(t, Var):
        return Var(env.get(t.name, t.name))
    if isinstance(t, App):
        return App(t.fn, tuple(_rename_term(a, env) for a in t.args))
    return t


def _rename_atom(node, env):
    if not env:
        return node
    if isinstance(node, Eq):
        return Eq(_rename_term(node.left, env), _rename_term(node.right, env))
    return Rel(node.name, tuple(_rename_term(a, env) for a in node.args))
