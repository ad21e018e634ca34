"""Direct recursive evaluator used as an oracle for the fast kernels.

No memoization and no compilation: it walks the syntax tree with a dict
environment, so its only shared code with the kernels is the tree itself.
"""
from __future__ import annotations

from typing import Mapping

from .formula import App, And, Const, Eq, Exists, Iff, Imp, Not, Or, Rel, Truth, Var
from .structure import FiniteStructure


def term_value(m: FiniteStructure, t, env: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return m.constants[t.name]
    assert isinstance(t, App)
    args = tuple(term_value(m, a, env) for a in t.args)
    return int(m.functions[t.fn][args])


def naive_holds(m: FiniteStructure, phi, env: Mapping[str, int]) -> bool:
    if isinstance(phi, Truth):
        return phi.value
    if isinstance(phi, Eq):
        return term_value(m, phi.left, env) == term_value(m, phi.right, env)
    if isinstance(phi, Rel):
        return bool(m.relations[phi.name][tuple(term_value(m, a, env) for a in phi.args)])
    if isinstance(phi, Not):
        return not naive_holds(m, phi.body, env)
    if isinstance(phi, And):
        return naive_holds(m, phi.left, env) and naive_holds(m, phi.right, env)
    if isinstance(phi, Or):
        return naive_holds(m, phi.left, env) or naive_holds(m, phi.right, env)
    if isinstance(phi, Imp):
        return (not naive_holds(m, phi.left, env)) or naive_holds(m, phi.right, env)
    if isinstance(phi, Iff):
        return naive_holds(m, phi.left, env) == naive_holds(m, phi.right, env)
    inner = dict(env)
    results = []
    for v in range(m.size):
        inner[phi.var] = v
        results.append(naive_holds(m, phi.body, inner))
    return any(results) if isinstance(phi, Exists) else all(results)

