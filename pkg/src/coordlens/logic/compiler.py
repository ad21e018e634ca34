"""Lower a formula plus a structure into flat integer arrays.

Both evaluation kernels (compiled and pure Python) consume the same
:class:`Program`, so they are interchangeable and can be cross-checked.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .formula import (App, And, Const, Eq, Exists, Forall, Iff, Imp, Not, Or, Rel, Truth, Var)
from .parser import check_signature
from .structure import FiniteStructure

T_VAR, T_CONST, T_APP = 0, 1, 2
F_EQ, F_REL, F_NOT, F_AND, F_OR, F_IMP, F_IFF, F_EX, F_ALL, F_TRUE, F_FALSE = range(11)

MEMO_NODE_CAP = 1 << 25
MEMO_TOTAL_CAP = 1 << 27


@dataclass
class Program:
    n: int
    nslots: int
    slots: dict[str, int]
    root: int
    t_op: np.ndarray
    t_arg: np.ndarray
    t_first: np.ndarray
    t_count: np.ndarray
    t_kids: np.ndarray
    ftab: np.ndarray
    f_off: np.ndarray
    rtab: np.ndarray
    r_off: np.ndarray
    op: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    f_kids: np.ndarray
    m_first: np.ndarray
    m_count: np.ndarray
    m_off: np.ndarray
    m_slots: np.ndarray
    memo_size: int
    free_vars: tuple[str, ...] = field(default=())


class _Builder:
    def __init__(self, structure: FiniteStructure):
        self.m = structure
        self.n = structure.size
        self.slots: dict[str, int] = {}
        self.terms: list[tuple[int, int, int, int]] = []
        self.t_kids: list[int] = []
        self.nodes: list[list[int]] = []
        self.f_kids: list[int] = []
        self.quants: list[tuple[int, tuple[str, ...]]] = []
        self.fnames = list(structure.functions)
        self.rnames = list(structure.relations)

    def slot(self, name: str) -> int:
        if name not in self.slots:
            self.slots[name] = len(self.slots)
        return self.slots[name]

    def term(self, t) -> int:
        if isinstance(t, Var):
            rec = (T_VAR, self.slot(t.name), 0, 0)
        elif isinstance(t, Const):
            rec = (T_CONST, self.m.constants[t.name], 0, 0)
        else:
            kids = [self.term(a) for a in t.args]
            first = len(self.t_kids)
            self.t_kids.extend(kids)
            rec = (T_APP, self.fnames.index(t.fn), first, len(kids))
        self.terms.append(rec)
        return len(self.terms) - 1

    def node(self, phi) -> int:
        idx = len(self.nodes)
        self.nodes.append([0, 0, 0, 0, 0])
        if isinstance(phi, Eq):
            rec = [F_EQ, self.term(phi.left), self.term(phi.right), 0, 0]
        elif isinstance(phi, Rel):
            kids = [self.term(a) for a in phi.args]
            first = len(self.f_kids)
            self.f_kids.extend(kids)
            rec = [F_REL, self.rnames.index(phi.name), 0, first, len(kids)]
        elif isinstance(phi, Truth):
            rec = [F_TRUE if phi.value else F_FALSE, 0, 0, 0, 0]
        elif isinstance(phi, Not):
            rec = [F_NOT, self.node(phi.body), 0, 0, 0]
        elif isinstance(phi, (And, Or, Imp, Iff)):
            code = {And: F_AND, Or: F_OR, Imp: F_IMP, Iff: F_IFF}[type(phi)]
            rec = [code, self.node(phi.left), self.node(phi.right), 0, 0]
        elif isinstance(phi, (Exists, Forall)):
            slot = self.slot(phi.var)
            body = self.node(phi.body)
            self.quants.append((idx, tuple(sorted(phi.free_vars))))
            rec = [F_EX if isinstance(phi, Exists) else F_ALL, slot, body, -1, 0]
        else:  # pragma: no cover
            raise TypeError(f"not a formula node: {phi!r}")
        self.nodes[idx] = rec
        return idx


def compile_formula(structure: FiniteStructure, phi, free_order=None) -> Program:
    """Compile ``phi`` against ``structure``.

    ``free_order`` fixes which slots the free variables get (in order), which
    lets callers pass assignments positionally.
    """
    check_signature(phi, structure.signature)
    b = _Builder(structure)
    for name in free_order or sorted(phi.free_vars):
        b.slot(name)
    root = b.node(phi)
    n = b.n

    # memo tables, smallest first, within a global budget
    plans = []
    for node_idx, free in b.quants:
        size = n ** len(free)
        if size <= MEMO_NODE_CAP:
            plans.append((size, node_idx, free))
    plans.sort()
    m_first, m_count, m_off, m_slots = [], [], [], []
    total = 0
    for size, node_idx, free in plans:
        if total + size > MEMO_TOTAL_CAP:
            break
        b.nodes[node_idx][3] = len(m_first)
        m_first.append(len(m_slots))
        m_count.append(len(free))
        m_off.append(total)
        m_slots.extend(b.slots[v] for v in free)
        total += size

    ftab_parts, f_off, off = [], [], 0
    for fname in b.fnames:
        tab = structure.functions[fname].ravel()
        ftab_parts.append(tab)
        f_off.append(off)
        off += tab.size
    rtab_parts, r_off, off = [], [], 0
    for rname in b.rnames:
        tab = structure.relations[rname].ravel().astype(np.uint8)
        rtab_parts.append(tab)
        r_off.append(off)
        off += tab.size

    def arr(values, dtype=np.int32):
        return np.ascontiguousarray(np.asarray(values, dtype=dtype).reshape(-1))

    terms = np.asarray(b.terms, dtype=np.int32).reshape(-1, 4)
    nodes = np.asarray(b.nodes, dtype=np.int32).reshape(-1, 5)
    return Program(
        n=n, nslots=max(1, len(b.slots)), slots=dict(b.slots), root=root,
        t_op=arr(terms[:, 0]), t_arg=arr(terms[:, 1]), t_first=arr(terms[:, 2]),
        t_count=arr(terms[:, 3]), t_kids=arr(b.t_kids),
        ftab=arr(np.concatenate(ftab_parts) if ftab_parts else []), f_off=arr(f_off, np.int64),
        rtab=arr(np.concatenate(rtab_parts) if rtab_parts else [], np.uint8), r_off=arr(r_off, np.int64),
        op=arr(nodes[:, 0]), a=arr(nodes[:, 1]), b=arr(nodes[:, 2]), c=arr(nodes[:, 3]),
        d=arr(nodes[:, 4]), f_kids=arr(b.f_kids),
        m_first=arr(m_first), m_count=arr(m_count), m_off=arr(m_off, np.int64), m_slots=arr(m_slots),
        memo_size=total, free_vars=tuple(free_order or sorted(phi.free_vars)),
    )
