"""Finite groups given by dense multiplication tables."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from ..logic.signature import GROUP
from ..logic.structure import FiniteStructure

LATTICE_BOUND = 1000
CLASS_BOUND = 10080
ASSOCIATIVITY_CHECK_LIMIT = 512


class GroupError(ValueError):
    pass


class SizeGuardError(GroupError):
    """An operation was asked for on a group larger than its configured bound."""


def guard(group: "FiniteGroup", bound: int, what: str) -> None:
    if group.order > bound:
        raise SizeGuardError(f"{what} needs |G| <= {bound}, got {group.order} ({group.name})")


class FiniteGroup:
    """Group on ``0..n-1`` with ``table[a, b] = a*b``."""

    def __init__(self, table, labels: Sequence[str] | None = None, name: str = "",
                 provenance: str = "", validate: bool = True):
        tab = np.ascontiguousarray(np.asarray(table, dtype=np.int32))
        if tab.ndim != 2 or tab.shape[0] != tab.shape[1] or tab.shape[0] == 0:
            raise GroupError("table must be a nonempty square array")
        n = tab.shape[0]
        self.table = tab
        self.order = n
        self.name = name or f"G{n}"
        self.provenance = provenance
        self.labels = [str(x) for x in labels] if labels is not None else [str(i) for i in range(n)]
        if len(self.labels) != n:
            raise GroupError("label count differs from group order")
        if tab.min() < 0 or tab.max() >= n:
            raise GroupError("table entries leave the element range")
        ar = np.arange(n)
        ids = [e for e in range(n) if np.array_equal(tab[e], ar) and np.array_equal(tab[:, e], ar)]
        if not ids:
            raise GroupError("no two-sided identity")
        self.identity = ids[0]
        if validate:
            self._validate()
        inv = np.argmax(tab == self.identity, axis=1).astype(np.int32)
        if not np.all(tab[ar, inv] == self.identity):
            raise GroupError("some element has no inverse")
        self.inverse = inv
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}

    def _validate(self):
        tab, n = self.table, self.order
        srt = np.sort(tab, axis=1)
        if not np.all(srt == np.arange(n)):
            raise GroupError("rows are not permutations (not a Latin square)")
        if not np.all(np.sort(tab, axis=0) == np.arange(n)[:, None]):
            raise GroupError("columns are not permutations (not a Latin square)")
        if n <= ASSOCIATIVITY_CHECK_LIMIT:
            for a in range(n):
                # (a*b)*c == a*(b*c) for all b, c
                if not np.array_equal(tab[tab[a]], tab[a][tab]):
                    raise GroupError(f"associativity fails with first factor {self.labels[a]}")

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    def __len__(self):
        return self.order

    # element helpers ---------------------------------------------------
    def element(self, label) -> int:
        if isinstance(label, (int, np.integer)):
            if not 0 <= label < self.order:
                raise GroupError(f"element {label} out of range")
            return int(label)
        key = str(label).strip()
        if key in self._label_index:
            return self._label_index[key]
        alt = key.replace(" ", "")
        for lab, i in self._label_index.items():
            if lab.replace(" ", "") == alt:
                return i
        raise GroupError(f"unknown element {label!r} in {self.name}")

    def mul(self, *elems: int) -> int:
        out = self.identity
        for x in elems:
            out = int(self.table[out, x])
        return out

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        out, base = self.identity, int(a)
        while k:
            if k & 1:
                out = int(self.table[out, base])
            base = int(self.table[base, base])
            k >>= 1
        return out

    def powers(self, k: int) -> np.ndarray:
        """Array of ``g**k`` for every element ``g``."""
        out = np.full(self.order, self.identity, dtype=np.int32)
        base = np.arange(self.order, dtype=np.int32)
        while k:
            if k & 1:
                out = self.table[out, base]
            base = self.table[base, base]
            k >>= 1
        return out

    def commutator(self, a: int, b: int) -> int:
        """``a b a^-1 b^-1``."""
        return self.mul(a, b, self.inv(a), self.inv(b))

    def conjugate(self, g: int, x: int) -> int:
        """``g x g^-1``."""
        return self.mul(g, x, self.inv(g))

    def conjugation_map(self, g: int) -> np.ndarray:
        return self.table[self.table[g], self.inverse[g]]

    # cached invariants -------------------------------------------------
    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        ar = np.arange(n, dtype=np.int32)
        cur = ar.copy()
        k = 1
        while True:
            hit = (cur == self.identity) & (orders == 0)
            orders[hit] = k
            if orders.all():
                return orders
            cur = self.table[cur, ar]
            k += 1

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(self.element_orders))

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily by decreasing element order."""
        cand = sorted(range(self.order), key=lambda a: (-int(self.element_orders[a]), a))
        gens: list[int] = []
        mask = np.zeros(self.order, dtype=bool)
        mask[self.identity] = True
        for a in cand:
            if mask.all():
                break
            if not mask[a]:
                gens.append(a)
                mask = self.closure_mask(gens)
        return tuple(gens)

    def closure_mask(self, elems: Iterable[int]) -> np.ndarray:
        """Membership mask of the subgroup generated by ``elems``."""
        gens = np.unique(np.asarray(list(elems), dtype=np.int32))
        mask = np.zeros(self.order, dtype=bool)
        mask[self.identity] = True
        if gens.size == 0:
            return mask
        frontier = np.array([self.identity], dtype=np.int32)
        while frontier.size:
            nxt = np.unique(self.table[np.ix_(frontier, gens)].ravel())
            nxt = nxt[~mask[nxt]]
            mask[nxt] = True
            frontier = nxt
        return mask

    @cached_property
    def conjugacy_classes(self) -> tuple[tuple[int, ...], ...]:
        """Classes sorted by their least element, each sorted."""
        guard(self, CLASS_BOUND, "conjugacy classes")
        maps = np.stack([self.conjugation_map(g) for g in self.generators]) if self.generators \
            else np.zeros((0, self.order), dtype=np.int32)
        label = np.full(self.order, -1, dtype=np.int64)
        classes = []
        for a in range(self.order):
            if label[a] >= 0:
                continue
            cid = len(classes)
            label[a] = cid
            members = [a]
            frontier = np.array([a])
            while frontier.size and maps.size:
                nxt = np.unique(maps[:, frontier].ravel())
                nxt = nxt[label[nxt] < 0]
                label[nxt] = cid
                members.extend(nxt.tolist())
                frontier = nxt
            classes.append(tuple(sorted(members)))
        self._class_label = label
        return tuple(classes)

    @cached_property
    def class_index(self) -> np.ndarray:
        self.conjugacy_classes
        return self._class_label

    def conjugacy_class(self, a: int) -> tuple[int, ...]:
        return self.conjugacy_classes[int(self.class_index[a])]

    @cached_property
    def center(self) -> "Subgroup":
        sizes = np.array([len(c) for c in self.conjugacy_classes])
        mask = sizes[self.class_index] == 1
        return Subgroup(self, mask)

    def centralizer_mask(self, elems: Iterable[int]) -> np.ndarray:
        tab = self.table
        mask = np.ones(self.order, dtype=bool)
        for s in elems:
            mask &= tab[:, s] == tab[s, :]
        return mask

    def centralizer(self, elems: Iterable[int]) -> "Subgroup":
        return Subgroup(self, self.centralizer_mask(elems))

    def class_centralizer(self, a: int) -> "Subgroup":
        """Centralizer of the whole conjugacy class of ``a``."""
        return self.centralizer(self.conjugacy_class(a))

    @cached_property
    def structure(self) -> FiniteStructure:
        return FiniteStructure(GROUP, self.order, {"*": self.table, "inv": self.inverse}, {},
                               {"e": self.identity}, self.labels, self.name)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))


@dataclass(frozen=True, eq=False)
class Subgroup:
    group: FiniteGroup
    mask: np.ndarray

    @cached_property
    def elements(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.flatnonzero(self.mask))

    @property
    def order(self) -> int:
        return int(self.mask.sum())

    def __contains__(self, a) -> bool:
        return bool(self.mask[a])

    def __eq__(self, other):
        return isinstance(other, Subgroup) and other.group is self.group and \
            np.array_equal(other.mask, self.mask)

    def __hash__(self):
        return hash((id(self.group), self.mask.tobytes()))

    def __repr__(self):
        labs = [self.group.labels[i] for i in self.elements[:8]]
        more = ", ..." if self.order > 8 else ""
        return f"Subgroup(order={self.order}, {{{', '.join(labs)}{more}}})"

    def labels(self) -> list[str]:
        return [self.group.labels[i] for i in self.elements]

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_normal(self) -> bool:
        g = self.group
        return all(np.all(self.mask[g.conjugation_map(x)[self.mask]]) for x in g.generators)

    def is_abelian(self) -> bool:
        els = np.asarray(self.elements)
        sub = self.group.table[np.ix_(els, els)]
        return bool(np.array_equal(sub, sub.T))

    def generators(self) -> tuple[int, ...]:
        g = self.group
        gens: list[int] = []
        cur = np.zeros(g.order, dtype=bool)
        cur[g.identity] = True
        for a in self.elements:
            if not cur[a]:
                gens.append(a)
                cur = g.closure_mask(gens)
        return tuple(gens)


# ---------------------------------------------------------------- subgroups
def generate(group: FiniteGroup, elems: Iterable[int]) -> Subgroup:
    return Subgroup(group, group.closure_mask(elems))


def normal_closure(group: FiniteGroup, elems: Iterable[int]) -> Subgroup:
    gens = list(dict.fromkeys(int(x) for x in elems))
    mask = group.closure_mask(gens)
    maps = [group.conjugation_map(g) for g in group.generators]
    while True:
        new = []
        for cm in maps:
            img = np.unique(cm[np.asarray(gens, dtype=np.int64)]) if gens else np.array([], dtype=np.int64)
            new.extend(int(x) for x in img[~mask[img]])
        if not new:
            return Subgroup(group, mask)
        gens.extend(dict.fromkeys(new))
        mask = group.closure_mask(gens)


def commutator_subgroup(group: FiniteGroup) -> Subgroup:
    gens = group.generators
    comms = [group.commutator(a, b) for a in gens for b in gens]
    return normal_closure(group, comms)


def lower_central_series(group: FiniteGroup) -> list[Subgroup]:
    """``G = G_0 > G_1 > ...`` with ``G_{k+1} = [G_k, G]``, until it stabilizes."""
    series = [Subgroup(group, np.ones(group.order, dtype=bool))]
    gens_g = group.generators
    while True:
        cur = series[-1]
        comms = [group.commutator(x, g) for x in cur.generators() for g in gens_g]
        nxt = normal_closure(group, comms)
        if nxt == cur:
            return series
        series.append(nxt)


def is_nilpotent(group: FiniteGroup) -> bool:
    return lower_central_series(group)[-1].is_trivial()


def is_perfect(group: FiniteGroup) -> bool:
    return commutator_subgroup(group).order == group.order


def commutator_set(group: FiniteGroup, bound: int = CLASS_BOUND) -> np.ndarray:
    """Mask of all elements that are single commutators."""
    guard(group, bound, "commutator set")
    tab, inv, n = group.table, group.inverse, group.order
    mask = np.zeros(n, dtype=bool)
    ar = np.arange(n)
    for start in range(0, n, 256):
        a = ar[start:start + 256][:, None]
        ab = tab[a, ar[None, :]]
        ai_bi = tab[inv[a], inv[ar][None, :]]
        mask[np.unique(tab[ab, ai_bi])] = True
    return mask


def subset_product(group: FiniteGroup, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    a, b = np.flatnonzero(left), np.flatnonzero(right)
    mask = np.zeros(group.order, dtype=bool)
    for start in range(0, a.size, 512):
        mask[np.unique(group.table[np.ix_(a[start:start + 512], b)])] = True
    return mask


def commutator_width(group: FiniteGroup, bound: int = LATTICE_BOUND) -> int:
    """Least m such that every element of [G,G] is a product of m commutators."""
    guard(group, bound, "commutator width")
    derived = commutator_subgroup(group).mask
    if derived.sum() == 1:
        return 0
    comm = commutator_set(group)
    cur, width = comm.copy(), 1
    while not np.array_equal(cur, derived):
        cur = subset_product(group, cur, comm)
        width += 1
    return width


def normal_subgroups(group: FiniteGroup, bound: int = LATTICE_BOUND) -> list[Subgroup]:
    """All normal subgroups, sorted by order and then by elements."""
    guard(group, bound, "normal subgroup enumeration")
    found: dict[bytes, Subgroup] = {}
    trivial = Subgroup(group, group.closure_mask([]))
    found[trivial.mask.tobytes()] = trivial
    for cls in group.conjugacy_classes:
        nc = normal_closure(group, [cls[0]])
        found.setdefault(nc.mask.tobytes(), nc)
    changed = True
    while changed:
        changed = False
        items = list(found.values())
        for i, a in enumerate(items):
            for b in items[i + 1:]:
                if np.all(a.mask <= b.mask) or np.all(b.mask <= a.mask):
                    continue
                j = generate(group, a.generators() + b.generators())
                key = j.mask.tobytes()
                if key not in found:
                    found[key] = j
                    changed = True
    return sorted(found.values(), key=lambda s: (s.order, s.elements))


def quotient(group: FiniteGroup, normal: Subgroup, name: str = "") -> tuple[FiniteGroup, np.ndarray]:
    """Quotient group and the projection (element index to coset index)."""
    n = group.order
    coset = np.full(n, -1, dtype=np.int64)
    reps = []
    nel = np.asarray(normal.elements)
    for g in range(n):
        if coset[g] < 0:
            coset[group.table[g, nel]] = len(reps)
            reps.append(g)
    reps_arr = np.asarray(reps)
    tab = coset[group.table[np.ix_(reps_arr, reps_arr)]]
    labels = [f"{group.labels[r]}N" for r in reps]
    q = FiniteGroup(tab, labels, name or f"{group.name}/N", validate=False)
    return q, coset


def abelian_invariants(group: FiniteGroup) -> list[int]:
    """Invariant factors d1 | d2 | ... of an abelian group (empty for trivial)."""
    if not group.is_abelian():
        raise GroupError("abelian invariants need an abelian group")
    n = group.order
    exps: dict[int, list[int]] = {}
    for p in _prime_factors(n):
        counts = [1]
        k = 1
        while counts[-1] < _ppart(n, p):
            counts.append(int(np.sum(group.powers(p ** k) == group.identity)))
            k += 1
        ranks = [round(math.log(counts[i] / counts[i - 1], p)) for i in range(1, len(counts))]
        ranks.append(0)
        mult = []
        for i in range(len(ranks) - 1):
            mult.extend([i + 1] * (ranks[i] - ranks[i + 1]))
        exps[p] = sorted(mult, reverse=True)
    length = max((len(v) for v in exps.values()), default=0)
    factors = []
    for i in range(length):
        d = 1
        for p, es in exps.items():
            if i < len(es):
                d *= p ** es[i]
        factors.append(d)
    return sorted(factors)


def abelianization(group: FiniteGroup) -> tuple[FiniteGroup, np.ndarray]:
    return quotient(group, commutator_subgroup(group), f"{group.name}^ab")


def _ppart(n: int, p: int) -> int:
    out = 1
    while n % p == 0:
        n //= p
        out *= p
    return out


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


prime_factors = _prime_factors


def direct_product(a: FiniteGroup, b: FiniteGroup, name: str = "") -> FiniteGroup:
    na, nb = a.order, b.order
    ia = np.repeat(np.arange(na), nb)
    ib = np.tile(np.arange(nb), na)
    tab = a.table[np.ix_(ia, ia)] * nb + b.table[np.ix_(ib, ib)]
    labels = [f"({a.labels[x]},{b.labels[y]})" for x, y in zip(ia, ib)]
    return FiniteGroup(tab, labels, name or f"{a.name}x{b.name}", validate=False)
