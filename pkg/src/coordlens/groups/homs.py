"""Homomorphisms and the structural obstructions built from them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import (FiniteGroup, Subgroup, abelian_invariants, commutator_subgroup, generate,
                   lower_central_series, normal_subgroups, prime_factors, LATTICE_BOUND)


class HomError(ValueError):
    pass


@dataclass(eq=False)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    images: np.ndarray

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.int32)
        if self.images.shape != (self.source.order,):
            raise HomError("image array has the wrong length")
        if not self.is_homomorphism():
            raise HomError("map does not respect multiplication")

    def is_homomorphism(self) -> bool:
        img, t = self.images, self.target.table
        return bool(np.array_equal(t[img[:, None], img[None, :]], img[self.source.table]))

    def __call__(self, a: int) -> int:
        return int(self.images[a])

    def image(self) -> Subgroup:
        mask = np.zeros(self.target.order, dtype=bool)
        mask[self.images] = True
        return Subgroup(self.target, mask)

    def kernel(self) -> Subgroup:
        return Subgroup(self.source, self.images == self.target.identity)

    def is_trivial(self) -> bool:
        return bool(np.all(self.images == self.target.identity))

    def describe(self, limit: int = 12) -> dict[str, str]:
        src = self.source
        return {src.labels[g]: self.target.labels[int(self.images[g])] for g in range(min(limit, src.order))}


def extend_from_generators(source: FiniteGroup, target: FiniteGroup, gens: Iterable[int],
                           images: Iterable[int]) -> np.ndarray | None:
    """Extend generator images to a map by breadth-first multiplication.

    Returns ``None`` when two words for the same element disagree or the
    result is not a homomorphism.
    """
    gens, images = list(gens), list(images)
    out = np.full(source.order, -1, dtype=np.int64)
    out[source.identity] = target.identity
    frontier = [source.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g, h in zip(gens, images):
                y = int(source.table[x, g])
                val = int(target.table[out[x], h])
                if out[y] < 0:
                    out[y] = val
                    nxt.append(y)
                elif out[y] != val:
                    return None
        frontier = nxt
    if np.any(out < 0):
        return None
    img = out.astype(np.int32)
    t = target.table
    if not np.array_equal(t[img[:, None], img[None, :]], img[source.table]):
        return None
    return img


def hom_to_center_exists(source: FiniteGroup, target: FiniteGroup) -> GroupHom | None:
    """A nontrivial homomorphism from ``source`` into the center of ``target``, if any.

    Such a map factors through the abelianization, so it exists iff some prime
    divides both the abelianization order and the order of the center. The
    witness sends a chosen index-p subgroup containing the commutator subgroup
    to the identity and a coset generator to a central element of order p.
    """
    center = target.center
    if center.order == 1:
        return None
    derived = commutator_subgroup(source)
    ab_order = source.order // derived.order
    common = [p for p in prime_factors(ab_order) if center.order % p == 0]
    if not common:
        return None
    p = common[0]
    pth = source.powers(p)
    base_gens = list(derived.generators()) + sorted(set(int(x) for x in pth[list(source.generators)]))
    base = generate(source, base_gens)
    # a basis of the elementary abelian quotient, found greedily
    basis: list[int] = []
    span = base.mask.copy()
    for g in range(source.order):
        if not span[g]:
            basis.append(g)
            span = source.closure_mask(base_gens + basis)
    first = basis[0]
    sub = source.closure_mask(base_gens + basis[1:])
    z = next(int(c) for c in center.elements if target.element_orders[c] == p)
    images = np.full(source.order, -1, dtype=np.int64)
    power, zp = source.identity, target.identity
    members = np.flatnonzero(sub)
    for _ in range(p):
        images[source.table[power, members]] = zp
        power = int(source.table[power, first])
        zp = int(target.table[zp, z])
    return GroupHom(source, target, images)


def nilpotent_center_hom(group: FiniteGroup) -> GroupHom | None:
    """For nilpotent nonabelian G, the map ``x -> [x, c]`` into Z(G).

    ``c`` is the least non-central element of the term before the last
    nontrivial term of the lower central series, so every ``[x, c]`` is central
    and the map is a nontrivial homomorphism.
    """
    series = lower_central_series(group)
    if not series[-1].is_trivial() or len(series) < 3:
        return None
    prev = series[-3]
    center = group.center
    c = next((x for x in prev.elements if x not in center), None)
    if c is None:
        return None
    tab, inv = group.table, group.inverse
    ar = np.arange(group.order)
    images = tab[tab[tab[ar, c], inv[ar]], inv[c]]
    hom = GroupHom(group, group, images)
    if not all(x in center for x in hom.image().elements) or hom.is_trivial():
        return None
    return hom


def is_decomposable(group: FiniteGroup, bound: int = LATTICE_BOUND) -> tuple[Subgroup, Subgroup] | None:
    """Nontrivial normal ``N1, N2`` with ``G = N1 x N2`` (internal), if any."""
    subs = [s for s in normal_subgroups(group, bound) if 1 < s.order < group.order]
    tab = group.table
    for i, a in enumerate(subs):
        for b in subs[i:]:
            if a.order * b.order != group.order or np.any(a.mask & b.mask & (np.arange(group.order) != group.identity)):
                continue
            ea, eb = np.asarray(a.elements), np.asarray(b.elements)
            if np.array_equal(tab[np.ix_(ea, eb)], tab[np.ix_(eb, ea)].T):
                return a, b
    return None


def abelianization_invariants(group: FiniteGroup) -> list[int]:
    from .core import abelianization
    q, _ = abelianization(group)
    return abelian_invariants(q)
