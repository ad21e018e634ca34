"""Reduced products of finite structures over ideals on small index sets.

Index subsets are bitmasks over ``k <= 10`` indices. On a finite index set
every ideal is the power set of the union of its members, so an ideal is
determined by that union ``J``; elements of ``P(I)/ideal`` are represented by
their least member, ``A & ~J``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .logic.evaluate import as_formula, evaluator
from .logic.formula import And, Not, Or
from .logic.hformulas import HCertificate, classify_h
from .logic.structure import FiniteStructure
from .logic.signature import SignatureError

MAX_INDICES = 10
MAX_PRODUCT = 10 ** 6
MAX_TABLE_CELLS = 25_000_000


class IdealError(ValueError):
    pass


class ReducedProductError(ValueError):
    pass


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def indices_of(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def mask_text(mask: int) -> str:
    return "{" + ",".join(str(i) for i in indices_of(mask)) + "}"


# ------------------------------------------------------------------- ideals
@dataclass(frozen=True)
class FiniteIdeal:
    indices: int
    members: frozenset[int]
    generators: tuple[tuple[int, ...], ...] = ()

    @property
    def full(self) -> int:
        return (1 << self.indices) - 1

    @cached_property
    def union(self) -> int:
        out = 0
        for m in self.members:
            out |= m
        return out

    def __contains__(self, mask: int) -> bool:
        return mask in self.members

    def is_proper(self) -> bool:
        return self.full not in self.members

    def restrict(self, support: int) -> "FiniteIdeal":
        """The induced ideal ``{A & S}`` on the indices of ``support``, renumbered."""
        pos = indices_of(support)
        members = set()
        for m in self.members:
            members.add(mask_of(j for j, i in enumerate(pos) if m >> i & 1))
        return FiniteIdeal(len(pos), frozenset(members))

    def to_json(self) -> dict:
        return {"indices": self.indices, "generators": [list(g) for g in self.generators]}

    def __str__(self):
        return "{" + ", ".join(mask_text(m) for m in sorted(self.members, key=lambda m: (bin(m).count("1"), m))) + "}"


def make_ideal(k: int, generators: Iterable[Iterable[int]] = ()) -> FiniteIdeal:
    """Smallest ideal on ``{0..k-1}`` containing the generators."""
    if not 1 <= k <= MAX_INDICES:
        raise IdealError(f"index count must be in 1..{MAX_INDICES}, got {k}")
    gens = tuple(tuple(sorted(set(int(i) for i in g))) for g in generators)
    union = 0
    for g in gens:
        for i in g:
            if not 0 <= i < k:
                raise IdealError(f"index {i} outside 0..{k - 1}")
        union |= mask_of(g)
    # downward closure of the generators, then closure under pairwise unions
    members = {0}
    for g in gens:
        m = sub = mask_of(g)
        while True:
            members.add(sub)
            if sub == 0:
                break
            sub = (sub - 1) & m
    frontier = set(members)
    while frontier:
        fresh = {a | b for a in frontier for b in members} - members
        members |= fresh
        frontier = fresh
    ideal = FiniteIdeal(k, frozenset(members), gens)
    if not ideal.is_proper():
        raise IdealError("ideal is improper: it contains the whole index set")
    return ideal


def load_ideal(path_or_data, default_indices: int | None = None) -> FiniteIdeal:
    if isinstance(path_or_data, str):
        text = path_or_data.strip()
        if text.startswith("{"):
            data = json.loads(text)
        else:
            with open(text) as fh:
                data = json.load(fh)
    else:
        data = path_or_data
    k = data.get("indices", default_indices)
    if k is None:
        raise IdealError("ideal JSON needs 'indices'")
    return make_ideal(int(k), data.get("generators", []))


# --------------------------------------------------------- boolean algebra
class QuotientBA:
    """``P(I)/ideal``; classes are named by their least member."""

    def __init__(self, ideal: FiniteIdeal):
        self.ideal = ideal
        self.free = ideal.full & ~ideal.union

    def canonical(self, mask: int) -> int:
        return mask & self.free

    def same_class(self, a: int, b: int) -> bool:
        return (a ^ b) in self.ideal

    def element(self, mask: int | Iterable[int]) -> "SupportValue":
        if not isinstance(mask, int):
            mask = mask_of(mask)
        return SupportValue(self, self.canonical(mask))

    @property
    def zero(self) -> "SupportValue":
        return SupportValue(self, 0)

    @property
    def one(self) -> "SupportValue":
        return SupportValue(self, self.free)

    @cached_property
    def elements(self) -> list["SupportValue"]:
        free = self.free
        out, sub = [], free
        while True:
            out.append(SupportValue(self, sub))
            if sub == 0:
                break
            sub = (sub - 1) & free
        return sorted(out, key=lambda s: s.mask)

    def partition(self) -> list[list[int]]:
        """Classes of ``P(I)`` computed directly from the symmetric-difference test."""
        classes: list[list[int]] = []
        for m in range(self.ideal.full + 1):
            for cls in classes:
                if self.same_class(cls[0], m):
                    cls.append(m)
                    break
            else:
                classes.append([m])
        return classes

    @property
    def atomless(self) -> bool:
        # every nonzero element of a finite Boolean algebra bounds an atom
        return False

    def __eq__(self, other):
        return isinstance(other, QuotientBA) and other.ideal == self.ideal

    def __hash__(self):
        return hash(self.ideal)


@dataclass(frozen=True)
class SupportValue:
    algebra: QuotientBA = field(repr=False)
    mask: int

    def _coerce(self, other: "SupportValue") -> int:
        if other.algebra != self.algebra:
            raise ValueError("support values from different algebras")
        return other.mask

    def __and__(self, other):
        return SupportValue(self.algebra, self.mask & self._coerce(other))

    def __or__(self, other):
        return SupportValue(self.algebra, self.mask | self._coerce(other))

    def __invert__(self):
        return SupportValue(self.algebra, self.algebra.free & ~self.mask)

    def __le__(self, other):
        return self.mask & ~self._coerce(other) == 0

    def __ge__(self, other):
        return other <= self

    def is_zero(self) -> bool:
        return self.mask == 0

    def is_top(self) -> bool:
        return self.mask == self.algebra.free

    @property
    def indices(self) -> list[int]:
        return indices_of(self.mask)

    def __str__(self):
        return mask_text(self.mask)


# ---------------------------------------------------------- reduced product
class ReducedProduct:
    """Tuples of factor elements modulo agreement outside the ideal.

    Element ``i`` of :attr:`structure` is the canonical tuple :meth:`tuple_of`
    ``(i)``: zero at the ideal's union coordinates, free coordinates in
    lexicographic order. That tuple is the least tuple of its class.
    """

    def __init__(self, factors: Sequence[FiniteStructure], ideal: FiniteIdeal,
                 max_size: int = MAX_PRODUCT, name: str = ""):
        factors = list(factors)
        if len(factors) != ideal.indices:
            raise ReducedProductError(f"{len(factors)} factors but the ideal has {ideal.indices} indices")
        sig = factors[0].signature
        for f in factors[1:]:
            if f.signature != sig:
                raise SignatureError("factor structures have different signatures")
        total = 1
        for f in factors:
            total *= f.size
        if total > max_size:
            raise ReducedProductError(f"product of factor sizes {total} exceeds {max_size}")
        self.factors = factors
        self.ideal = ideal
        self.algebra = QuotientBA(ideal)
        self.signature = sig
        self.k = len(factors)
        self.free = [i for i in range(self.k) if self.algebra.free >> i & 1]
        self.radix = [factors[i].size for i in self.free]
        self.size = int(np.prod(self.radix)) if self.radix else 1
        self.name = name or ("(" + " x ".join(f.name or "?" for f in factors) + f")/{ideal}")

    def __repr__(self):
        return f"ReducedProduct({self.name}, size={self.size})"

    @cached_property
    def coords(self) -> np.ndarray:
        """``coords[x, i]`` is coordinate ``i`` of the canonical tuple of ``x``."""
        out = np.zeros((self.size, self.k), dtype=np.int64)
        if self.free:
            grid = np.indices(self.radix).reshape(len(self.free), -1).T
            out[:, self.free] = grid
        return out

    def tuple_of(self, x: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.coords[x])

    def index_of(self, tup: Sequence[int]) -> int:
        """Class of an arbitrary tuple."""
        if len(tup) != self.k:
            raise ReducedProductError(f"tuple needs {self.k} coordinates")
        idx = 0
        for i, r in zip(self.free, self.radix):
            v = int(tup[i])
            if not 0 <= v < self.factors[i].size:
                raise ReducedProductError(f"coordinate {i} out of range")
            idx = idx * r + v
        return idx

    def indices_of_tuples(self, tuples: np.ndarray) -> np.ndarray:
        tuples = np.asarray(tuples, dtype=np.int64)
        idx = np.zeros(tuples.shape[:-1], dtype=np.int64)
        for i, r in zip(self.free, self.radix):
            idx = idx * r + tuples[..., i]
        return idx

    def element(self, spec) -> int:
        """Element from an index, a tuple, or a comma-separated label string."""
        if isinstance(spec, (int, np.integer)):
            return int(spec)
        if isinstance(spec, str):
            parts = _split_labels(spec)
            if len(parts) != self.k:
                raise ReducedProductError(f"expected {self.k} comma-separated labels, got {spec!r}")
            return self.index_of([f.element(p) for f, p in zip(self.factors, parts)])
        return self.index_of([f.element(v) for f, v in zip(self.factors, spec)])

    def label(self, x: int) -> str:
        return "(" + ", ".join(self.factors[i].labels[v] for i, v in enumerate(self.tuple_of(x))) + ")"

    @cached_property
    def structure(self) -> FiniteStructure:
        """The reduced product as a plain finite structure."""
        sig, n, co = self.signature, self.size, self.coords
        funcs = {}
        for fname, arity in sig.functions.items():
            if n ** arity > MAX_TABLE_CELLS:
                raise ReducedProductError(f"table for {fname!r} would have {n ** arity} cells")
            grids = np.indices((n,) * arity).reshape(arity, -1)
            result = np.zeros((grids.shape[1], self.k), dtype=np.int64)
            for i in self.free:
                tab = self.factors[i].functions[fname]
                result[:, i] = tab[tuple(co[grids[j], i] for j in range(arity))]
            funcs[fname] = self.indices_of_tuples(result).reshape((n,) * arity).astype(np.int32)
        rels = {}
        for rname, arity in sig.relations.items():
            if n ** arity > MAX_TABLE_CELLS:
                raise ReducedProductError(f"table for {rname!r} would have {n ** arity} cells")
            grids = np.indices((n,) * arity).reshape(arity, -1)
            holds = np.ones(grids.shape[1], dtype=bool)
            for i in self.free:
                tab = self.factors[i].relations[rname]
                holds &= tab[tuple(co[grids[j], i] for j in range(arity))]
            rels[rname] = holds.reshape((n,) * arity)
        consts = {c: self.index_of([f.constants[c] for f in self.factors]) for c in sig.constants}
        labels = [self.label(x) for x in range(n)] if n <= 200_000 else None
        return FiniteStructure(sig, n, funcs, rels, consts, labels, self.name)

    # ----------------------------------------------------------- supports
    def coordinate_truth(self, phi, tuples: Sequence[Sequence[int]], variables: Sequence[str]) -> int:
        """Mask of indices ``i`` where factor ``i`` satisfies ``phi`` at the ``i``-th coordinates."""
        mask = 0
        for i, m in enumerate(self.factors):
            ev = evaluator(m, phi, tuple(variables))
            if ev.holds([t[i] for t in tuples]):
                mask |= 1 << i
        return mask


def _split_labels(text: str) -> list[str]:
    """Split on commas that are not inside brackets."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur.strip())
            cur = ""
        else:
            cur += ch
    parts.append(cur.strip())
    return parts


def reduced_product(factors: Sequence[FiniteStructure], ideal: FiniteIdeal, **kw) -> ReducedProduct:
    return ReducedProduct(factors, ideal, **kw)


def _as_tuples(rp: ReducedProduct, elems) -> list[tuple[int, ...]]:
    out = []
    for a in elems:
        if isinstance(a, (int, np.integer)):
            out.append(rp.tuple_of(int(a)))
        else:
            out.append(tuple(int(v) for v in a))
    return out


def supp_phi(rp: ReducedProduct, phi, elems: Sequence, variables: Sequence[str] | None = None,
             check: bool = False) -> SupportValue:
    """Class of the indices where ``phi`` holds at the given elements coordinatewise.

    ``elems`` may be element indices or raw tuples (any representatives).
    With ``check`` the value is recomputed on shifted representatives.
    """
    phi = as_formula(phi, rp.factors[0])
    variables = tuple(variables) if variables is not None else tuple(sorted(phi.free_vars))
    if len(variables) != len(elems):
        raise ValueError("one element per variable is needed")
    tuples = _as_tuples(rp, elems)
    value = rp.algebra.element(rp.coordinate_truth(phi, tuples, variables))
    if check:
        other = _shift_representatives(rp, tuples)
        again = rp.algebra.element(rp.coordinate_truth(phi, other, variables))
        if again != value:
            raise AssertionError("support depends on the chosen representatives")
    return value


def _shift_representatives(rp: ReducedProduct, tuples):
    """Same classes, different tuples: change every coordinate inside the ideal's union."""
    out = []
    for t in tuples:
        t = list(t)
        for i in indices_of(rp.ideal.union):
            t[i] = (t[i] + 1) % rp.factors[i].size
        out.append(tuple(t))
    return out


def supp_eq(rp: ReducedProduct, a, b) -> SupportValue:
    """Class of the agreement set of ``a`` and ``b``."""
    ta, tb = _as_tuples(rp, [a, b])
    return rp.algebra.element(mask_of(i for i in range(rp.k) if ta[i] == tb[i]))


def nonidentity_support(rp: ReducedProduct, a, identity: str = "e") -> SupportValue:
    """Class of the indices where ``a`` is not the identity."""
    (ta,) = _as_tuples(rp, [a])
    return rp.algebra.element(mask_of(i for i, f in enumerate(rp.factors) if ta[i] != f.constants[identity]))


def c_theta(rp: ReducedProduct, theta) -> SupportValue:
    theta = as_formula(theta, rp.factors[0])
    if theta.free_vars:
        raise ValueError("c_theta needs a sentence")
    return rp.algebra.element(rp.coordinate_truth(theta, [], ()))


def sentence_mod_ideal(factors: Sequence[FiniteStructure], ideal: FiniteIdeal, theta) -> bool:
    """Whether the indices where ``theta`` fails form a member of the ideal."""
    theta = as_formula(theta, factors[0])
    fail = 0
    for i, m in enumerate(factors):
        if not evaluator(m, theta, ()).holds([]):
            fail |= 1 << i
    return fail in ideal


# ------------------------------------------------------------- restriction
@dataclass
class Restriction:
    product: ReducedProduct
    projection: np.ndarray       # element of the original -> element of the restriction
    indices: tuple[int, ...]     # original indices kept

    @property
    def structure(self) -> FiniteStructure:
        return self.product.structure


def restrict(rp: ReducedProduct, support: SupportValue | int, representative: int | None = None) -> Restriction:
    """``M|S``: keep the indices of a representative of ``S`` with the induced ideal."""
    mask = support.mask if isinstance(support, SupportValue) else rp.algebra.canonical(int(support))
    if mask == 0:
        raise ReducedProductError("cannot restrict to the zero class")
    rep = mask if representative is None else int(representative)
    if rp.algebra.canonical(rep) != mask:
        raise ReducedProductError("representative is not in the given class")
    keep = indices_of(rep)
    sub = ReducedProduct([rp.factors[i] for i in keep], rp.ideal.restrict(rep))
    proj = sub.indices_of_tuples(rp.coords[:, keep])
    return Restriction(sub, proj, tuple(keep))


def is_isomorphism(a: FiniteStructure, b: FiniteStructure, bijection: Sequence[int]) -> bool:
    p = np.asarray(bijection, dtype=np.int64)
    if a.signature != b.signature or a.size != b.size or sorted(p.tolist()) != list(range(b.size)):
        return False
    for fname, tab in a.functions.items():
        if not np.array_equal(p[tab], b.functions[fname][np.ix_(*([p] * tab.ndim))]):
            return False
    for rname, tab in a.relations.items():
        if not np.array_equal(tab, b.relations[rname][np.ix_(*([p] * tab.ndim))]):
            return False
    return all(p[v] == b.constants[c] for c, v in a.constants.items())


def restriction_independent(rp: ReducedProduct, support: SupportValue) -> bool:
    """Restricting via the least and the largest representative gives isomorphic results."""
    small = restrict(rp, support)
    big = restrict(rp, support, support.mask | rp.ideal.union)
    if small.product.size != big.product.size:
        return False
    bij = np.full(small.product.size, -1, dtype=np.int64)
    bij[small.projection] = big.projection
    if np.any(bij < 0):
        return False
    # the two projections must have the same fibres
    check = np.full(small.product.size, -1, dtype=np.int64)
    check[small.projection] = big.projection
    if not np.array_equal(check[small.projection], big.projection):
        return False
    return is_isomorphism(small.structure, big.structure, bij)


def is_projection_homomorphism(rp: ReducedProduct, r: Restriction) -> bool:
    a, b, p = rp.structure, r.structure, r.projection
    if len(set(p.tolist())) != b.size:
        return False
    for fname, tab in a.functions.items():
        k = tab.ndim
        if not np.array_equal(p[tab], b.functions[fname][np.ix_(*([p] * k))]):
            return False
    for rname, tab in a.relations.items():
        if np.any(tab & ~b.relations[rname][np.ix_(*([p] * tab.ndim))]):
            return False
    return True


# ------------------------------------------------------------------- Los
class LosPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class LosReport:
    formula: str
    product_side: bool
    failure_mask: int
    index_side: bool

    @property
    def agrees(self) -> bool:
        return self.product_side == self.index_side


def _certified(phi, factors) -> HCertificate:
    cert = classify_h(phi)
    if not isinstance(cert, HCertificate):
        raise LosPreconditionError(f"not in the preserved class: {cert.reason} at {cert.blocking}")
    if cert.obligations and not cert.discharged_in(factors):
        raise LosPreconditionError("guard obligations are not satisfied in every factor")
    return cert


def los_check(rp: ReducedProduct, h, elems: Sequence, variables: Sequence[str] | None = None) -> LosReport:
    """Truth in the product versus membership of the failure set in the ideal."""
    h = as_formula(h, rp.factors[0])
    _certified(h, rp.factors)
    variables = tuple(variables) if variables is not None else tuple(sorted(h.free_vars))
    tuples = _as_tuples(rp, elems)
    idx = [rp.index_of(t) for t in tuples]
    product_side = evaluator(rp.structure, h, variables).holds(idx)
    holds_mask = rp.coordinate_truth(h, tuples, variables)
    failure = rp.ideal.full & ~holds_mask
    return LosReport(str(h), product_side, failure, failure in rp.ideal)


def los_exhaustive(rp: ReducedProduct, h, variables: Sequence[str] | None = None) -> tuple[bool, dict | None]:
    """Check the Los equivalence at every assignment; return the first failure."""
    h = as_formula(h, rp.factors[0])
    _certified(h, rp.factors)
    variables = tuple(variables) if variables is not None else tuple(sorted(h.free_vars))
    k = len(variables)
    truth = evaluator(rp.structure, h, variables).grid()
    # factor truth tables, indexed by rp assignments through the coordinates
    hold_all = np.zeros(truth.shape, dtype=np.int64)
    grids = np.indices((rp.size,) * k).reshape(k, -1) if k else np.zeros((0, 1), dtype=np.int64)
    for i, m in enumerate(rp.factors):
        ft = evaluator(m, h, variables).grid()
        if k:
            fidx = np.zeros(grids.shape[1], dtype=np.int64)
            for j in range(k):
                fidx = fidx * m.size + rp.coords[grids[j], i]
            hold_all |= ft[fidx].astype(np.int64) << i
        else:
            hold_all |= int(ft[0]) << i
    members = np.zeros(rp.ideal.full + 1, dtype=bool)
    members[list(rp.ideal.members)] = True
    index_side = members[rp.ideal.full & ~hold_all]
    bad = np.flatnonzero(index_side != truth.astype(bool))
    if bad.size == 0:
        return True, None
    where = [int(grids[j, bad[0]]) for j in range(k)]
    return False, {v: rp.label(x) for v, x in zip(variables, where)}


# -------------------------------------------------------- Boolean identities
def support_identities(rp: ReducedProduct, phi, psi, elems: Sequence,
                       variables: Sequence[str] | None = None) -> dict[str, bool]:
    """Negation, conjunction and disjunction commute with taking supports."""
    phi = as_formula(phi, rp.factors[0])
    psi = as_formula(psi, rp.factors[0])
    variables = tuple(variables) if variables is not None else tuple(sorted(phi.free_vars | psi.free_vars))
    s_phi = supp_phi(rp, phi, elems, variables)
    s_psi = supp_phi(rp, psi, elems, variables)
    return {
        "negation": supp_phi(rp, Not(phi), elems, variables) == ~s_phi,
        "conjunction": supp_phi(rp, And(phi, psi), elems, variables) == (s_phi & s_psi),
        "disjunction": supp_phi(rp, Or(phi, psi), elems, variables) == (s_phi | s_psi),
    }


@dataclass(frozen=True)
class LargestSupport:
    direct: SupportValue
    largest: SupportValue
    witness: tuple[int, ...]
    satisfying: tuple[SupportValue, ...]

    @property
    def agrees(self) -> bool:
        return self.direct == self.largest


def patch_tuples(rp: ReducedProduct, support: SupportValue, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Canonical tuple agreeing with ``a`` on ``support`` and with ``b`` elsewhere."""
    ta, tb = _as_tuples(rp, [a, b])
    return tuple(ta[i] if support.mask >> i & 1 else tb[i] for i in range(rp.k))


def largest_S_support(rp: ReducedProduct, phi, elems: Sequence,
                      variables: Sequence[str] | None = None) -> LargestSupport:
    """Support of ``phi`` at ``elems`` computed as the largest ``S`` with ``phi(a_S)``.

    ``a_S`` agrees with ``a`` on ``S`` and with a fixed satisfying tuple ``b``
    off ``S``. The result is compared against the direct support.
    """
    phi = as_formula(phi, rp.factors[0])
    _certified(phi, rp.factors)
    variables = tuple(variables) if variables is not None else tuple(sorted(phi.free_vars))
    ev = evaluator(rp.structure, phi, variables)
    truth = ev.grid()
    hits = np.flatnonzero(truth)
    if hits.size == 0:
        raise ValueError("formula is not satisfiable in the reduced product")
    witness = tuple(int(x) for x in np.unravel_index(int(hits[0]), (rp.size,) * len(variables))) \
        if variables else ()
    a_idx = [rp.element(x) for x in elems]
    good = []
    for s in rp.algebra.elements:
        mixed = [rp.index_of(patch_tuples(rp, s, a, b)) for a, b in zip(a_idx, witness)]
        if ev.holds(mixed):
            good.append(s)
    top = rp.algebra.zero
    for s in good:
        top = top | s
    if top not in good or not all(s <= top for s in good):
        raise AssertionError("satisfying supports have no largest element")
    direct = supp_phi(rp, phi, a_idx, variables)
    return LargestSupport(direct, top, witness, tuple(good))


def patch(rp: ReducedProduct, A: SupportValue, B: SupportValue, a, b) -> int:
    """An element agreeing with ``a`` on ``A`` and with ``b`` on ``B`` (disjoint)."""
    if not (A & B).is_zero():
        raise ValueError("patching needs disjoint supports")
    c = rp.index_of(patch_tuples(rp, A, rp.element(a), rp.element(b)))
    assert A <= supp_eq(rp, c, rp.element(a)) and B <= supp_eq(rp, c, rp.element(b))
    return c


# -------------------------------------------------- support relation check
@dataclass(frozen=True)
class SupportRelationResult:
    holds: bool
    checked: int
    orbits: int
    counterexample: dict | None = None

    def __bool__(self):
        return self.holds


def _orbit_representatives(structure: FiniteStructure, arity: int):
    """Orbit representatives (with sizes) of the diagonal automorphism action on tuples."""
    n = structure.size
    autos = [np.asarray(p, dtype=np.int64) for p in structure.automorphisms()]
    for p in autos:
        if not structure.is_automorphism(p):
            raise AssertionError("automorphism check failed")
    tuples = np.indices((n,) * arity).reshape(arity, -1).T
    weights = n ** np.arange(arity - 1, -1, -1, dtype=np.int64)
    canon = tuples @ weights
    for p in autos:
        canon = np.minimum(canon, p[tuples] @ weights)
    reps, counts = np.unique(canon, return_counts=True)
    rep_tuples = np.stack(np.unravel_index(reps, (n,) * arity), axis=1)
    return rep_tuples, counts


def defines_coordinatewise(rp: ReducedProduct, formula, variables: Sequence[str], coordinate_test,
                           prune: bool = True, chunk: int = 1 << 16, describe=None) -> SupportRelationResult:
    """Does ``formula`` hold exactly where ``coordinate_test`` holds off the ideal?

    ``coordinate_test`` maps an ``(m, arity, k)`` array of canonical tuples to an
    ``(m, k)`` boolean array; the target relation holds at an assignment when
    the failing coordinates form a member of the ideal. With ``prune`` one
    assignment per orbit of the coordinatewise automorphism group is checked.
    Both sides are invariant under those automorphisms, so nothing is lost,
    provided ``coordinate_test`` commutes with automorphisms (equalities and
    constants fixed by every automorphism do).
    """
    formula = as_formula(formula, rp.factors[0])
    variables = tuple(variables)
    arity = len(variables)
    ev = evaluator(rp.structure, formula, variables)
    free = rp.free
    union_cols = [i for i in range(rp.k) if rp.ideal.union >> i & 1]

    def target(tuples: np.ndarray) -> np.ndarray:
        bad = ~coordinate_test(tuples)
        bad[:, union_cols] = False
        return ~bad.any(axis=1)

    def report(idx, value):
        if describe is not None:
            return describe(rp, [int(v) for v in idx], bool(value), variables)
        return {"assignment": {v: rp.label(int(x)) for v, x in zip(variables, idx)}, "formula": bool(value)}

    checked = 0
    if prune and free:
        reps = [_orbit_representatives(rp.factors[i], arity)[0] for i in free]
        sizes = [len(r) for r in reps]
        total = int(np.prod(sizes))
        for start in range(0, total, chunk):
            stop = min(total, start + chunk)
            choice = np.stack(np.unravel_index(np.arange(start, stop), sizes), axis=1)
            tuples = np.zeros((stop - start, arity, rp.k), dtype=np.int64)
            for j, i in enumerate(free):
                tuples[:, :, i] = reps[j][choice[:, j]]
            idx = rp.indices_of_tuples(tuples)
            got = ev.rows(idx.astype(np.int32)).astype(bool)
            checked += stop - start
            bad = np.flatnonzero(got != target(tuples))
            if bad.size:
                return SupportRelationResult(False, checked, total, report(idx[bad[0]], got[bad[0]]))
        return SupportRelationResult(True, rp.size ** arity, total)
    n = rp.size
    total = n ** arity
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        idx = np.stack(np.unravel_index(np.arange(start, stop), (n,) * arity), axis=1)
        got = ev.rows(idx.astype(np.int32)).astype(bool)
        bad = np.flatnonzero(got != target(rp.coords[idx]))
        if bad.size:
            return SupportRelationResult(False, start + int(bad[0]) + 1, total, report(idx[bad[0]], got[bad[0]]))
    return SupportRelationResult(True, total, total)


def _containment_test(tuples: np.ndarray) -> np.ndarray:
    return (tuples[:, 0, :] != tuples[:, 1, :]) | (tuples[:, 2, :] == tuples[:, 3, :])


def defines_support_relation(rp: ReducedProduct, Phi, variables: Sequence[str] = ("x", "y", "u", "v"),
                             prune: bool = True, chunk: int = 1 << 16) -> SupportRelationResult:
    """Does ``Phi(a, a', b, b')`` hold exactly when agree(a,a') is inside agree(b,b')?"""
    if len(tuple(variables)) != 4:
        raise ValueError("the support relation formula has four variables")
    return defines_coordinatewise(rp, Phi, variables, _containment_test, prune, chunk, _support_counterexample)


def defines_identity_implication(rp: ReducedProduct, theta, variables: Sequence[str] = ("x", "y"),
                                 constant: str = "e", prune: bool = True) -> SupportRelationResult:
    """Does ``theta(a, b)`` hold exactly when ``b`` is the constant wherever ``a`` is?"""
    consts = np.array([f.constants[constant] for f in rp.factors])

    def test(t):
        return (t[:, 0, :] != consts) | (t[:, 1, :] == consts)
    return defines_coordinatewise(rp, theta, variables, test, prune)


def defines_comparison(rp: ReducedProduct, chi, variables: Sequence[str] = ("x", "y", "t"),
                       prune: bool = True) -> SupportRelationResult:
    """Does ``chi(a, b, c)`` hold exactly when agree(a,c) is inside agree(b,c)?"""
    def test(t):
        return (t[:, 0, :] != t[:, 2, :]) | (t[:, 1, :] == t[:, 2, :])
    return defines_coordinatewise(rp, chi, variables, test, prune)


def _support_counterexample(rp, quad, formula_value, variables) -> dict:
    a, a2, b, b2 = (int(v) for v in quad)
    return {
        "assignment": {v: rp.label(x) for v, x in zip(variables, (a, a2, b, b2))},
        "formula": bool(formula_value),
        f"agree({variables[0]},{variables[1]})": str(supp_eq(rp, a, a2)),
        f"agree({variables[2]},{variables[3]})": str(supp_eq(rp, b, b2)),
    }


def random_ideal(k: int, rng) -> FiniteIdeal:
    """A uniformly chosen proper ideal on ``k`` indices (one per proper union set)."""
    union = int(rng.integers(0, (1 << k) - 1))
    return make_ideal(k, [indices_of(union)] if union else [])


def all_ideals(k: int) -> list[FiniteIdeal]:
    return [make_ideal(k, [indices_of(u)] if u else []) for u in range((1 << k) - 1)]


__all__ = [
    "FiniteIdeal", "IdealError", "LargestSupport", "LosPreconditionError", "LosReport", "QuotientBA",
    "ReducedProduct", "ReducedProductError", "Restriction", "SupportRelationResult", "SupportValue",
    "all_ideals", "c_theta", "defines_comparison", "defines_coordinatewise", "defines_identity_implication",
    "defines_support_relation", "is_isomorphism", "is_projection_homomorphism",
    "largest_S_support", "load_ideal", "los_check", "los_exhaustive", "make_ideal", "mask_of",
    "mask_text", "nonidentity_support", "patch", "random_ideal", "reduced_product", "restrict",
    "restriction_independent", "sentence_mod_ideal", "supp_eq", "supp_phi", "support_identities",
]
