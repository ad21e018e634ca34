"""Named groups and structures with their expected verdicts.

Lookup names follow the command line: ``S1..S7``, ``A4..A6``, ``C2..``,
``Dih3..``, ``Q8``, ``SL2_5``, ``GL2_3``, ``RPS``, ``Chain4``.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .groups.core import CLASS_BOUND, FiniteGroup, GroupError, SizeGuardError
from .logic.signature import MAGMA, ORDER
from .logic.structure import FiniteStructure

MAX_SYMMETRIC_DEGREE = 7


class CatalogError(KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "catalog error"


# ------------------------------------------------------------- permutations
def cycle_label(perm: Sequence[int], compact: bool | None = None) -> str:
    """Cycle notation with 1-based points; ``e`` for the identity."""
    n = len(perm)
    compact = n <= 9 if compact is None else compact
    seen = [False] * n
    parts = []
    for i in range(n):
        if seen[i] or perm[i] == i:
            seen[i] = True
            continue
        cyc, j = [], i
        while not seen[j]:
            seen[j] = True
            cyc.append(j + 1)
            j = perm[j]
        sep = "" if compact else " "
        parts.append("(" + sep.join(str(x) for x in cyc) + ")")
    return "".join(parts) or "e"


def parse_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Inverse of :func:`cycle_label`; accepts ``(12)(34)`` or ``(1 2)(3 4)``."""
    text = text.strip()
    perm = list(range(degree))
    if text in ("e", "()", ""):
        return tuple(perm)
    cycles = re.findall(r"\(([^()]*)\)", text)
    if "".join(f"({c})" for c in cycles).replace(" ", "") != text.replace(" ", ""):
        raise GroupError(f"bad cycle notation {text!r}")
    # later cycles act first, matching composition of the written product
    for body in reversed(cycles):
        pts = body.replace(",", " ").split()
        if len(pts) == 1 and len(pts[0]) > 1 and degree <= 9:
            pts = list(pts[0])
        pts = [int(p) - 1 for p in pts]
        if any(not 0 <= p < degree for p in pts) or len(set(pts)) != len(pts):
            raise GroupError(f"bad cycle {body!r} for degree {degree}")
        step = {pts[i]: pts[(i + 1) % len(pts)] for i in range(len(pts))}
        perm = [step.get(perm[i], perm[i]) for i in range(degree)]
    return tuple(perm)


def permutation_group(perms: Sequence[Sequence[int]], name: str = "", provenance: str = "",
                      labels: Sequence[str] | None = None) -> FiniteGroup:
    """Group table of a set of permutations closed under composition.

    ``table[a, b]`` is ``a o b`` (apply ``b`` first).
    """
    arr = np.asarray(perms, dtype=np.int64)
    m, d = arr.shape
    if m > CLASS_BOUND:
        raise SizeGuardError(f"{m} permutations exceed the bound {CLASS_BOUND}")
    weights = d ** np.arange(d - 1, -1, -1, dtype=np.int64)
    codes = arr @ weights
    order = np.argsort(codes)
    sorted_codes = codes[order]
    table = np.empty((m, m), dtype=np.int32)
    for start in range(0, m, 128):
        block = arr[start:start + 128]
        comp = block[:, arr]
        cc = comp @ weights
        pos = np.searchsorted(sorted_codes, cc)
        if np.any(pos >= m) or np.any(sorted_codes[np.minimum(pos, m - 1)] != cc):
            raise GroupError("permutations are not closed under composition")
        table[start:start + 128] = order[pos]
    if labels is None:
        labels = [cycle_label(p) for p in arr.tolist()]
    g = FiniteGroup(table, labels, name, provenance, validate=m <= 512)
    g.permutations = arr
    return g


def symmetric(n: int) -> FiniteGroup:
    if not 1 <= n <= MAX_SYMMETRIC_DEGREE:
        raise SizeGuardError(
            f"S{n} is outside the supported range 1..{MAX_SYMMETRIC_DEGREE} (dense tables)")
    return permutation_group(list(itertools.permutations(range(n))), f"S{n}", f"symmetric group of degree {n}")


def _sign(p: Sequence[int]) -> int:
    inversions = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return -1 if inversions % 2 else 1


def alternating(n: int) -> FiniteGroup:
    if not 1 <= n <= MAX_SYMMETRIC_DEGREE:
        raise SizeGuardError(f"A{n} is outside the supported range")
    perms = [p for p in itertools.permutations(range(n)) if _sign(p) == 1]
    return permutation_group(perms, f"A{n}", f"alternating group of degree {n}")


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic order must be positive")
    ar = np.arange(n)
    return FiniteGroup((ar[:, None] + ar[None, :]) % n, [str(i) for i in range(n)], f"C{n}",
                       f"cyclic group of order {n}")


def dihedral(m: int) -> FiniteGroup:
    """Symmetries of a regular m-gon, order 2m; elements ``r^k`` and ``r^k s``."""
    if m < 2:
        raise GroupError("dihedral groups need m >= 2")
    n = 2 * m
    table = np.empty((n, n), dtype=np.int32)
    for x in range(n):
        a, eps = x % m, x // m
        for y in range(n):
            b, dlt = y % m, y // m
            k = (a + (b if eps == 0 else -b)) % m
            table[x, y] = k + m * ((eps + dlt) % 2)

    def lab(x):
        k, s = x % m, x // m
        rot = "" if k == 0 else ("r" if k == 1 else f"r^{k}")
        if s:
            return f"{rot} s".strip() if rot else "s"
        return rot or "e"
    return FiniteGroup(table, [lab(x) for x in range(n)], f"Dih{m}", f"dihedral group of order {n}")


def quaternion8() -> FiniteGroup:
    units = ["1", "i", "j", "k"]
    # unit products: (sign, unit)
    prod = {
        ("1", u): (1, u) for u in units
    }
    prod.update({(u, "1"): (1, u) for u in units})
    prod.update({("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
                 ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
                 ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})
    elems = [(s, u) for u in units for s in (1, -1)]
    index = {e: i for i, e in enumerate(elems)}
    table = np.empty((8, 8), dtype=np.int32)
    for a, (sa, ua) in enumerate(elems):
        for b, (sb, ub) in enumerate(elems):
            s, u = prod[(ua, ub)]
            table[a, b] = index[(sa * sb * s, u)]
    labels = [("" if s == 1 else "-") + u for s, u in elems]
    return FiniteGroup(table, labels, "Q8", "quaternion group of order 8")


# ------------------------------------------------------------ finite fields
@lru_cache(maxsize=None)
def field_tables(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Addition and multiplication tables of GF(q) for q in {2, 3, 4, 5, 7}."""
    if q in (2, 3, 5, 7):
        ar = np.arange(q)
        return (ar[:, None] + ar[None, :]) % q, (ar[:, None] * ar[None, :]) % q
    if q == 4:
        # elements a0 + a1*w encoded as a0 + 2*a1, with w^2 = w + 1
        add = np.array([[a ^ b for b in range(4)] for a in range(4)])
        mul = np.zeros((4, 4), dtype=np.int64)
        for a in range(4):
            for b in range(4):
                a0, a1, b0, b1 = a & 1, a >> 1, b & 1, b >> 1
                c0 = (a0 * b0 + a1 * b1) % 2
                c1 = (a0 * b1 + a1 * b0 + a1 * b1) % 2
                mul[a, b] = c0 + 2 * c1
        return add, mul
    raise GroupError(f"GF({q}) is not supported (use 2, 3, 4, 5 or 7)")


def _matmul_batch(a: np.ndarray, bs: np.ndarray, q: int) -> np.ndarray:
    """``a @ b`` over GF(q) for one matrix ``a`` and a stack ``bs``."""
    add, mul = field_tables(q)
    n = a.shape[0]
    if q in (2, 3, 5, 7):
        return np.einsum("ij,mjk->mik", a, bs) % q
    out = np.zeros_like(bs)
    for j in range(n):
        term = mul[a[:, j][None, :, None], bs[:, j, :][:, None, :]]
        out = add[out, term]
    return out


def _det(mat: np.ndarray, q: int) -> int:
    add, mul = field_tables(q)
    n = mat.shape[0]
    neg = [int(np.flatnonzero(add[x] == 0)[0]) for x in range(q)]
    total = 0
    for perm in itertools.permutations(range(n)):
        term = 1
        for i in range(n):
            term = int(mul[term, mat[i, perm[i]]])
        if _sign(perm) < 0:
            term = neg[term]
        total = int(add[total, term])
    return total


def matrix_group(n: int, q: int, special: bool) -> FiniteGroup:
    kind = "SL" if special else "GL"
    if n not in (2, 3) or q not in (2, 3, 4, 5, 7):
        raise GroupError(f"{kind}({n},{q}) not supported: n in {{2,3}}, q in {{2,3,4,5,7}}")
    order = 1
    for i in range(n):
        order *= q ** n - q ** i
    if special:
        order //= q - 1
    if order > CLASS_BOUND:
        raise SizeGuardError(f"{kind}({n},{q}) has order {order} > {CLASS_BOUND}")
    add, mul = field_tables(q)
    eye = np.eye(n, dtype=np.int64)
    gens = []
    for i in range(n):
        for j in range(n):
            if i != j:
                for t in range(1, q):
                    m = eye.copy()
                    m[i, j] = t
                    gens.append(m)
    if not special:
        prim = next(w for w in range(1, q) if _field_order(w, q) == q - 1)
        m = eye.copy()
        m[0, 0] = prim
        gens.append(m)
    weights = q ** np.arange(n * n - 1, -1, -1, dtype=np.int64)

    def code(ms):
        return ms.reshape(len(ms), -1) @ weights

    gen_stack = np.stack(gens)
    seen = {int(code(eye[None])[0]): eye}
    frontier = [eye]
    while frontier:
        nxt = []
        for a in frontier:
            prods = _matmul_batch(a, gen_stack, q)
            for c, mtx in zip(code(prods).tolist(), prods):
                if c not in seen:
                    seen[c] = mtx
                    nxt.append(mtx)
        frontier = nxt
    if len(seen) != order:
        raise GroupError(f"closure produced {len(seen)} matrices, expected {order}")
    codes = np.array(sorted(seen))
    mats = np.stack([seen[c] for c in codes.tolist()])
    table = np.empty((order, order), dtype=np.int32)
    for a in range(order):
        prods = _matmul_batch(mats[a], mats, q)
        table[a] = np.searchsorted(codes, code(prods))
    labels = ["[" + ";".join(" ".join(str(int(x)) for x in row) for row in m) + "]" for m in mats]
    g = FiniteGroup(table, labels, f"{kind}{n}_{q}", f"{'special' if special else 'general'} linear group "
                    f"of degree {n} over GF({q})", validate=order <= 512)
    g.matrices = mats
    g.field_order = q
    return g


def _field_order(w: int, q: int) -> int:
    _, mul = field_tables(q)
    k, x = 1, w
    while x != 1:
        x = int(mul[x, w])
        k += 1
    return k


# ---------------------------------------------------------------- structures
def rps() -> FiniteStructure:
    """Rock-paper-scissors magma: the product of two moves is the winner."""
    r, p, s = 0, 1, 2
    tab = np.zeros((3, 3), dtype=np.int32)
    wins = {(r, r): r, (r, p): p, (r, s): r, (p, p): p, (p, s): s, (s, s): s}
    for (a, b), c in wins.items():
        tab[a, b] = tab[b, a] = c
    return FiniteStructure(MAGMA, 3, {"*": tab}, labels=["R", "P", "S"], name="RPS")


def chain(n: int) -> FiniteStructure:
    ar = np.arange(n)
    return FiniteStructure(ORDER, n, relations={"le": ar[:, None] <= ar[None, :]}, name=f"Chain{n}")


# ------------------------------------------------------------------ registry
@dataclass(frozen=True)
class ExpectedVerdict:
    outcome: str            # recognizes | fails | open
    basis: str              # the result the expectation rests on, in words
    source: str = "reference"   # reference | computed
    anomaly: str = ""


@dataclass
class CatalogEntry:
    name: str
    kind: str               # group | structure
    params: dict
    builder: Callable[[], object] = field(repr=False)
    expected: ExpectedVerdict | None = None

    def build(self):
        return _build_cached(self.name)


_NAME_RE = re.compile(r"^(S|A|C|Dih|Q|SL|GL|RPS|Chain)(\d*)(?:_(\d+))?$")


def _expected_for(family: str, n: int, q: int | None) -> ExpectedVerdict | None:
    if family == "S":
        if n >= 3:
            return ExpectedVerdict("recognizes", "symmetric groups of degree at least 3")
        return ExpectedVerdict("fails", "abelian groups carry a nontrivial map into their center")
    if family == "A":
        if n == 5:
            return ExpectedVerdict("recognizes", "nonabelian simple groups")
        if n >= 6:
            return ExpectedVerdict("recognizes", "nonabelian simple groups", "computed")
        if n == 4:
            return ExpectedVerdict("recognizes", "order-3 class centralizers are trivial", "computed")
        return ExpectedVerdict("fails", "abelian groups carry a nontrivial map into their center", "computed")
    if family == "C":
        return ExpectedVerdict("fails", "abelian groups carry a nontrivial map into their center")
    if family == "Dih":
        if n % 2:
            return ExpectedVerdict("recognizes", "odd dihedral groups: involution class centralizers are trivial")
        return ExpectedVerdict("fails", "even dihedral groups have a nontrivial center reached by a homomorphism")
    if family == "Q":
        return ExpectedVerdict("fails", "nilpotent groups map onto part of their center")
    if family == "SL":
        if (n, q) == (2, 5):
            return ExpectedVerdict("recognizes", "perfect group, bounded commutator width, centralizers of "
                                   "nonabelian normal subgroups equal the center")
        return None
    if family == "GL":
        if q == 2:
            return ExpectedVerdict("fails", "general linear groups map through the determinant into scalars",
                                   anomaly=f"GL({n},2) equals SL({n},2); the determinant map is trivial over "
                                   "GF(2), so the usual obstruction is absent")
        return ExpectedVerdict("fails", "general linear groups map through the determinant into scalars")
    if family == "RPS":
        return ExpectedVerdict("recognizes", "an equality-comparison formula exists in the magma")
    return None


def _parse_name(name: str):
    m = _NAME_RE.match(name.strip())
    if not m:
        raise CatalogError(f"unknown catalog name {name!r}")
    family, num, sub = m.group(1), m.group(2), m.group(3)
    if family == "RPS":
        if num or sub:
            raise CatalogError(f"unknown catalog name {name!r}")
        return family, None, None
    if not num:
        raise CatalogError(f"catalog name {name!r} needs a size")
    n = int(num)
    q = int(sub) if sub else None
    if family in ("SL", "GL") and q is None:
        raise CatalogError(f"{name!r}: write e.g. SL2_5")
    if family not in ("SL", "GL") and q is not None:
        raise CatalogError(f"unknown catalog name {name!r}")
    if family == "Q" and n != 8:
        raise CatalogError("only Q8 is available")
    return family, n, q


def entry(name: str) -> CatalogEntry:
    family, n, q = _parse_name(name)
    canonical = name.strip()
    builders = {
        "S": lambda: symmetric(n), "A": lambda: alternating(n), "C": lambda: cyclic(n),
        "Dih": lambda: dihedral(n), "Q": quaternion8,
        "SL": lambda: matrix_group(n, q, True), "GL": lambda: matrix_group(n, q, False),
        "RPS": rps, "Chain": lambda: chain(n),
    }
    kind = "structure" if family in ("RPS", "Chain") else "group"
    params = {"n": n} if q is None else {"n": n, "q": q}
    return CatalogEntry(canonical, kind, params, builders[family], _expected_for(family, n or 0, q))


@lru_cache(maxsize=32)
def _build_cached(name: str):
    e = entry(name)
    return e.builder()


def get(name: str):
    """Build (and cache) the named group or structure."""
    entry(name)
    return _build_cached(name.strip())


def group(name: str) -> FiniteGroup:
    obj = get(name)
    if not isinstance(obj, FiniteGroup):
        raise CatalogError(f"{name!r} is not a group")
    return obj


LISTED = ["S2", "S3", "S4", "S5", "S6", "S7", "A4", "A5", "A6", "C2", "C3", "C4", "C5", "C6",
          "Dih3", "Dih4", "Dih5", "Dih6", "Dih7", "Dih8", "Q8", "SL2_2", "SL2_3", "SL2_4", "SL2_5",
          "GL2_2", "GL2_3", "GL3_2", "RPS", "Chain4"]


def list_entries() -> list[CatalogEntry]:
    return [entry(n) for n in LISTED]


# ------------------------------------------------------------------ file input
def load_group(path_or_data) -> FiniteGroup:
    """Read a group from JSON: a table, permutations with degree, or matrices."""
    if isinstance(path_or_data, (str, bytes)):
        with open(path_or_data) as fh:
            data = json.load(fh)
    else:
        data = path_or_data
    name = data.get("name", "")
    if "table" in data:
        return FiniteGroup(data["table"], data.get("labels"), name, "table from file")
    if "permutations" in data:
        degree = int(data["degree"])
        perms = [parse_cycles(p, degree) if isinstance(p, str) else tuple(int(x) for x in p)
                 for p in data["permutations"]]
        return permutation_group(_close_perms(perms, degree), name, "permutations from file")
    if "matrices" in data:
        raise GroupError("matrix input: use the catalog names SLn_q / GLn_q")
    raise GroupError("group JSON needs 'table', 'permutations' or 'matrices'")


def _close_perms(gens, degree):
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                c = tuple(p[g[i]] for i in range(degree))
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
                    if len(seen) > CLASS_BOUND:
                        raise SizeGuardError("generated permutation group is too large")
        frontier = nxt
    return sorted(seen)
