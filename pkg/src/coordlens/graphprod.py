"""Words in graph products of finite groups.

A graph product takes a simple graph with a finite group at each vertex and
forms the free product of the vertex groups, with groups at adjacent vertices
commuting. Elements are handled as syllable words: a syllable is a pair
``(vertex index, nontrivial element index)``. Reduction merges two syllables at
the same vertex whenever everything between them commutes with that vertex.
Reduced words for one element differ only by swapping adjacent commuting
syllables, so fixing the least-vertex-first topological order of the
dependence poset gives a canonical word.
"""
from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .groups.core import FiniteGroup, direct_product

Syllable = tuple[int, int]
Word = tuple[Syllable, ...]


class GraphProductError(ValueError):
    pass


@dataclass(eq=False)
class ProductSpec:
    vertices: tuple[str, ...]
    edges: frozenset[frozenset[int]]
    groups: tuple[FiniteGroup, ...]
    adjacency: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.vertices = tuple(str(v) for v in self.vertices)
        self.groups = tuple(self.groups)
        n = len(self.vertices)
        if len(set(self.vertices)) != n:
            raise GraphProductError("vertex names must be distinct")
        if len(self.groups) != n:
            raise GraphProductError("one group per vertex is required")
        adj = np.zeros((n, n), dtype=bool)
        norm = set()
        for e in self.edges:
            pair = tuple(sorted(int(x) for x in e))
            if len(pair) != 2 or pair[0] == pair[1]:
                raise GraphProductError(f"edge {sorted(e)} is a loop or malformed")
            if not all(0 <= x < n for x in pair):
                raise GraphProductError(f"edge {pair} names a missing vertex")
            adj[pair[0], pair[1]] = adj[pair[1], pair[0]] = True
            norm.add(frozenset(pair))
        self.edges = frozenset(norm)
        self.adjacency = adj
        for v, g in zip(self.vertices, self.groups):
            if g.order < 2:
                raise GraphProductError(f"vertex {v} carries a trivial group")

    @property
    def n(self) -> int:
        return len(self.vertices)

    def commute(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u, v])

    def complement_neighbours(self, v: int) -> list[int]:
        return [u for u in range(self.n) if u != v and not self.adjacency[u, v]]

    def vertex(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            if 0 <= int(name) < self.n:
                return int(name)
        elif name in self.vertices:
            return self.vertices.index(name)
        raise GraphProductError(f"unknown vertex {name!r}")

    def sizes(self) -> list[int]:
        return [g.order for g in self.groups]

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices),
                "edges": sorted(sorted(e) for e in self.edges),
                "groups": {v: g.name for v, g in zip(self.vertices, self.groups)}}


def make_spec(vertices: Sequence, edges: Iterable[Sequence[int]], groups) -> ProductSpec:
    """``groups`` is a sequence or a vertex->group mapping; names go through the catalog."""
    from . import catalog
    vertices = [str(v) for v in vertices]
    if isinstance(groups, dict):
        groups = [groups[v] for v in vertices]
    built = [catalog.group(g) if isinstance(g, str) else g for g in groups]
    idx = {v: i for i, v in enumerate(vertices)}
    es = []
    for e in edges:
        es.append(frozenset(idx[x] if isinstance(x, str) and x in idx else int(x) for x in e))
    return ProductSpec(tuple(vertices), frozenset(es), tuple(built))


def load_spec(path_or_data) -> ProductSpec:
    if isinstance(path_or_data, dict):
        data = path_or_data
    else:
        text = str(path_or_data)
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            with open(text) as fh:
                data = json.load(fh)
    for key in ("vertices", "edges", "groups"):
        if key not in data:
            raise GraphProductError(f"graph JSON lacks {key!r}")
    return make_spec(data["vertices"], data["edges"], data["groups"])


# ---------------------------------------------------------------- reduction
def _check_syllables(spec: ProductSpec, w: Sequence[Syllable]) -> Word:
    out = []
    for v, a in w:
        v, a = int(v), int(a)
        if not 0 <= v < spec.n:
            raise GraphProductError(f"syllable vertex {v} out of range")
        if not 0 <= a < spec.groups[v].order:
            raise GraphProductError(f"element {a} not in the group at {spec.vertices[v]}")
        out.append((v, a))
    return tuple(out)


def _merge_partner(spec: ProductSpec, w: Sequence[Syllable], i: int) -> int | None:
    """Least ``j > i`` at the same vertex reachable through commuting syllables."""
    v = w[i][0]
    for j in range(i + 1, len(w)):
        u = w[j][0]
        if u == v:
            return j
        if not spec.adjacency[u, v]:
            return None
    return None


def _merge(spec: ProductSpec, w: list[Syllable], i: int, j: int) -> list[Syllable]:
    v = w[i][0]
    g = spec.groups[v]
    prod = int(g.table[w[i][1], w[j][1]])
    rest = w[:i] + w[i + 1:j] + w[j + 1:]
    if prod == g.identity:
        return rest
    return w[:i] + [(v, prod)] + w[i + 1:j] + w[j + 1:]


def _drop_trivial(spec: ProductSpec, w: Sequence[Syllable]) -> list[Syllable]:
    return [(v, a) for v, a in w if a != spec.groups[v].identity]


def reduce_word(spec: ProductSpec, w: Sequence[Syllable], rng: random.Random | None = None) -> Word:
    """Merge mergeable syllable pairs until none remain.

    With ``rng`` the next merge is chosen at random and commuting neighbours
    are shuffled at random in between, which exercises other rewriting orders.
    """
    cur = _drop_trivial(spec, _check_syllables(spec, w))
    while True:
        if rng is None:
            pair = None
            for i in range(len(cur)):
                j = _merge_partner(spec, cur, i)
                if j is not None:
                    pair = (i, j)
                    break
        else:
            for _ in range(rng.randrange(3)):
                if len(cur) > 1:
                    k = rng.randrange(len(cur) - 1)
                    if spec.adjacency[cur[k][0], cur[k + 1][0]]:
                        cur[k], cur[k + 1] = cur[k + 1], cur[k]
            cands = [(i, j) for i in range(len(cur)) if (j := _merge_partner(spec, cur, i)) is not None]
            pair = rng.choice(cands) if cands else None
        if pair is None:
            return tuple(cur)
        cur = _merge(spec, cur, *pair)


def canonical_order(spec: ProductSpec, w: Sequence[Syllable]) -> Word:
    """Least-vertex-first topological order of the dependence poset of ``w``.

    Syllable ``i`` must precede ``j > i`` when their vertices do not commute
    (same vertex included).
    """
    w = list(w)
    n = len(w)
    preds = [0] * n
    succs: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if not spec.adjacency[w[i][0], w[j][0]]:
                preds[j] += 1
                succs[i].append(j)
    ready = sorted((w[i][0], i) for i in range(n) if preds[i] == 0)
    out = []
    while ready:
        _, i = ready.pop(0)
        out.append(w[i])
        for j in succs[i]:
            preds[j] -= 1
            if preds[j] == 0:
                ready.append((w[j][0], j))
        ready.sort()
    return tuple(out)


def normal_form(spec: ProductSpec, w: Sequence[Syllable], rng: random.Random | None = None) -> Word:
    return canonical_order(spec, reduce_word(spec, w, rng))


def is_reduced(spec: ProductSpec, w: Sequence[Syllable]) -> bool:
    w = list(w)
    if any(a == spec.groups[v].identity for v, a in w):
        return False
    return all(_merge_partner(spec, w, i) is None for i in range(len(w)))


def multiply(spec: ProductSpec, *words: Sequence[Syllable]) -> Word:
    return normal_form(spec, [s for w in words for s in w])


def inverse(spec: ProductSpec, w: Sequence[Syllable]) -> Word:
    return normal_form(spec, [(v, int(spec.groups[v].inverse[a])) for v, a in reversed(list(w))])


def conjugate(spec: ProductSpec, h: Sequence[Syllable], w: Sequence[Syllable]) -> Word:
    """``h w h^-1``."""
    return multiply(spec, h, w, inverse(spec, h))


# ---------------------------------------------------------------- heads and tails
@dataclass(frozen=True)
class HeadTail:
    head: frozenset[Syllable]
    tail: frozenset[Syllable]
    L: frozenset[int]
    R: frozenset[int]
    V: frozenset[int]
    length: int


def head_tail(spec: ProductSpec, w: Sequence[Syllable]) -> HeadTail:
    """First and last syllables over all reduced orderings of ``w``.

    A syllable can come first exactly when every earlier syllable commutes
    with it, and dually for last.
    """
    w = _check_syllables(spec, w)
    if not is_reduced(spec, w):
        raise GraphProductError("head_tail needs a reduced word")
    adj = spec.adjacency
    head = {w[i] for i in range(len(w)) if all(adj[w[j][0], w[i][0]] for j in range(i))}
    tail = {w[i] for i in range(len(w)) if all(adj[w[j][0], w[i][0]] for j in range(i + 1, len(w)))}
    return HeadTail(frozenset(head), frozenset(tail), frozenset(v for v, _ in head),
                    frozenset(v for v, _ in tail), frozenset(v for v, _ in w), len(w))


# ---------------------------------------------------------------- text syntax
def parse_word(spec: ProductSpec, text: str) -> Word:
    """``u:a * v:b * u:a``; ``e`` or an empty string is the identity."""
    text = text.strip()
    if text in ("", "e", "1"):
        return ()
    out = []
    for part in text.split("*"):
        part = part.strip()
        if ":" not in part:
            raise GraphProductError(f"syllable {part!r} is not of the form vertex:element")
        name, label = part.split(":", 1)
        v = spec.vertex(name.strip())
        try:
            a = spec.groups[v].element(label.strip())
        except Exception as exc:
            raise GraphProductError(f"{label.strip()!r} is not an element of the group at {name}") from exc
        out.append((v, a))
    return tuple(out)


def format_word(spec: ProductSpec, w: Sequence[Syllable]) -> str:
    if not w:
        return "e"
    return " * ".join(f"{spec.vertices[v]}:{spec.groups[v].labels[a]}" for v, a in w)


# ---------------------------------------------------------------- classification
@dataclass
class GraphClassification:
    outcome: str                  # recognizes | decomposable | open-RACG
    reason: str
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"outcome": self.outcome, "reason": self.reason, "witness": self.witness}


def complement_components(n: int, adjacency: np.ndarray) -> list[list[int]]:
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        comp, queue = [], deque([s])
        seen[s] = True
        while queue:
            x = queue.popleft()
            comp.append(x)
            for y in range(n):
                if y != x and not adjacency[x, y] and not seen[y]:
                    seen[y] = True
                    queue.append(y)
        comps.append(sorted(comp))
    return comps


def _adjacency_of(n: int, edges) -> np.ndarray:
    adj = np.zeros((n, n), dtype=bool)
    for e in edges:
        a, b = sorted(int(x) for x in e)
        if a == b:
            raise GraphProductError("loops are not allowed")
        adj[a, b] = adj[b, a] = True
    return adj


def rc_classify(n_or_spec, edges=None, sizes: Sequence[int] | None = None,
                names: Sequence[str] | None = None) -> GraphClassification:
    """Classify a graph product by the shape of the complement graph.

    Accepts a :class:`ProductSpec`, or a vertex count with an edge list and the
    vertex group orders.
    """
    if isinstance(n_or_spec, ProductSpec):
        spec = n_or_spec
        n, adj, sizes, names = spec.n, spec.adjacency, spec.sizes(), list(spec.vertices)
    else:
        n = int(n_or_spec)
        adj = _adjacency_of(n, edges or [])
        sizes = list(sizes or [])
        names = list(names) if names else [str(i) for i in range(n)]
    if len(sizes) != n:
        raise GraphProductError("one group order per vertex is required")
    if any(s < 2 for s in sizes):
        raise GraphProductError("vertex groups must be nontrivial")
    if n < 2:
        return GraphClassification("open-RACG" if sizes == [2] else "recognizes",
                                   "a single vertex: the product is the vertex group itself",
                                   {"note": "classify the vertex group directly"})
    comps = complement_components(n, adj)
    if len(comps) > 1:
        x = min(comps, key=lambda c: (len(c), c))
        y = [v for v in range(n) if v not in x]
        return GraphClassification(
            "decomposable", "the complement graph is disconnected, so the product splits as a direct product",
            {"X": [names[v] for v in x], "Y": [names[v] for v in y]})
    if any(s >= 3 for s in sizes):
        big = next(i for i, s in enumerate(sizes) if s >= 3)
        return GraphClassification("recognizes", "connected complement and a vertex group of order at least 3",
                                   {"large_vertex": names[big]})
    if n == 2:
        return GraphClassification("recognizes", "the infinite dihedral group (free product of two groups of order 2)",
                                   {"special_case": "C2 * C2"})
    return GraphClassification("open-RACG", "right-angled Coxeter group with connected complement; no criterion applies")


# ---------------------------------------------------------------- conjugation
@dataclass
class ConjugatorResult:
    conjugator: Word
    conjugate: Word
    route: str          # construction | search

    def to_json(self, spec: ProductSpec) -> dict:
        return {"conjugator": format_word(spec, self.conjugator),
                "conjugate": format_word(spec, self.conjugate), "route": self.route}


def _bfs_tree(spec: ProductSpec, root: int) -> tuple[dict[int, int | None], dict[int, int]]:
    parent: dict[int, int | None] = {root: None}
    dist = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in spec.complement_neighbours(x):
            if y not in parent:
                parent[y] = x
                dist[y] = dist[x] + 1
                queue.append(y)
    return parent, dist


def _path(parent: dict[int, int | None], leaf: int) -> list[int]:
    out = [leaf]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    return out


class _Chooser:
    """Picks nontrivial vertex-group elements: first choice, then random retries."""

    def __init__(self, spec: ProductSpec, rng: random.Random | None):
        self.spec, self.rng = spec, rng

    def pick(self, v: int, avoid: Iterable[int] = ()) -> int:
        g = self.spec.groups[v]
        bad = set(avoid) | {g.identity}
        opts = [a for a in range(g.order) if a not in bad] or [a for a in range(g.order) if a != g.identity]
        return opts[0] if self.rng is None else self.rng.choice(opts)


def _tree_word(spec: ProductSpec, root: int, ends: dict[int, int], ch: _Chooser) -> Word:
    """Syllables over the complement tree spanning ``root`` and the keys of ``ends``, nearest first.

    ``ends`` maps each target vertex to the syllable it must not cancel. A
    target leaf whose group offers no safe element is left out; its parent
    already blocks it.
    """
    parent, dist = _bfs_tree(spec, root)
    verts = set()
    for t in ends:
        verts.update(_path(parent, t))
    inner = {parent[x] for x in verts if parent[x] is not None}
    out = []
    for x in sorted(verts, key=lambda x: (dist[x], x)):
        if x in ends:
            grp = spec.groups[x]
            avoid = int(grp.inverse[ends[x]])
            if grp.order == 2 and x not in inner and x != root:
                continue
            out.append((x, ch.pick(x, avoid=[avoid])))
        else:
            out.append((x, ch.pick(x)))
    return tuple(out)


def _left_to(spec: ProductSpec, g: Word, big: int, ch: _Chooser) -> tuple[Word, Word]:
    """Conjugate so that the head sits at vertex ``big`` only. Returns (conjugator, result)."""
    ht = head_tail(spec, g)
    if ht.L == {big}:
        return (), g
    outside = [x for x in range(spec.n) if x not in ht.L]
    star = big if big in outside else outside[0]
    a = _tree_word(spec, star, {x: a for x, a in ht.head}, ch)
    h = a
    if star != big:
        parent, _ = _bfs_tree(spec, star)
        path = _path(parent, big)        # big ... star
        b = tuple((x, ch.pick(x)) for x in path[:-1])
        h = multiply(spec, b, a)
    return h, conjugate(spec, h, g)


def _construct(spec: ProductSpec, w: Word, v: int, big: int, ch: _Chooser) -> Word:
    h1, g1 = _left_to(spec, w, big, ch)
    # make the distinguished vertex a tail vertex without disturbing the head
    ht = head_tail(spec, g1)
    h2: Word = ()
    if big not in ht.R:
        first = next(a for x, a in ht.head if x == big)
        grp = spec.groups[big]
        c = ch.pick(big, avoid=[int(grp.inverse[first])])
        h2 = ((big, c),)
    g2 = conjugate(spec, h2, g1)
    # mirror image on the tail side: conjugate g2^-1's head to a single vertex
    ht = head_tail(spec, g2)
    h3: Word = ()
    if ht.R != {big} or ht.L != {big}:
        outside = [x for x in range(spec.n) if x not in ht.R]
        star = v if v in outside else outside[0]
        a = _tree_word(spec, star, {x: a for x, a in ht.tail}, ch)
        h3 = inverse(spec, tuple(reversed(a)))
        target = star
    else:
        target = big
    g3 = conjugate(spec, h3, g2)
    h4: Word = ()
    if target != v:
        parent, _ = _bfs_tree(spec, target)
        path = _path(parent, v)          # v ... target
        h4 = tuple((x, ch.pick(x)) for x in path[:-1])
    return multiply(spec, h4, h3, h2, h1)


def _good(spec: ProductSpec, h: Word, w: Word, v: int) -> Word | None:
    c = conjugate(spec, h, w)
    if not c:
        return None
    ht = head_tail(spec, c)
    return c if ht.L == {v} and ht.R == {v} else None


def _search(spec: ProductSpec, w: Word, v: int, depth: int, budget: int) -> Word | None:
    syll = [(x, a) for x in range(spec.n) for a in range(spec.groups[x].order) if a != spec.groups[x].identity]
    seen = {w: ()}
    frontier = [w]
    for _ in range(depth):
        nxt = []
        for g in frontier:
            for s in syll:
                c = conjugate(spec, (s,), g)
                if c in seen:
                    continue
                seen[c] = multiply(spec, (s,), seen[g])
                ht = head_tail(spec, c)
                if c and ht.L == {v} and ht.R == {v}:
                    return seen[c]
                nxt.append(c)
                if len(seen) > budget:
                    return None
        frontier = nxt
    return None


def conjugate_to_vertex(spec: ProductSpec, w: Sequence[Syllable], v, attempts: int = 32,
                        search_depth: int = 4, search_budget: int = 200_000) -> ConjugatorResult:
    """A conjugator ``h`` with head and tail of ``h w h^-1`` both at vertex ``v``.

    Runs the tree-based construction first (deterministic choices, then
    random retries of the vertex elements) and falls back to a breadth-first
    search over conjugates. Every returned conjugate is checked with
    :func:`head_tail`.
    """
    v = spec.vertex(v)
    w = normal_form(spec, w)
    if not w:
        raise GraphProductError("the identity has no head")
    if len(complement_components(spec.n, spec.adjacency)) > 1:
        raise GraphProductError("the complement graph is disconnected")
    if spec.n < 2:
        raise GraphProductError("need at least two vertices")
    sizes = spec.sizes()
    if max(sizes) < 3:
        raise GraphProductError("every vertex group has order 2")
    big = v if sizes[v] >= 3 else next(i for i, s in enumerate(sizes) if s >= 3)
    if _good(spec, (), w, v) is not None:
        return ConjugatorResult((), w, "construction")
    for k in range(attempts):
        ch = _Chooser(spec, None if k == 0 else random.Random(k))
        try:
            h = _construct(spec, w, v, big, ch)
        except (StopIteration, GraphProductError):
            continue
        c = _good(spec, h, w, v)
        if c is not None:
            return ConjugatorResult(h, c, "construction")
    h = _search(spec, w, v, search_depth, search_budget)
    if h is None:
        raise GraphProductError("no conjugator found within the search budget")
    return ConjugatorResult(h, conjugate(spec, h, w), "search")


# ---------------------------------------------------------------- oracles
def complete_graph_oracle(spec: ProductSpec) -> tuple[FiniteGroup, callable]:
    """For a complete graph: the direct product and a word -> element map."""
    if any(not spec.adjacency[a, b] for a in range(spec.n) for b in range(a + 1, spec.n)):
        raise GraphProductError("oracle needs a complete graph")
    prod = spec.groups[0]
    for g in spec.groups[1:]:
        prod = direct_product(prod, g)
    radix = [g.order for g in spec.groups]

    def value(w: Sequence[Syllable]) -> int:
        coords = [g.identity for g in spec.groups]
        for x, a in w:
            coords[x] = int(spec.groups[x].table[coords[x], a])
        idx = 0
        for x in range(spec.n):
            idx = idx * radix[x] + coords[x]
        return idx
    return prod, value


def random_word(spec: ProductSpec, length: int, rng: random.Random) -> Word:
    out = []
    for _ in range(length):
        x = rng.randrange(spec.n)
        g = spec.groups[x]
        out.append((x, rng.choice([a for a in range(g.order) if a != g.identity])))
    return tuple(out)


def random_spec(rng: random.Random, max_vertices: int = 6, groups: Sequence[str] = ("C2", "C3", "S3"),
                min_vertices: int = 2, density: float | None = None) -> ProductSpec:
    n = rng.randint(min_vertices, max_vertices)
    p = rng.random() if density is None else density
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
    return make_spec([f"v{i}" for i in range(n)], edges, [rng.choice(list(groups)) for _ in range(n)])


__all__ = [
    "ConjugatorResult", "GraphClassification", "GraphProductError", "HeadTail", "ProductSpec", "Syllable", "Word",
    "canonical_order", "complement_components", "complete_graph_oracle", "conjugate", "conjugate_to_vertex",
    "format_word", "head_tail", "inverse", "is_reduced", "load_spec", "make_spec", "multiply", "normal_form",
    "parse_word", "random_spec", "random_word", "rc_classify", "reduce_word",
]
