from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .signature import Signature, SignatureError


class StructureError(ValueError):
    pass


@dataclass(eq=False)
class FiniteStructure:
    """A finite first-order structure with dense interpretation tables.

    Elements are the integers ``0..size-1``; ``labels`` gives their display names.
    A k-ary function is an int32 array of shape ``(size,)*k``; a k-ary
    relation is a bool array of the same shape.
    """

    signature: Signature
    size: int
    functions: Mapping[str, np.ndarray] = field(default_factory=dict)
    relations: Mapping[str, np.ndarray] = field(default_factory=dict)
    constants: Mapping[str, int] = field(default_factory=dict)
    labels: Sequence[str] | None = None
    name: str = ""

    def __post_init__(self):
        if self.size < 1:
            raise StructureError("universe must be nonempty")
        sig = self.signature
        n = self.size
        funcs = {}
        for fname, arity in sig.functions.items():
            if fname not in self.functions:
                raise StructureError(f"missing interpretation of function {fname!r}")
            tab = np.asarray(self.functions[fname], dtype=np.int32)
            if tab.shape != (n,) * arity:
                raise StructureError(f"function {fname!r} has shape {tab.shape}, wanted {(n,) * arity}")
            if tab.size and (tab.min() < 0 or tab.max() >= n):
                raise StructureError(f"function {fname!r} leaves the universe")
            funcs[fname] = tab
        rels = {}
        for rname, arity in sig.relations.items():
            if rname not in self.relations:
                raise StructureError(f"missing interpretation of relation {rname!r}")
            tab = np.asarray(self.relations[rname], dtype=bool)
            if tab.shape != (n,) * arity:
                raise StructureError(f"relation {rname!r} has shape {tab.shape}, wanted {(n,) * arity}")
            rels[rname] = tab
        consts = {}
        for cname in sig.constants:
            if cname not in self.constants:
                raise StructureError(f"missing interpretation of constant {cname!r}")
            value = int(self.constants[cname])
            if not 0 <= value < n:
                raise StructureError(f"constant {cname!r} outside the universe")
            consts[cname] = value
        extra = (set(self.functions) - set(sig.functions)) | (set(self.relations) - set(sig.relations)) \
            | (set(self.constants) - set(sig.constants))
        if extra:
            raise SignatureError(f"symbols not in signature: {sorted(extra)}")
        self.functions, self.relations, self.constants = funcs, rels, consts
        if self.labels is None:
            self.labels = [str(i) for i in range(n)]
        else:
            self.labels = [str(x) for x in self.labels]
            if len(self.labels) != n:
                raise StructureError("label count differs from universe size")
        self._label_index = None

    def __repr__(self):
        return f"FiniteStructure({self.name or '?'}, size={self.size})"

    def element(self, label: str | int) -> int:
        """Map a label (or integer index) to an element index."""
        if isinstance(label, (int, np.integer)):
            if not 0 <= label < self.size:
                raise StructureError(f"element {label} out of range")
            return int(label)
        if self._label_index is None:
            self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        key = label.strip()
        if key in self._label_index:
            return self._label_index[key]
        raise StructureError(f"unknown element {label!r} in {self.name or 'structure'}")

    def restrict_signature(self, sig: Signature) -> "FiniteStructure":
        """Reduct to a sub-signature."""
        return FiniteStructure(sig, self.size,
                               {f: self.functions[f] for f in sig.functions},
                               {r: self.relations[r] for r in sig.relations},
                               {c: self.constants[c] for c in sig.constants},
                               self.labels, self.name)

    def is_automorphism(self, perm: Sequence[int]) -> bool:
        p = np.asarray(perm, dtype=np.int64)
        if sorted(p.tolist()) != list(range(self.size)):
            return False
        for tab in self.functions.values():
            k = tab.ndim
            # f(p(x1),...,p(xk)) == p(f(x1,...,xk))
            if not np.array_equal(tab[np.ix_(*([p] * k))], p[tab]):
                return False
        for tab in self.relations.values():
            if not np.array_equal(tab[np.ix_(*([p] * tab.ndim))], tab):
                return False
        return all(p[v] == v for v in self.constants.values())

    def automorphisms(self, limit: int = 5040) -> list[tuple[int, ...]]:
        """Automorphisms found by brute force over permutations.

        Structures larger than 7 elements only report inner automorphisms when
        they carry a group signature, otherwise just the identity.
        """
        n = self.size
        if "*" in self.functions and "inv" in self.functions and "e" in self.constants:
            mul, inv = self.functions["*"], self.functions["inv"]
            seen, out = set(), []
            for g in range(n):
                perm = tuple(int(v) for v in mul[mul[g, :], inv[g]])
                if perm not in seen:
                    seen.add(perm)
                    out.append(perm)
            return sorted(out)
        if n > 7:
            return [tuple(range(n))]
        out = []
        for perm in itertools.permutations(range(n)):
            if self.is_automorphism(perm):
                out.append(perm)
                if len(out) >= limit:
                    break
        return out

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "signature": self.signature.to_json(),
            "universe": list(self.labels),
            "functions": {k: v.tolist() for k, v in self.functions.items()},
            "relations": {k: v.astype(int).tolist() for k, v in self.relations.items()},
            "constants": {k: self.labels[v] for k, v in self.constants.items()},
            "name": self.name,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteStructure":
        sig = Signature.from_json(data["signature"])
        universe = [str(u) for u in data["universe"]]
        index = {u: i for i, u in enumerate(universe)}

        def conv(x):
            return index[str(x)] if str(x) in index else int(x)

        funcs = {k: np.vectorize(conv, otypes=[np.int32])(np.asarray(v, dtype=object))
                 for k, v in data.get("functions", {}).items()}
        rels = {k: np.asarray(v, dtype=bool) for k, v in data.get("relations", {}).items()}
        consts = {k: conv(v) for k, v in data.get("constants", {}).items()}
        return cls(sig, len(universe), funcs, rels, consts, universe, data.get("name", ""))

    @classmethod
    def load(cls, path: str) -> "FiniteStructure":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def pure_set(n: int) -> FiniteStructure:
    """A bare set of ``n`` elements (equality only)."""
    return FiniteStructure(Signature(), n, name=f"Set{n}")
