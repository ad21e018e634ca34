"""Formula evaluation in finite structures."""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .. import kernel as _kernel
from .compiler import compile_formula
from .parser import check_signature, parse
from .structure import FiniteStructure

_CACHE_LIMIT = 48


def as_formula(phi, structure: FiniteStructure):
    if isinstance(phi, str):
        return parse(phi, structure.signature)
    check_signature(phi, structure.signature)
    return phi


class Evaluator:
    """A formula bound to a structure with a fixed order of free variables.

    Memo tables survive between calls, so repeated queries against the same
    formula get cheaper.
    """

    def __init__(self, structure: FiniteStructure, phi, free_order: Sequence[str] | None = None,
                 backend: str | None = None):
        phi = as_formula(phi, structure)
        order = tuple(free_order) if free_order is not None else tuple(sorted(phi.free_vars))
        missing = set(phi.free_vars) - set(order)
        if missing:
            raise ValueError(f"free variables without a position: {sorted(missing)}")
        self.structure = structure
        self.formula = phi
        self.order = order
        self.program = compile_formula(structure, phi, order)
        kernels = _kernel.available_backends()
        cls = _kernel.Kernel if backend is None else kernels[backend]
        self.kernel = cls(self.program)

    def holds(self, values: Sequence[int]) -> bool:
        return self.kernel.evaluate([int(v) for v in values])

    def grid(self) -> np.ndarray:
        """Truth values over all assignments to ``order``, lexicographically."""
        return self.kernel.grid(len(self.order))

    def rows(self, assignments) -> np.ndarray:
        arr = np.ascontiguousarray(np.asarray(assignments, dtype=np.int32).reshape(-1, len(self.order)))
        return self.kernel.rows(arr)


def evaluator(structure: FiniteStructure, phi, free_order: Sequence[str] | None = None) -> Evaluator:
    """Cached :class:`Evaluator` for ``(structure, phi, free_order)``."""
    phi = as_formula(phi, structure)
    order = tuple(free_order) if free_order is not None else tuple(sorted(phi.free_vars))
    cache = structure.__dict__.setdefault("_evaluators", OrderedDict())
    key = (phi, order, _kernel.BACKEND)
    ev = cache.get(key)
    if ev is None:
        ev = Evaluator(structure, phi, order)
        cache[key] = ev
        while len(cache) > _CACHE_LIMIT:
            cache.popitem(last=False)
    else:
        cache.move_to_end(key)
    return ev


def _element(structure: FiniteStructure, value) -> int:
    return structure.element(value)


def evaluate(structure: FiniteStructure, phi, assignment: Mapping[str, object] | None = None) -> bool:
    """Truth of ``phi`` under ``assignment`` (variable name to element or label)."""
    phi = as_formula(phi, structure)
    assignment = dict(assignment or {})
    missing = set(phi.free_vars) - set(assignment)
    if missing:
        raise ValueError(f"unassigned free variables: {sorted(missing)}")
    order = tuple(sorted(phi.free_vars))
    ev = evaluator(structure, phi, order)
    return ev.holds([_element(structure, assignment[v]) for v in order])


def definable_set(structure: FiniteStructure, phi, variables: Sequence[str]) -> set[tuple[int, ...]]:
    """All tuples over ``variables`` satisfying ``phi``."""
    phi = as_formula(phi, structure)
    variables = tuple(variables)
    extra = set(phi.free_vars) - set(variables)
    if extra:
        raise ValueError(f"free variables not listed: {sorted(extra)}")
    truth = evaluator(structure, phi, variables).grid()
    idx = np.flatnonzero(truth)
    n = structure.size
    if not variables:
        return {()} if truth[0] else set()
    coords = np.stack(np.unravel_index(idx, (n,) * len(variables)), axis=1)
    return {tuple(int(x) for x in row) for row in coords}


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    counterexample: dict[str, int] | None
    checked: int

    def __bool__(self):
        return self.equivalent


def equivalent_in(structure: FiniteStructure, phi, psi, variables: Sequence[str] | None = None
                  ) -> EquivalenceResult:
    """Check that ``phi`` and ``psi`` agree on every assignment.

    The counterexample, if any, is the lexicographically least assignment
    on which they differ, with variables ordered as given (default: sorted).
    """
    phi = as_formula(phi, structure)
    psi = as_formula(psi, structure)
    if variables is None:
        variables = sorted(phi.free_vars | psi.free_vars)
    variables = tuple(variables)
    extra = (phi.free_vars | psi.free_vars) - set(variables)
    if extra:
        raise ValueError(f"free variables not listed: {sorted(extra)}")
    a = evaluator(structure, phi, variables).grid()
    b = evaluator(structure, psi, variables).grid()
    diff = np.flatnonzero(a != b)
    if diff.size == 0:
        return EquivalenceResult(True, None, int(a.size))
    coords = np.unravel_index(int(diff[0]), (structure.size,) * len(variables)) if variables else ()
    return EquivalenceResult(False, {v: int(c) for v, c in zip(variables, coords)}, int(a.size))

