"""Named verification runs with PASS/FAIL status, evidence and timing."""
from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

SCHEMA = 1
SCALES = ("ci", "full")


class CheckError(KeyError):
    def __str__(self):
        return self.args[0] if self.args else "check error"


@dataclass
class Outcome:
    """What a check body returns; the registry adds name, basis and timing."""
    passed: bool
    instances: list[dict] = field(default_factory=list)
    counterexamples: list[dict] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)


@dataclass
class CheckResult:
    name: str
    status: str                 # PASS | FAIL
    basis: str
    scale: str
    instances: list[dict]
    counterexamples: list[dict]
    findings: list[str]
    millis: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def to_json(self, timings: bool = False) -> dict:
        out = {"schema": SCHEMA, "name": self.name, "status": self.status, "basis": self.basis,
               "scale": self.scale, "instances": self.instances, "counterexamples": self.counterexamples,
               "findings": self.findings}
        if timings:
            out["millis"] = self.millis
        return out


@dataclass(frozen=True)
class Check:
    name: str
    basis: str
    body: Callable[[str], Outcome]


_REGISTRY: dict[str, Check] = {}


def register(name: str, basis: str):
    def deco(fn: Callable[[str], Outcome]):
        if name in _REGISTRY:
            raise ValueError(f"check {name!r} registered twice")
        _REGISTRY[name] = Check(name, basis, fn)
        return fn
    return deco


def _load():
    from . import groupchecks, structures, symmetric  # noqa: F401  (registration side effects)


def names() -> list[str]:
    _load()
    return sorted(_REGISTRY)


def get_check(name: str) -> Check:
    _load()
    if name not in _REGISTRY:
        raise CheckError(f"unknown check {name!r}; known: {', '.join(sorted(_REGISTRY))}")
    return _REGISTRY[name]


def run(name: str, scale: str = "ci") -> CheckResult:
    if scale not in SCALES:
        raise CheckError(f"unknown scale {scale!r}; use one of {', '.join(SCALES)}")
    check = get_check(name)
    start = time.perf_counter()
    out = check.body(scale)
    millis = int(1000 * (time.perf_counter() - start))
    if not out.passed and not out.counterexamples:
        raise AssertionError(f"{name}: a failing check must carry a counterexample")
    return CheckResult(name, "PASS" if out.passed else "FAIL", check.basis, scale, out.instances,
                       out.counterexamples, out.findings, millis)


def thread_count() -> int:
    raw = os.environ.get("COORDLENS_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, min(n, os.cpu_count() or 1))


def run_all(scale: str = "ci", selected: list[str] | None = None, workers: int | None = None) -> list[CheckResult]:
    """Run checks in name order; with more than one worker they run in separate processes."""
    todo = sorted(selected) if selected else names()
    for n in todo:
        get_check(n)
    workers = thread_count() if workers is None else workers
    if workers <= 1 or len(todo) == 1:
        return [run(n, scale) for n in todo]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, todo, [scale] * len(todo)))


# ------------------------------------------------------------ replay
def _structure(name: str):
    from .. import catalog
    from ..logic.structure import pure_set
    if name.startswith("pure:"):
        return pure_set(int(name.split(":", 1)[1]))
    obj = catalog.get(name)
    return obj.structure if hasattr(obj, "table") else obj


def replay_counterexample(cex: dict) -> bool:
    """Re-evaluate a recorded counterexample through the public evaluator.

    Every counterexample records ``structure``, ``formula``, ``assignment``
    (variable to element label), the observed ``formula_value`` and the
    ``expected`` value. True when the evaluation reproduces the observed value
    and that value differs from the expected one.
    """
    from ..logic.evaluate import evaluate
    m = _structure(cex["structure"])
    got = evaluate(m, cex["formula"], cex["assignment"])
    return got == cex["formula_value"] and got != cex["expected"]


def counterexample(structure: str, formula: str, assignment: dict, value: bool, expected: bool,
                   **extra) -> dict:
    out = {"structure": structure, "formula": formula, "assignment": assignment,
           "formula_value": bool(value), "expected": bool(expected)}
    out.update(extra)
    return out
