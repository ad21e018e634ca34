"""Compare the compiled and pure-Python evaluation kernels.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json]

Each workload builds a fresh evaluator per backend (so memo tables start
empty), evaluates the full truth grid, and checks both backends agree.
"""
from __future__ import annotations

import argparse
import json
import statistics
import time

from coordlens import catalog
from coordlens.criteria import CONJ_CENTRALIZER_FORMULA, transposition_formula
from coordlens.kernel import available_backends
from coordlens.logic.evaluate import Evaluator
from coordlens.logic.structure import pure_set
from coordlens.paperchecks.structures import ORDER_VARS, ZSUPP_VARS, order_text, zsupp_text

WORKLOADS = [
    ("transpositions S5", lambda: catalog.group("S5").structure, transposition_formula(), ("z",)),
    ("class centralizer S4", lambda: catalog.group("S4").structure, CONJ_CENTRALIZER_FORMULA, ("x", "y")),
    ("class centralizer A5", lambda: catalog.group("A5").structure, CONJ_CENTRALIZER_FORMULA, ("x", "y")),
    ("padded support pure:5", lambda: pure_set(5), zsupp_text(), ZSUPP_VARS),
    ("chain comparison Chain6", lambda: catalog.get("Chain6"), order_text(), ORDER_VARS),
]


def time_one(structure, formula, order, backend: str, repeat: int) -> tuple[float, object]:
    samples, grid = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        grid = Evaluator(structure, formula, order, backend=backend).grid()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples), grid


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    backends = sorted(available_backends())
    rows = []
    for name, build, formula, order in WORKLOADS:
        m = build()
        row = {"workload": name, "size": m.size}
        grids = {}
        for b in backends:
            row[b], grids[b] = time_one(m, formula, order, b, args.repeat)
        ref = grids[backends[0]]
        row["agree"] = all((g == ref).all() for g in grids.values())
        if "cython" in row and "python" in row:
            row["speedup"] = row["python"] / row["cython"] if row["cython"] else float("inf")
        rows.append(row)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    head = f"{'workload':<26}{'n':>6}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}  agree"
    print(head)
    for r in rows:
        cells = "".join(f"{r[b] * 1000:>10.1f}ms" for b in backends)
        sp = f"{r['speedup']:>9.1f}x" if "speedup" in r else f"{'-':>10}"
        print(f"{r['workload']:<26}{r['size']:>6}{cells}{sp}  {r['agree']}")


if __name__ == "__main__":
    main()
