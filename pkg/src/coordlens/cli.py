"""Command-line front end.

Exit status: 0 on success or PASS, 1 when a check fails or a counterexample
is found, 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import catalog, criteria, graphprod, paperchecks, reduced
from .groups.core import FiniteGroup, GroupError, SizeGuardError, is_nilpotent, is_perfect
from .groups.homs import is_decomposable
from .logic import GROUP, MAGMA, ORDER, PURE, ParseError, SignatureError, StructureError
from .logic import classify_h, equivalent_in, evaluator, parse, pure_set, to_text
from .logic.hformulas import HCertificate

OK, FAILED, USAGE = 0, 1, 2
SIGNATURES = {"group": GROUP, "magma": MAGMA, "order": ORDER, "pure": PURE}


class InputError(Exception):
    """A user-facing input problem; ``kind`` selects the message prefix."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


# ------------------------------------------------------------------ output
class Report:
    def __init__(self, as_json: bool, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout

    def emit(self, data: dict, lines: Sequence[str]) -> None:
        if self.as_json:
            self.stream.write(json.dumps(data, sort_keys=True, indent=2) + "\n")
        else:
            for line in lines:
                self.stream.write(line + "\n")


def _with_schema(data: dict) -> dict:
    return {"schema": paperchecks.SCHEMA, **data}


# ------------------------------------------------------------------ inputs
def _looks_like_path(text: str) -> bool:
    return text.endswith(".json") or os.sep in text


def _load_group(spec: str) -> FiniteGroup:
    if os.path.exists(spec) and not os.path.isdir(spec):
        try:
            return catalog.load_group(spec)
        except json.JSONDecodeError as exc:
            raise InputError("parse", f"{spec}: {exc}") from exc
    if _looks_like_path(spec):
        raise FileNotFoundError(spec)
    return catalog.group(spec)


def _load_any(spec: str):
    if os.path.exists(spec) or _looks_like_path(spec):
        return _load_group(spec)
    if spec.startswith("pure:"):
        try:
            return pure_set(int(spec[5:]))
        except ValueError as exc:
            raise InputError("input", f"{spec!r}: pure sets are written pure:N") from exc
    obj = catalog.get(spec)
    return obj


def _structure_of(obj):
    return obj.structure if isinstance(obj, FiniteGroup) else obj


def _parse_ideal(text: str, k: int) -> reduced.FiniteIdeal:
    text = text.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError("parse", f"ideal: {exc}") from exc
        if not data:
            return reduced.make_ideal(k)
        return reduced.load_ideal(data, default_indices=k)
    if text.startswith("["):
        try:
            gens = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError("parse", f"ideal: {exc}") from exc
        return reduced.make_ideal(k, gens)
    return reduced.load_ideal(text, default_indices=k)


def _build_product(args) -> reduced.ReducedProduct:
    names = [n.strip() for n in args.factors.split(",") if n.strip()]
    if not names:
        raise InputError("input", "--factors needs at least one name")
    factors = [_structure_of(_load_any(n)) for n in names]
    ideal = _parse_ideal(args.ideal, len(factors))
    return reduced.reduced_product(factors, ideal)


def _variables(phi, given: str | None) -> tuple[str, ...]:
    if given:
        return tuple(v.strip() for v in given.split(",") if v.strip())
    return tuple(sorted(phi.free_vars))


def _elements(rp: reduced.ReducedProduct, elems: Sequence[str], count: int) -> list[int]:
    if len(elems) != count:
        raise InputError("input", f"the formula has {count} free variable(s) but {len(elems)} --elem given")
    try:
        return [rp.element(e) for e in elems]
    except (KeyError, ValueError) as exc:
        raise InputError("input", f"element: {exc}") from exc


# ------------------------------------------------------------------ verbs
def cmd_catalog(args, out: Report) -> int:
    if args.action == "list":
        rows = []
        for e in catalog.list_entries():
            exp = e.expected
            rows.append({"name": e.name, "kind": e.kind, "params": e.params,
                         "expected": exp.outcome if exp else None,
                         "anomaly": bool(exp and exp.anomaly)})
        lines = [f"{r['name']:<8} {r['kind']:<9} {r['expected'] or '-'}{'  (flagged)' if r['anomaly'] else ''}"
                 for r in rows]
        out.emit(_with_schema({"entries": rows}), lines)
        return OK
    if not args.name:
        raise InputError("usage", "catalog show needs a name")
    e = catalog.entry(args.name)
    obj = catalog.get(args.name)
    data = {"name": e.name, "kind": e.kind, "params": e.params}
    if isinstance(obj, FiniteGroup):
        data.update({"order": obj.order, "classes": len(obj.conjugacy_classes), "center": obj.center.order})
    else:
        data.update({"size": obj.size, "universe": list(obj.labels)})
    if e.expected:
        data["expected"] = {"outcome": e.expected.outcome, "basis": e.expected.basis,
                            "source": e.expected.source, "anomaly": e.expected.anomaly}
    lines = [f"{k}: {v}" for k, v in data.items() if k != "expected"]
    if e.expected:
        lines.append(f"expected: {e.expected.outcome} ({e.expected.source}) - {e.expected.basis}")
        if e.expected.anomaly:
            lines.append(f"flagged: {e.expected.anomaly}")
    out.emit(_with_schema(data), lines)
    return OK


def cmd_group(args, out: Report) -> int:
    g = _load_group(args.source)
    bound = args.bound
    decomp = is_decomposable(g, bound) if g.order <= bound else None
    cc = criteria.crit_conj_centralizer(g)
    crits = [cc] + [criteria.crit_p(g, p) for p in _primes(g.order)]
    verdict = criteria.group_verdict(g, bound=bound)
    data = {
        "name": g.name, "order": g.order, "classes": len(g.conjugacy_classes), "center": g.center.order,
        "abelian": g.is_abelian(), "nilpotent": is_nilpotent(g), "perfect": is_perfect(g),
        "decomposable": None if g.order > bound else decomp is not None,
        "criteria": [c.to_json() for c in crits], "verdict": verdict.to_json(),
    }
    dec = "unknown (order above bound)" if g.order > bound else ("decomposable" if decomp else "indecomposable")
    lines = [f"group {g.name or '?'}: order {g.order}",
             f"classes {data['classes']}, center {data['center']}",
             f"{'abelian' if data['abelian'] else 'nonabelian'}, "
             f"{'nilpotent' if data['nilpotent'] else 'not nilpotent'}, "
             f"{'perfect' if data['perfect'] else 'not perfect'}, {dec}"]
    lines += [f"{c.name}: {'PASS' if c.passed else 'FAIL'}  {c.detail}" for c in crits]
    lines.append(f"verdict: {verdict.outcome} ({verdict.reason})")
    out.emit(_with_schema(data), lines)
    return OK


def _primes(n: int) -> list[int]:
    from .groups.core import prime_factors
    return sorted(prime_factors(n))


def cmd_criteria(args, out: Report) -> int:
    names = [n.strip() for n in args.names.split(",") if n.strip()]
    if not names:
        raise InputError("usage", "criteria verdict needs at least one name")
    objs = [_load_any(n) for n in names]
    if all(isinstance(o, FiniteGroup) for o in objs):
        v = criteria.class_verdict(objs, bound=args.bound, timeout=args.timeout)
    elif len(objs) == 1:
        v = criteria.structure_verdict(objs[0])
    else:
        raise InputError("input", "a class verdict takes groups only; structures are judged one at a time")
    data = v.to_json(timings=args.timings)
    lines = [f"{', '.join(v.groups)}: {v.outcome} ({v.reason})", f"basis: {v.basis}"]
    for w in data["witnesses"]:
        lines.append(f"  {w.get('criterion') or w.get('obstruction')}: {w.get('detail', '')}")
    lines += [f"note: {n}" for n in v.notes]
    if args.timings:
        lines.append(f"millis: {v.millis}")
    out.emit(data, lines)
    return OK


def cmd_reduced(args, out: Report) -> int:
    rp = _build_product(args)
    base = {"product": rp.name, "size": rp.size, "indices": rp.k, "ideal": str(rp.ideal),
            "algebra_size": 2 ** len(reduced.indices_of(rp.algebra.free))}
    lines = [f"product {rp.name}: {rp.size} elements, quotient algebra of size {base['algebra_size']}"]
    action = args.action
    formula = (args.supp or args.formula) if action in ("build", "supp") else args.formula
    if action in ("supp", "eval", "los") and not formula:
        raise InputError("usage", f"reduced {action} needs a formula")
    if not formula:
        out.emit(_with_schema(base), lines)
        return OK
    phi = parse(formula, rp.signature)
    variables = _variables(phi, args.vars)
    status = OK
    if action in ("build", "supp"):
        elems = _elements(rp, args.elem, len(variables))
        value = reduced.supp_phi(rp, phi, elems, variables)
        base.update({"formula": to_text(phi), "support": str(value), "indices_true": value.indices})
        lines = [str(value)] if action == "build" else lines + [f"support: {value}"]
    elif action == "eval":
        elems = _elements(rp, args.elem, len(variables))
        value = evaluator(rp.structure, phi, variables).holds(elems)
        base.update({"formula": to_text(phi), "holds": bool(value)})
        lines.append(f"holds: {str(bool(value)).lower()}")
    else:
        try:
            if args.elem:
                elems = _elements(rp, args.elem, len(variables))
                rep = reduced.los_check(rp, phi, elems, variables)
                base.update({"product_side": rep.product_side, "index_side": rep.index_side,
                             "failure_set": reduced.mask_text(rep.failure_mask), "agrees": rep.agrees})
                lines.append(f"product: {rep.product_side}, index side: {rep.index_side}, "
                             f"failure set {reduced.mask_text(rep.failure_mask)}")
                status = OK if rep.agrees else FAILED
            else:
                ok, where = reduced.los_exhaustive(rp, phi, variables)
                base.update({"agrees": ok, "counterexample": where})
                lines.append("agrees at every assignment" if ok else f"disagreement at {where}")
                status = OK if ok else FAILED
        except reduced.LosPreconditionError as exc:
            raise InputError("input", str(exc)) from exc
    out.emit(_with_schema(base), lines)
    return status


def cmd_formula(args, out: Report) -> int:
    if args.action == "equiv":
        m = _structure_of(_load_any(args.structure))
        phi, psi = parse(args.text, m.signature), parse(args.other, m.signature)
        variables = _variables(phi, args.vars) if args.vars else None
        res = equivalent_in(m, phi, psi, variables)
        cex = {v: m.labels[i] for v, i in res.counterexample.items()} if res.counterexample else None
        data = {"structure": m.name, "equivalent": res.equivalent, "checked": res.checked, "counterexample": cex}
        lines = [f"equivalent over {res.checked} assignments" if res.equivalent
                 else f"not equivalent; counterexample {cex}"]
        out.emit(_with_schema(data), lines)
        return OK if res.equivalent else FAILED
    sig = SIGNATURES[args.signature] if args.signature else None
    phi = parse(args.text, sig)
    if args.action == "parse":
        data = {"formula": to_text(phi), "free": sorted(phi.free_vars)}
        out.emit(_with_schema(data), [data["formula"], f"free: {', '.join(data['free']) or '-'}"])
        return OK
    cert = classify_h(phi)
    if isinstance(cert, HCertificate):
        obligations = [to_text(s) for s in cert.obligation_sentences()]
        data = {"formula": to_text(phi), "h_formula": True, "verified": cert.verify(), "obligations": obligations}
        lines = ["h-formula: yes"] + [f"obligation: {o}" for o in obligations]
    else:
        data = {"formula": to_text(phi), "h_formula": False, "reason": cert.reason,
                "blocking": to_text(cert.blocking), "path": list(cert.path)}
        lines = [f"h-formula: no ({cert.reason})", f"blocking: {data['blocking']}"]
    out.emit(_with_schema(data), lines)
    return OK


def cmd_graph(args, out: Report) -> int:
    spec = graphprod.load_spec(args.spec)
    if args.action == "classify":
        c = graphprod.rc_classify(spec)
        data = {"graph": spec.to_json(), **c.to_json()}
        lines = [f"{c.outcome}: {c.reason}"] + ([f"witness: {c.witness}"] if c.witness else [])
        out.emit(_with_schema(data), lines)
        return OK
    if not args.word:
        raise InputError("usage", f"graph {args.action} needs --word")
    w = graphprod.parse_word(spec, args.word)
    nf = graphprod.normal_form(spec, w)
    if args.action == "normal-form":
        ht = graphprod.head_tail(spec, nf)
        fmt = lambda syl: sorted(graphprod.format_word(spec, [s]) for s in syl)  # noqa: E731
        data = {"word": graphprod.format_word(spec, w), "normal_form": graphprod.format_word(spec, nf),
                "length": ht.length, "head": fmt(ht.head), "tail": fmt(ht.tail)}
        lines = [data["normal_form"], f"length {ht.length}; head {data['head']}; tail {data['tail']}"]
        out.emit(_with_schema(data), lines)
        return OK
    if not args.vertex:
        raise InputError("usage", "graph conjugate needs --vertex")
    res = graphprod.conjugate_to_vertex(spec, nf, args.vertex)
    if res is None:
        data = {"word": graphprod.format_word(spec, nf), "vertex": args.vertex, "found": False}
        out.emit(_with_schema(data), ["no conjugator found"])
        return FAILED
    data = {"word": graphprod.format_word(spec, nf), "vertex": args.vertex, "found": True, **res.to_json(spec)}
    out.emit(_with_schema(data), [f"conjugator: {data['conjugator']}", f"conjugate: {data['conjugate']}",
                                  f"route: {data['route']}"])
    return OK


def cmd_verify(args, out: Report) -> int:
    if args.scale not in paperchecks.SCALES:
        raise InputError("scale", f"unknown scale {args.scale!r}; use one of {', '.join(paperchecks.SCALES)}")
    if args.all == bool(args.names):
        raise InputError("usage", "give check names or --all, not both")
    if args.list:
        out.emit(_with_schema({"checks": paperchecks.names()}), paperchecks.names())
        return OK
    results = paperchecks.run_all(args.scale, None if args.all else args.names)
    data = _with_schema({"scale": args.scale, "results": [r.to_json(args.timings) for r in results],
                         "passed": all(r.passed for r in results)})
    lines = []
    for r in results:
        lines.append(f"{r.status} {r.name}" + (f" ({r.millis} ms)" if args.timings else ""))
        for f in r.findings:
            lines.append(f"    finding: {f}")
        for c in r.counterexamples[:3]:
            lines.append(f"    counterexample in {c['structure']}: {c['assignment']} "
                         f"gives {c['formula_value']}, expected {c['expected']}")
    out.emit(data, lines)
    return OK if data["passed"] else FAILED


# ------------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output (schema 1)")
    p = argparse.ArgumentParser(prog="coordlens", description="Reduced products, coordinate recognition "
                                "criteria and graph products over finite structures.")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("catalog", parents=[common], help="browse named groups and structures")
    c.add_argument("action", choices=["list", "show"])
    c.add_argument("name", nargs="?")

    g = sub.add_parser("group", parents=[common], help="analyze one group")
    g.add_argument("action", choices=["analyze"])
    g.add_argument("source", help="catalog name or JSON file")
    g.add_argument("--bound", type=int, default=criteria.LATTICE_BOUND)

    v = sub.add_parser("criteria", parents=[common], help="recognition verdict for a class")
    v.add_argument("action", choices=["verdict"])
    v.add_argument("names", help="comma-separated catalog names or files")
    v.add_argument("--bound", type=int, default=criteria.LATTICE_BOUND)
    v.add_argument("--timeout", type=float, default=criteria.DEFAULT_TIMEOUT)
    v.add_argument("--timings", action="store_true")

    r = sub.add_parser("reduced", parents=[common], help="build and query reduced products")
    r.add_argument("action", choices=["build", "eval", "supp", "los"])
    r.add_argument("--factors", required=True, help="comma-separated catalog names")
    r.add_argument("--ideal", default="{}", help="JSON ideal, list of generators, or file; '{}' is trivial")
    r.add_argument("--supp", help="formula whose support to compute (build)")
    r.add_argument("--formula", help="formula for supp/eval/los")
    r.add_argument("--vars", help="variable order, comma separated (default: sorted free variables)")
    r.add_argument("--elem", action="append", default=[],
                   help="one element per variable: comma-separated factor labels")

    f = sub.add_parser("formula", parents=[common], help="parse, classify or compare formulas")
    f.add_argument("action", choices=["parse", "classify", "equiv"])
    f.add_argument("text")
    f.add_argument("other", nargs="?")
    f.add_argument("--signature", choices=sorted(SIGNATURES))
    f.add_argument("--structure", help="structure for equiv")
    f.add_argument("--vars")

    gr = sub.add_parser("graph", parents=[common], help="graph products of finite groups")
    gr.add_argument("action", choices=["classify", "normal-form", "conjugate"])
    gr.add_argument("spec", help="graph JSON text or file")
    gr.add_argument("--word")
    gr.add_argument("--vertex")

    k = sub.add_parser("verify", parents=[common], help="run registered verification checks")
    k.add_argument("names", nargs="*")
    k.add_argument("--all", action="store_true")
    k.add_argument("--list", action="store_true")
    k.add_argument("--scale", default="ci")
    k.add_argument("--timings", action="store_true")
    return p


HANDLERS = {"catalog": cmd_catalog, "group": cmd_group, "criteria": cmd_criteria, "reduced": cmd_reduced,
            "formula": cmd_formula, "graph": cmd_graph, "verify": cmd_verify}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    if args.verb == "verify" and args.list:
        args.all = True
    if args.verb == "formula" and args.action == "equiv" and (not args.other or not args.structure):
        stderr.write("error: usage: formula equiv A B --structure NAME\n")
        return USAGE
    out = Report(args.json, stdout)
    try:
        return HANDLERS[args.verb](args, out)
    except FileNotFoundError as exc:
        stderr.write(f"error: file not found: {exc.filename or exc}\n")
    except ParseError as exc:
        stderr.write(f"error: parse error: {exc}\n")
    except (SizeGuardError, reduced.ReducedProductError) as exc:
        stderr.write(f"error: size bound exceeded: {exc}\n")
    except InputError as exc:
        prefix = {"parse": "parse error", "scale": "scale error", "usage": "usage"}.get(exc.kind, "invalid input")
        stderr.write(f"error: {prefix}: {exc}\n")
    except paperchecks.CheckError as exc:
        stderr.write(f"error: unknown check: {exc}\n")
    except catalog.CatalogError as exc:
        stderr.write(f"error: unknown name: {exc}\n")
    except (SignatureError, StructureError, GroupError, reduced.IdealError,
            graphprod.GraphProductError, KeyError, ValueError) as exc:
        stderr.write(f"error: invalid input: {exc}\n")
    return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
