"""Command-line interface.

Exit codes: 0 verdict true, 1 verdict false, 2 usage or input error, 3 computation error.
Reports go to stdout, diagnostics to stderr. Agents and goods are 0-based.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .efficiency import is_pareto_optimal
from .errors import AllocationError, CapExceeded, ContractViolation, InstanceError
from .fairness import is_fef, is_fef_eps, is_fefx
from .fefalgo import compute_fef_eps, compute_fefx, split_into_pieces
from .fixedpoint import compute_gamma, find_fef_po
from .instances import nonconvex_instance
from .mechanisms import (audit_truthfulness, get_mechanism, impossibility_demo, lattice_reports,
                         validate_reports)
from .model import (allocation_to_dict, discrete_allocation_to_dict, fmt, parse_allocation,
                    parse_discrete_allocation, parse_instance, to_fraction)
from .oracle import nonconvexity_scan
from .reference import reference_checks

logger = logging.getLogger("gapfair")

EXIT_TRUE, EXIT_FALSE, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _rational(text):
    try:
        return to_fraction(text, "argument")
    except InstanceError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _order(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"order must be comma-separated agent indices: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default="json")
    common.add_argument("--threads", type=_positive_int, default=1,
                        help="worker threads for grid scans and audits (results do not depend on it)")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    p = argparse.ArgumentParser(prog="gapfair", description="Fair division under budget constraints")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="check a property of an allocation")
    c.add_argument("instance")
    c.add_argument("allocation")
    c.add_argument("--property", required=True, choices=["fef", "fef-eps", "fefx", "po"])
    c.add_argument("--eps", type=_rational)
    c.add_argument("--strict-charity", action="store_true")

    s = sub.add_parser("solve", parents=[common], help="compute an allocation")
    s.add_argument("instance")
    s.add_argument("--method", required=True, choices=["fefx", "fef-eps", "fefpo"])
    s.add_argument("--eps", type=_rational)
    s.add_argument("--max-iters", type=_positive_int, default=200)
    s.add_argument("--trace", help="write the search trace as JSON lines to this file (fefpo)")

    m = sub.add_parser("mechanism", parents=[common], help="run a mechanism on reports")
    m.add_argument("instance")
    m.add_argument("--name", required=True, choices=["split-half", "serial-po"])
    m.add_argument("--order", type=_order)
    m.add_argument("--reports", help="JSON file with a list of value vectors (default: true values)")

    a = sub.add_parser("audit", parents=[common], help="search misreports for a profitable deviation")
    a.add_argument("instance")
    a.add_argument("--mechanism", required=True, choices=["split-half", "serial-po"])
    a.add_argument("--order", type=_order)
    a.add_argument("--grid", default="6",
                   help="max denominator of a lattice in [0, 1], or a JSON file listing value vectors")

    d = sub.add_parser("demo", parents=[common], help="run a demonstration")
    d.add_argument("--name", required=True, choices=["nonconvexity", "impossibility"])
    d.add_argument("--instance", help="instance for the nonconvexity scan (default: built-in)")
    d.add_argument("--alpha", type=_rational, default=Fraction(4, 5))
    d.add_argument("--beta", type=_rational, default=Fraction(3, 5))
    d.add_argument("--grid-k", type=_positive_int)

    g = sub.add_parser("gamma", parents=[common], help="print the gamma parameters of an instance")
    g.add_argument("instance")
    g.add_argument("--all-pairs", action="store_true")

    sub.add_parser("paper-examples", parents=[common], help="run the reference regression table")
    return p


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_instance(path):
    return parse_instance(_read(path))


def _emit(args, payload: dict, text: str):
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _verdict_text(name, verdict):
    if verdict.holds:
        return f"{name}: holds"
    w = verdict.witness
    return f"{name}: fails (agent {w.agent} envies {w.target} by {fmt(w.envy)})"


def cmd_check(args):
    inst = _load_instance(args.instance)
    text = _read(args.allocation)
    if args.property == "fefx":
        dalloc = parse_discrete_allocation(text)
        verdict = is_fefx(inst, dalloc)
    else:
        alloc = parse_allocation(text, inst)
        if args.property == "fef":
            verdict = is_fef(inst, alloc)
        elif args.property == "fef-eps":
            if args.eps is None:
                raise UsageError("--property fef-eps needs --eps")
            verdict = is_fef_eps(inst, alloc, args.eps, strict_charity=args.strict_charity)
        else:
            po = is_pareto_optimal(inst, alloc)
            payload = {"property": "po", "holds": po.holds,
                       "dominator": None if po.dominator is None else allocation_to_dict(po.dominator)["bundles"]}
            _emit(args, payload, "po: holds" if po.holds else
                  f"po: fails (dominated by {payload['dominator']})")
            return EXIT_TRUE if po.holds else EXIT_FALSE
    payload = {"property": args.property, **verdict.to_dict()}
    _emit(args, payload, _verdict_text(args.property, verdict))
    return EXIT_TRUE if verdict.holds else EXIT_FALSE


def cmd_solve(args):
    inst = _load_instance(args.instance)
    if args.method == "fefx":
        pieces = split_into_pieces(inst, args.eps).pieces if args.eps is not None else None
        dalloc = compute_fefx(inst, pieces)
        payload = {"method": "fefx", **discrete_allocation_to_dict(dalloc),
                   **allocation_to_dict(dalloc.to_allocation())}
        _emit(args, payload, f"fefx: counts {payload['counts']} of pieces {payload['pieces']}")
        return EXIT_TRUE
    if args.method == "fef-eps":
        if args.eps is None:
            raise UsageError("--method fef-eps needs --eps")
        alloc = compute_fef_eps(inst, args.eps)
        payload = {"method": "fef-eps", "eps": fmt(args.eps), **allocation_to_dict(alloc)}
        _emit(args, payload, f"fef-eps: {payload['bundles']}")
        return EXIT_TRUE
    alloc, trace = find_fef_po(inst, args.max_iters)
    if args.trace:
        Path(args.trace).write_text(trace.to_jsonl())
    payload = {"method": "fefpo", "status": trace.status, "iterations": trace.iterations,
               **allocation_to_dict(alloc)}
    _emit(args, payload, f"fefpo: {trace.status} after {trace.iterations} iterations: {payload['bundles']}")
    return EXIT_TRUE if trace.status == "certified" else EXIT_FALSE


def _order_for(args, inst):
    if args.order is not None and sorted(args.order) != list(range(inst.n)):
        raise UsageError(f"--order must be a permutation of 0..{inst.n - 1}")
    return args.order


def cmd_mechanism(args):
    inst = _load_instance(args.instance)
    mech = get_mechanism(args.name, _order_for(args, inst))
    reports = inst.values
    if args.reports:
        doc = json.loads(_read(args.reports))
        reports = validate_reports(inst, doc["reports"] if isinstance(doc, dict) else doc)
    alloc = mech(inst, reports)
    payload = {"mechanism": args.name, **allocation_to_dict(alloc)}
    _emit(args, payload, f"{args.name}: {payload['bundles']}")
    return EXIT_TRUE


def cmd_audit(args):
    inst = _load_instance(args.instance)
    mech = get_mechanism(args.mechanism, _order_for(args, inst))
    if args.grid.isdigit():
        grid = lattice_reports(inst.m, int(args.grid))
    else:
        grid = json.loads(_read(args.grid))
    result = audit_truthfulness(mech, inst, grid, args.threads)
    payload = {"mechanism": args.mechanism, **result.to_dict()}
    _emit(args, payload, f"{args.mechanism}: max gain {fmt(result.max_gain)} over {len(result.entries)} misreports")
    return EXIT_TRUE if result.truthful else EXIT_FALSE


def cmd_demo(args):
    if args.name == "nonconvexity":
        inst = _load_instance(args.instance) if args.instance else nonconvex_instance()
        triples = nonconvexity_scan(inst, args.grid_k or 4, threads=args.threads)
        rows = [{"x": allocation_to_dict(x)["bundles"], "y": allocation_to_dict(y)["bundles"],
                 "midpoint": allocation_to_dict(z)["bundles"],
                 "witness": is_fef(inst, z).witness.to_dict()} for x, y, z in triples]
        payload = {"demo": "nonconvexity", "grid_k": args.grid_k or 4, "triples": rows}
        text = "\n".join(f"x={r['x']} y={r['y']} midpoint={r['midpoint']} envy={r['witness']['envy']}"
                         for r in rows) or "no triples found"
        _emit(args, payload, text)
        return EXIT_TRUE if triples else EXIT_FALSE
    try:
        demo = impossibility_demo(args.alpha, args.beta, args.grid_k, args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = {"demo": "impossibility", **demo.to_dict()}
    text = "\n".join([f"band for x[0][0]: [{fmt(demo.band[0])}, {fmt(demo.band[1])}]"] +
                     [f"{r.name} rule: deviation {[fmt(v) for v in r.deviation]} gains {fmt(r.gain)}"
                      for r in demo.rules])
    _emit(args, payload, text)
    return EXIT_TRUE if demo.demonstrated else EXIT_FALSE


def cmd_gamma(args):
    params = compute_gamma(_load_instance(args.instance), args.all_pairs)
    payload = params.to_dict()
    _emit(args, payload, fmt(params.gamma))
    return EXIT_TRUE


def cmd_reference(args):
    results = reference_checks()
    payload = {"checks": [r.to_dict() for r in results], "passed": all(r.passed for r in results)}
    text = "\n".join(f"{'PASS' if r.passed else 'FAIL'}  {r.name}" for r in results)
    _emit(args, payload, text)
    return EXIT_TRUE if payload["passed"] else EXIT_FALSE


COMMANDS = {"check": cmd_check, "solve": cmd_solve, "mechanism": cmd_mechanism,
            "audit": cmd_audit, "demo": cmd_demo, "gamma": cmd_gamma,
            "paper-examples": cmd_reference}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_TRUE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InstanceError, AllocationError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapExceeded, ContractViolation) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


def main():
    sys.exit(run())
