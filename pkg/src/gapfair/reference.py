"""Regression table of the hand-checked reference results.

Each check recomputes a known exact value with the library and compares it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .efficiency import is_pareto_optimal, max_weighted_welfare
from .fairness import EnvyGraph, best_subset_of, envy_matrix, is_fef
from .fixedpoint import adjust_weights_p3, compute_gamma, find_fef_po
from .instances import fef_po_certificate, nonconvex_allocations, nonconvex_instance
from .mechanisms import (audit_truthfulness, impossibility_demo, lattice_reports,
                         serial_po_mechanism, split_half_mechanism)
from .oracle import nonconvexity_scan
from .model import Allocation

F = Fraction


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _nonconvexity():
    inst = nonconvex_instance()
    xs = nonconvex_allocations()
    verdict = is_fef(inst, xs["z"])
    y, best = best_subset_of(inst, xs["z"], 1, 0)
    own = xs["z"].values(inst)[1]
    yield ("x and y are FEF", bool(is_fef(inst, xs["x"])) and bool(is_fef(inst, xs["y"])), "")
    yield ("midpoint z is not FEF", not verdict and verdict.witness.envy == F(1, 8),
           f"witness {verdict.witness}")
    yield ("agent 1 values the best part of agent 0's bundle in z at 5/8 against 1/2",
           best == F(5, 8) and own == F(1, 2) and y == (F(1, 4), F(3, 8)), f"{y} worth {best}")
    V = envy_matrix(inst, xs["x"])
    yield ("envy matrix of x: v[0][1] = 1, v[1][0] = 1/2", V[0][1] == 1 and V[1][0] == F(1, 2), str(V))
    triples = nonconvexity_scan(inst, 4)
    yield ("grid scan at k = 4 finds z", any(t[2] == xs["z"] for t in triples), f"{len(triples)} triples")


def _fixed_point():
    inst = nonconvex_instance()
    g = compute_gamma(inst)
    yield ("gamma = 1/16, floor = 1/512", g.gamma == F(1, 16) and g.eps_floor == F(1, 512), str(g.to_dict()))
    w = adjust_weights_p3(EnvyGraph(2, frozenset({(0, 1)})), F(1, 16), F(1, 512))
    yield ("single envy edge gives weights (16/17, 1/17)", w == (F(16, 17), F(1, 17)), str(w))
    fam = [fef_po_certificate(a) for a in (F(2, 5), F(9, 20), F(1, 2))]
    yield ("certificate family is FEF and PO",
           all(is_fef(inst, x) and is_pareto_optimal(inst, x) for x in fam), "")
    x, trace = find_fef_po(inst)
    yield ("search certifies an FEF and PO allocation", trace.status == "certified", str(x.bundles))
    y = max_weighted_welfare(inst, (F(15, 16), F(1, 16)))
    yield ("welfare optimum at (15/16, 1/16)", y == Allocation(((1, 0), (0, F(1, 2)))), str(y.bundles))


def _mechanisms():
    inst = nonconvex_instance()
    x = split_half_mechanism(inst)
    yield ("split-half bundles (1/2, 1/2) and (1/2, 1/4)",
           x == Allocation(((F(1, 2), F(1, 2)), (F(1, 2), F(1, 4)))), str(x.bundles))
    a = serial_po_mechanism(inst, order=[0, 1])
    b = serial_po_mechanism(inst, order=[1, 0])
    yield ("serial mechanism, both orders",
           a == Allocation(((1, 0), (0, F(1, 2)))) and b == Allocation(((0, 1), (1, 0))),
           f"{a.bundles} / {b.bundles}")
    grid = lattice_reports(inst.m, 6)
    for name, mech in (("split-half", split_half_mechanism), ("serial", serial_po_mechanism)):
        res = audit_truthfulness(mech, inst, grid)
        yield (f"{name} audit gain is 0", res.max_gain == 0, f"{len(res.entries)} misreports")
    demo = impossibility_demo(F(4, 5), F(3, 5), grid_k=40)
    gains = {r.name: r.gain for r in demo.rules}
    yield ("impossibility band [5/8, 5/6]", demo.band == (F(5, 8), F(5, 6)), "")
    yield ("deviation gains 1/14 (endpoint) and 1/28 (midpoint)",
           gains == {"endpoint": F(1, 14), "midpoint": F(1, 28)}, str(gains))
    yield ("grid structure of FEF and PO allocations at k = 40", demo.grid_check.holds,
           f"{demo.grid_check.po_points} PO points, {demo.grid_check.fef_po_points} FEF and PO")


def reference_checks() -> list:
    out = []
    for group in (_nonconvexity, _fixed_point, _mechanisms):
        for name, ok, detail in group():
            out.append(CheckResult(name, bool(ok), detail))
    return out
