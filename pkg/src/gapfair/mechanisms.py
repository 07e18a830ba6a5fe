"""Truthful mechanisms, a truthfulness auditor, and the two-good impossibility demo.

Agents report value vectors; sizes and budgets are public. Utilities in audits
always use the true values applied to the bundle computed from the reports.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from itertools import product

from . import lp
from .efficiency import allocation_from_point, allocation_rows, is_pareto_optimal
from .errors import ContractViolation, InstanceError
from .fairness import is_fef
from .knapsack import max_feasible_subset
from .model import ZERO, Allocation, Instance, allocation_to_dict, bundle_value, fmt, to_fraction

logger = logging.getLogger(__name__)


def validate_reports(inst: Instance, reports) -> tuple:
    """Reports as a tuple of non-negative Fraction rows, one per agent."""
    if len(reports) != inst.n:
        raise InstanceError(f"expected {inst.n} reports, got {len(reports)}", "reports")
    rows = []
    for i, row in enumerate(reports):
        if len(row) != inst.m:
            raise InstanceError(f"expected {inst.m} values, got {len(row)}", f"reports[{i}]")
        vals = tuple(to_fraction(v, f"reports[{i}][{g}]") for g, v in enumerate(row))
        for g, v in enumerate(vals):
            if v < 0:
                raise InstanceError("negative value", f"reports[{i}][{g}]")
        rows.append(vals)
    return tuple(rows)


def split_half_mechanism(inst: Instance, reports=None) -> Allocation:
    """Two agents; each gets the best feasible part (by reported density) of her own half of every good."""
    if inst.n != 2:
        raise InstanceError(f"split-half needs exactly 2 agents, got {inst.n}", "values")
    reports = validate_reports(inst, inst.values if reports is None else reports)
    half = (Fraction(1, 2),) * inst.m
    bundles = tuple(max_feasible_subset(inst, i, half, values=reports[i])[0] for i in range(2))
    alloc = Allocation(bundles)
    verdict = is_fef(inst.with_values(reports), alloc)
    if not verdict:
        raise ContractViolation(f"split-half output is not FEF under the reports: {verdict.witness}")
    return alloc


def _value_row(inst, values, i, extra=0):
    coeffs = [ZERO] * (inst.n * inst.m + extra)
    for g in range(inst.m):
        coeffs[i * inst.m + g] = values[i][g]
    return coeffs


def serial_po_mechanism(inst: Instance, reports=None, order=None) -> Allocation:
    """Agents in ``order`` each maximize their reported value, earlier values locked by equalities.

    A final feasibility LP over all locked values picks the allocation.
    """
    reports = validate_reports(inst, inst.values if reports is None else reports)
    order = list(range(inst.n)) if order is None else list(order)
    if sorted(order) != list(range(inst.n)):
        raise ValueError(f"order {order} is not a permutation of the agents")
    rows = allocation_rows(inst)
    for i in order:
        obj = _value_row(inst, reports, i)
        sol = lp.solve(lp.LinearProgram(obj, rows))
        if not sol.optimal:
            raise ContractViolation(f"stage LP for agent {i} infeasible")
        rows = rows + [lp.Constraint(obj, lp.EQ, sol.value)]
        logger.debug("serial stage agent %d: q = %s", i, sol.value)
    final = lp.solve_feasibility(rows, [(0, 1)] * (inst.n * inst.m))
    if not final.optimal:
        raise ContractViolation("final feasibility LP infeasible")
    alloc = allocation_from_point(inst, final.point)
    if not is_pareto_optimal(inst.with_values(reports), alloc):
        raise ContractViolation("serial mechanism output is not Pareto-optimal under the reports")
    return alloc


# -- auditing ------------------------------------------------------------------------

@dataclass(frozen=True)
class AuditEntry:
    agent: int
    report: tuple
    truthful_utility: Fraction
    misreport_utility: Fraction

    @property
    def gain(self) -> Fraction:
        return self.misreport_utility - self.truthful_utility

    def to_dict(self) -> dict:
        return {"agent": self.agent, "report": [fmt(v) for v in self.report],
                "truthful_utility": fmt(self.truthful_utility),
                "misreport_utility": fmt(self.misreport_utility), "gain": fmt(self.gain)}


@dataclass
class AuditResult:
    entries: list = field(default_factory=list)

    @property
    def max_gain(self) -> Fraction:
        return max((e.gain for e in self.entries), default=ZERO)

    @property
    def witness(self) -> AuditEntry | None:
        """First entry attaining the maximum gain, if that gain is positive."""
        best = self.max_gain
        if best <= 0:
            return None
        return next(e for e in self.entries if e.gain == best)

    @property
    def truthful(self) -> bool:
        return self.max_gain <= 0

    def to_dict(self, include_entries=False) -> dict:
        out = {"truthful": self.truthful, "max_gain": fmt(self.max_gain),
               "checked": len(self.entries),
               "witness": None if self.witness is None else self.witness.to_dict()}
        if include_entries:
            out["entries"] = [e.to_dict() for e in self.entries]
        return out


def audit_truthfulness(mechanism, inst: Instance, misreport_grid, threads: int = 1) -> AuditResult:
    """Rerun ``mechanism(inst, reports)`` with one agent's report swapped for each misreport.

    ``misreport_grid`` is either one list of value vectors used for every agent or a
    mapping from agent index to its list.
    """
    truth = validate_reports(inst, inst.values)
    baseline = mechanism(inst, truth)
    true_util = [bundle_value(inst, i, baseline.bundles[i]) for i in range(inst.n)]
    if isinstance(misreport_grid, dict):
        grid = {i: list(misreport_grid.get(i, ())) for i in range(inst.n)}
    else:
        shared = list(misreport_grid)
        grid = {i: shared for i in range(inst.n)}
    jobs = [(i, tuple(to_fraction(v) for v in r)) for i in range(inst.n) for r in grid[i]]

    def run(job):
        i, r = job
        reports = list(truth)
        reports[i] = r
        alloc = mechanism(inst, reports)
        return AuditEntry(i, r, true_util[i], bundle_value(inst, i, alloc.bundles[i]))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            entries = list(pool.map(run, jobs))
    else:
        entries = [run(j) for j in jobs]
    return AuditResult(entries)


def rational_lattice(max_den: int, lo=0, hi=1) -> list:
    """Sorted distinct rationals in ``[lo, hi]`` with denominator at most ``max_den``."""
    lo, hi = Fraction(lo), Fraction(hi)
    pts = set()
    for q in range(1, max_den + 1):
        for p in range(int(lo * q) - 1, int(hi * q) + 2):
            x = Fraction(p, q)
            if lo <= x <= hi:
                pts.add(x)
    return sorted(pts)


def lattice_reports(m: int, max_den: int, lo=0, hi=1) -> list:
    """Every value vector of length ``m`` with entries from :func:`rational_lattice`."""
    return [tuple(v) for v in product(rational_lattice(max_den, lo, hi), repeat=m)]


# -- impossibility demonstration -----------------------------------------------------

def _check_range(alpha, beta):
    if not Fraction(1, 2) < beta < alpha < 1:
        raise ValueError(f"need 1/2 < beta < alpha < 1, got alpha={alpha}, beta={beta}")


def _first_share(report) -> Fraction:
    total = report[0] + report[1]
    if total == 0:
        raise ValueError("report has zero total value")
    return report[0] / total


def ef_po_band(alpha, beta) -> tuple:
    """Range of ``x_{1,1}`` (with ``x_{1,2} = 0``) over FEF and PO allocations."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    _check_range(alpha, beta)
    return 1 / (2 * alpha), 1 / (2 * beta)


def _band_rule(pick, inst: Instance, reports) -> Allocation:
    reports = validate_reports(inst, reports)
    a, b = _first_share(reports[0]), _first_share(reports[1])
    lo, hi = ef_po_band(a, b)
    t = pick(lo, hi)
    return Allocation(((t, ZERO), (1 - t, Fraction(1))))


def band_endpoint_rule(inst: Instance, reports) -> Allocation:
    """FEF and PO rule giving agent 0 the smallest admissible share of good 0."""
    return _band_rule(lambda lo, hi: lo, inst, reports)


def band_midpoint_rule(inst: Instance, reports) -> Allocation:
    """FEF and PO rule giving agent 0 the midpoint of the admissible band."""
    return _band_rule(lambda lo, hi: (lo + hi) / 2, inst, reports)


REFERENCE_RULES = {"endpoint": band_endpoint_rule, "midpoint": band_midpoint_rule}


@dataclass
class RuleDemo:
    name: str
    truthful: Allocation
    deviation: tuple          # agent 0's report (alpha', 1 - alpha')
    deviated: Allocation
    gain: Fraction            # agent 0's true-value gain from the deviation
    audit: AuditResult

    def to_dict(self) -> dict:
        return {"rule": self.name,
                "truthful_allocation": allocation_to_dict(self.truthful)["bundles"],
                "deviation": [fmt(v) for v in self.deviation],
                "deviated_allocation": allocation_to_dict(self.deviated)["bundles"],
                "gain": fmt(self.gain), "audit": self.audit.to_dict()}


@dataclass
class BandCheck:
    grid_k: int
    po_points: int
    fef_po_points: int
    split_po_points: list
    out_of_band_points: list

    @property
    def holds(self) -> bool:
        return not self.split_po_points and not self.out_of_band_points

    def to_dict(self) -> dict:
        return {"grid_k": self.grid_k, "po_points": self.po_points,
                "fef_po_points": self.fef_po_points, "holds": self.holds,
                "split_po_points": [allocation_to_dict(x)["bundles"] for x in self.split_po_points],
                "out_of_band_points": [allocation_to_dict(x)["bundles"] for x in self.out_of_band_points]}


@dataclass
class ImpossibilityTranscript:
    alpha: Fraction
    beta: Fraction
    instance: Instance
    band: tuple
    rules: list
    grid_check: BandCheck | None

    @property
    def demonstrated(self) -> bool:
        return all(r.gain > 0 and not r.audit.truthful for r in self.rules) and \
            (self.grid_check is None or self.grid_check.holds)

    def to_dict(self) -> dict:
        return {"alpha": fmt(self.alpha), "beta": fmt(self.beta),
                "band": [fmt(self.band[0]), fmt(self.band[1])],
                "rules": [r.to_dict() for r in self.rules],
                "grid_check": None if self.grid_check is None else self.grid_check.to_dict(),
                "demonstrated": self.demonstrated}


def verify_band_structure(inst: Instance, alpha, beta, k: int, threads: int = 1) -> BandCheck:
    """Grid check: PO points have ``x11 = 1`` or ``x12 = 0``; FEF and PO points lie in the band."""
    from .oracle import pareto_frontier

    lo, hi = ef_po_band(alpha, beta)
    po = pareto_frontier(inst, k, threads=threads)
    c1, c2, both = [], [], 0
    for x in po:
        x11, x12 = x.bundles[0]
        if not (x11 == 1 or x12 == 0):
            c1.append(x)
        if is_fef(inst, x):
            both += 1
            if not (x12 == 0 and lo <= x11 <= hi):
                c2.append(x)
    return BandCheck(k, len(po), both, c1, c2)


def demo_misreports(alpha, beta, max_den: int = 12) -> dict:
    """Per-agent report grids: lattice shares inside the valid range plus the structured deviations."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    half = Fraction(1, 2)
    agent0 = {a for a in rational_lattice(max_den, beta, 1) if beta < a < 1}
    agent0.add((alpha + beta) / 2)
    agent1 = {b for b in rational_lattice(max_den, half, alpha) if half < b < alpha}
    agent1.add(beta + (alpha - beta) / 4)
    return {0: [(a, 1 - a) for a in sorted(agent0)], 1: [(b, 1 - b) for b in sorted(agent1)]}


def impossibility_demo(alpha, beta, grid_k: int | None = 40, threads: int = 1) -> ImpossibilityTranscript:
    """Show that FEF and PO rules on the two-good instance reward misreporting.

    Agent 0 reporting ``alpha' = (alpha + beta) / 2`` moves the admissible band for
    her share of good 0 upward, so any rule picking from the band pays her more.
    """
    from .instances import two_good_instance

    alpha, beta = Fraction(alpha), Fraction(beta)
    band = ef_po_band(alpha, beta)
    inst = two_good_instance(alpha, beta)
    deviation = ((alpha + beta) / 2, 1 - (alpha + beta) / 2)
    grid = demo_misreports(alpha, beta)
    rules = []
    for name, rule in REFERENCE_RULES.items():
        truthful = rule(inst, inst.values)
        reports = [deviation, inst.values[1]]
        deviated = rule(inst, reports)
        gain = bundle_value(inst, 0, deviated.bundles[0]) - bundle_value(inst, 0, truthful.bundles[0])
        audit = audit_truthfulness(rule, inst, grid, threads)
        rules.append(RuleDemo(name, truthful, deviation, deviated, gain, audit))
    grid_check = None if grid_k is None else verify_band_structure(inst, alpha, beta, grid_k, threads)
    return ImpossibilityTranscript(alpha, beta, inst, band, rules, grid_check)


MECHANISMS = {"split-half": split_half_mechanism, "serial-po": serial_po_mechanism}


def get_mechanism(name: str, order=None):
    if name not in MECHANISMS:
        raise ValueError(f"unknown mechanism {name!r}; choose from {sorted(MECHANISMS)}")
    if name == "serial-po":
        return partial(serial_po_mechanism, order=order)
    return MECHANISMS[name]
