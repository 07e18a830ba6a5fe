"""Pareto-optimality via a dominance LP, and weighted-welfare maximization."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .errors import ContractViolation
from .model import ZERO, Allocation, Instance, bundle_size, bundle_value, check_compatible


@dataclass(frozen=True)
class PoVerdict:
    holds: bool
    dominator: Allocation | None = None

    def __bool__(self):
        return self.holds


def allocation_rows(inst: Instance, extra=0):
    """Supply and budget rows over the ``n*m`` allocation variables (plus ``extra`` zeros)."""
    n, m = inst.n, inst.m
    width = n * m + extra
    rows = []
    for g in range(m):
        coeffs = [0] * width
        for i in range(n):
            coeffs[i * m + g] = 1
        rows.append(lp.Constraint(coeffs, lp.LE, 1))
    for i in range(n):
        coeffs = [0] * width
        for g in range(m):
            coeffs[i * m + g] = inst.sizes[i][g]
        rows.append(lp.Constraint(coeffs, lp.LE, inst.budgets[i]))
    return rows


def welfare_objective(inst: Instance, w, extra=0):
    return [Fraction(w[i]) * inst.values[i][g] for i in range(inst.n) for g in range(inst.m)] + [0] * extra


def allocation_from_point(inst: Instance, point) -> Allocation:
    m = inst.m
    return Allocation(tuple(tuple(point[i * m:(i + 1) * m]) for i in range(inst.n)))


def welfare(inst: Instance, alloc: Allocation, w) -> Fraction:
    return sum((Fraction(w[i]) * bundle_value(inst, i, b) for i, b in enumerate(alloc.bundles)), ZERO)


def welfare_program(inst: Instance, w) -> lp.LinearProgram:
    """The weighted-welfare LP over the generalized-assignment polytope."""
    return lp.LinearProgram(welfare_objective(inst, w), allocation_rows(inst))


def max_weighted_welfare(inst: Instance, w) -> Allocation:
    """Maximizer of ``sum_i w_i v_i(x_i)`` over feasible allocations.

    Weights must be strictly positive; the deterministic simplex selects one
    vertex when the optimum is not unique.
    """
    w = [Fraction(x) for x in w]
    if len(w) != inst.n:
        raise ValueError(f"expected {inst.n} weights, got {len(w)}")
    if any(x <= 0 for x in w):
        raise ValueError("weights must be strictly positive")
    sol = lp.solve(welfare_program(inst, w))
    if not sol.optimal:
        raise ContractViolation("welfare LP infeasible although the empty allocation is feasible")
    return allocation_from_point(inst, sol.point)


def _quick_dominator(inst: Instance, alloc: Allocation):
    """Cheap certificate: some agent with spare budget values a good the charity still holds."""
    charity = alloc.charity
    for i, b in enumerate(alloc.bundles):
        room = inst.budgets[i] - bundle_size(inst, i, b)
        if room <= 0:
            continue
        for g in range(inst.m):
            if charity[g] > 0 and inst.values[i][g] > 0:
                extra = min(charity[g], room / inst.sizes[i][g])
                bundles = [list(x) for x in alloc.bundles]
                bundles[i][g] += extra
                return Allocation(tuple(tuple(x) for x in bundles))
    return None


def dominance_program(inst: Instance, alloc: Allocation) -> lp.LinearProgram:
    """Maximize the total slack ``sum_i d_i`` with ``v_i(y_i) >= v_i(x_i) + d_i``, ``d >= 0``."""
    n, m = inst.n, inst.m
    k = n * m
    rows = allocation_rows(inst, extra=n)
    own = alloc.values(inst)
    for i in range(n):
        coeffs = [0] * (k + n)
        for g in range(m):
            coeffs[i * m + g] = inst.values[i][g]
        coeffs[k + i] = -1
        rows.append(lp.Constraint(coeffs, lp.GE, own[i]))
    objective = [0] * k + [1] * n
    bounds = [(0, 1)] * k + [(0, sum(inst.values[i], ZERO)) for i in range(n)]
    return lp.LinearProgram(objective, rows, bounds)


def is_pareto_optimal(inst: Instance, alloc: Allocation, fast=True) -> PoVerdict:
    """No feasible allocation weakly improves everyone and strictly improves someone.

    With ``fast`` a charity-slack certificate is tried before the LP; either way
    a returned dominator is re-verified exactly.
    """
    check_compatible(inst, alloc)
    dominator = _quick_dominator(inst, alloc) if fast else None
    if dominator is None:
        sol = lp.solve(dominance_program(inst, alloc))
        if not sol.optimal:
            raise ContractViolation("dominance LP infeasible although x itself is feasible")
        if sol.value == 0:
            return PoVerdict(True)
        dominator = allocation_from_point(inst, sol.point[:inst.n * inst.m])
    if not dominates(inst, dominator, alloc):
        raise ContractViolation("dominator failed exact re-verification")
    return PoVerdict(False, dominator)


def dominates(inst: Instance, y: Allocation, x: Allocation) -> bool:
    """``y`` is feasible and Pareto-dominates ``x``."""
    if y.infeasible_agents(inst):
        return False
    vy, vx = y.values(inst), x.values(inst)
    return all(a >= b for a, b in zip(vy, vx)) and any(a > b for a, b in zip(vy, vx))
