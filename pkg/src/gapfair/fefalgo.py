"""Envy-cycle-free swapping with the charity: FEFx on pieces and FEF-eps on divisible goods.

Goods are cut into ``K`` identical pieces. Starting from empty bundles, while some
agent envies the charity, a minimally envied set ``T`` of charity pieces is found
and handed to an agent ``k`` who envies it; ``k``'s old pieces go back to the
charity. Every swap strictly raises ``k``'s value and leaves the others alone.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CapExceeded, ContractViolation
from .fairness import max_envy
from .knapsack import ENUMERATION_CAP, PieceMultiset, max_feasible_discrete_subset, multiset_value
from .model import Allocation, DiscreteAllocation, Instance

logger = logging.getLogger(__name__)


def lipschitz_bound(inst: Instance) -> Fraction:
    """Largest single-good value: adding a d-fraction of any good adds at most d*L."""
    return max((v for row in inst.values for v in row), default=Fraction(0))


def split_into_pieces(inst: Instance, eps) -> PieceMultiset:
    """Cut every good into ``ceil(L / eps)`` identical pieces (at least one)."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    k = max(1, math.ceil(lipschitz_bound(inst) / eps))
    return PieceMultiset((k,) * inst.m, (k,) * inst.m)


def _envies(inst, i, counts, pieces, own, cap):
    """Best feasible sub-multiset of ``counts`` for agent i, if it beats ``own``."""
    best_counts, best = max_feasible_discrete_subset(inst, i, PieceMultiset(counts, pieces), cap)
    return best_counts if best > own else None


def find_minimal_envied_set(inst: Instance, dalloc: DiscreteAllocation, cap: int = ENUMERATION_CAP):
    """A charity sub-multiset ``T`` envied by some agent, no strict subset of which is envied.

    Returns ``(T, k)`` with ``k`` the lowest-index agent envying ``T``, or ``None``
    when nobody envies the charity. Minimality is reached by shrinking: as long as
    removing one piece leaves a set someone envies, jump to that agent's best
    feasible subset of it.
    """
    pieces = dalloc.pieces
    own = [multiset_value(inst, i, dalloc.counts[i], pieces) for i in range(inst.n)]
    charity = dalloc.charity
    T = None
    for k in range(inst.n):
        T = _envies(inst, k, charity, pieces, own[k], cap)
        if T is not None:
            break
    if T is None:
        return None
    shrinking = True
    while shrinking:
        shrinking = False
        for g in range(inst.m):
            if T[g] == 0:
                continue
            smaller = list(T)
            smaller[g] -= 1
            smaller = tuple(smaller)
            for k in range(inst.n):
                sub = _envies(inst, k, smaller, pieces, own[k], cap)
                if sub is not None:
                    T, shrinking = sub, True
                    break
            if shrinking:
                break
    for k in range(inst.n):
        if _envies(inst, k, T, pieces, own[k], cap) is not None:
            if _envies(inst, k, T, pieces, own[k], cap) != T:
                raise ContractViolation("minimal envied set is not itself the envied subset")
            return T, k
    raise ContractViolation("shrinking lost the envied set")


@dataclass
class FefxRun:
    allocation: DiscreteAllocation
    swaps: list = field(default_factory=list)  # (agent, T, welfare after swap)


def compute_fefx(inst: Instance, pieces=None, cap: int = ENUMERATION_CAP,
                 record: FefxRun | None = None) -> DiscreteAllocation:
    """FEFx allocation of goods cut into ``pieces[g]`` identical pieces (default: whole goods)."""
    if isinstance(pieces, PieceMultiset):
        pieces = pieces.pieces
    pieces = tuple(pieces) if pieces is not None else (1,) * inst.m
    counts = [tuple([0] * inst.m) for _ in range(inst.n)]
    dalloc = DiscreteAllocation(tuple(counts), pieces)
    guard = inst.n * math.prod(k + 1 for k in pieces)
    total = Fraction(0)
    for step in range(guard + 1):
        found = find_minimal_envied_set(inst, dalloc, cap)
        if found is None:
            if record is not None:
                record.allocation = dalloc
            return dalloc
        T, k = found
        before = multiset_value(inst, k, counts[k], pieces)
        counts[k] = T
        dalloc = DiscreteAllocation(tuple(counts), pieces)
        after = multiset_value(inst, k, T, pieces)
        if after <= before:
            raise ContractViolation(f"swap did not strictly benefit agent {k}")
        new_total = sum((multiset_value(inst, i, counts[i], pieces) for i in range(inst.n)), Fraction(0))
        if new_total <= total:
            raise ContractViolation("total value failed to increase across a swap")
        total = new_total
        logger.debug("swap %d: agent %d takes %s (value %s -> %s)", step, k, T, before, after)
        if record is not None:
            record.swaps.append((k, T, total))
    raise ContractViolation(f"no termination within {guard} swaps")


def compute_fef_eps_discrete(inst: Instance, eps, cap: int = ENUMERATION_CAP) -> DiscreteAllocation:
    return compute_fefx(inst, split_into_pieces(inst, eps).pieces, cap)


def compute_fef_eps(inst: Instance, eps, cap: int = ENUMERATION_CAP) -> Allocation:
    """FEF-eps allocation: FEFx on pieces worth at most ``eps`` each, read back as fractions."""
    return compute_fef_eps_discrete(inst, eps, cap).to_allocation()


@dataclass
class ConvergenceStep:
    eps: Fraction
    allocation: Allocation
    max_envy: Fraction
    distance: Fraction | None  # max-norm distance to the previous step's allocation


@dataclass
class ConvergenceReport:
    steps: list
    truncated: bool = False
    reason: str = ""


def _max_norm(a: Allocation, b: Allocation) -> Fraction:
    return max((abs(x - y) for ra, rb in zip(a.bundles, b.bundles) for x, y in zip(ra, rb)),
               default=Fraction(0))


def fef_convergence_study(inst: Instance, schedule, cap: int = ENUMERATION_CAP) -> ConvergenceReport:
    """Run the FEF-eps procedure along a non-increasing eps schedule.

    Each step's maximum envy is asserted to be at most its eps. Nothing is claimed
    about convergence of the allocations themselves. A step that exceeds the
    enumeration cap truncates the run.
    """
    schedule = [Fraction(e) for e in schedule]
    if not schedule:
        raise ValueError("empty schedule")
    if any(e <= 0 for e in schedule):
        raise ValueError("eps values must be positive")
    if any(b > a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("eps schedule must be non-increasing")
    report = ConvergenceReport(steps=[])
    prev = None
    for eps in schedule:
        try:
            alloc = compute_fef_eps(inst, eps, cap)
        except CapExceeded as exc:
            report.truncated, report.reason = True, str(exc)
            break
        envy = max_envy(inst, alloc)
        if envy > eps:
            raise ContractViolation(f"max envy {envy} exceeds eps {eps}")
        report.steps.append(ConvergenceStep(eps, alloc, envy, None if prev is None else _max_norm(prev, alloc)))
        prev = alloc
    return report
