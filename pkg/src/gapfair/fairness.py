"""Feasible envy: FEF, FEF-eps and FEFx verdicts, the envy matrix and envy graph."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import AllocationError
from .knapsack import (ENUMERATION_CAP, PieceMultiset, max_feasible_discrete_subset,
                       max_feasible_subset, multiset_size, multiset_value)
from .model import (ZERO, Allocation, DiscreteAllocation, Instance, bundle_value,
                    check_compatible, fmt)

CHARITY = "charity"


@dataclass(frozen=True)
class Witness:
    agent: int
    target: object  # agent index or CHARITY
    bundle: tuple   # fractions for divisible goods, piece counts for FEFx
    envy: Fraction

    def to_dict(self) -> dict:
        bundle = [fmt(x) if isinstance(x, Fraction) else x for x in self.bundle]
        return {"agent": self.agent, "target": self.target, "bundle": bundle,
                "envy": fmt(self.envy)}


@dataclass(frozen=True)
class FairnessVerdict:
    holds: bool
    witness: Witness | None = None

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {"holds": self.holds,
                "witness": None if self.witness is None else self.witness.to_dict()}


def _target_bundle(alloc: Allocation, target):
    return alloc.charity if target == CHARITY else alloc.bundles[target]


def _targets(n, i):
    return [h for h in range(n) if h != i] + [CHARITY]


def best_subset_of(inst: Instance, alloc: Allocation, i: int, target):
    """Agent i's most valuable feasible sub-bundle of the target's bundle: ``(y, value)``."""
    return max_feasible_subset(inst, i, _target_bundle(alloc, target))


def envy_value(inst: Instance, alloc: Allocation, i: int, target) -> Fraction:
    """``max(0, v_i(best feasible y <= x_target) - v_i(x_i))``."""
    _, best = best_subset_of(inst, alloc, i, target)
    return max(ZERO, best - bundle_value(inst, i, alloc.bundles[i]))


def envy_matrix(inst: Instance, alloc: Allocation) -> list:
    """``n x (n+1)`` matrix of best feasible sub-bundle values; last column is the charity."""
    cols = list(range(inst.n)) + [CHARITY]
    return [[best_subset_of(inst, alloc, i, h)[1] for h in cols] for i in range(inst.n)]


def max_envy(inst: Instance, alloc: Allocation, include_charity=True) -> Fraction:
    worst = ZERO
    for i in range(inst.n):
        for t in _targets(inst.n, i):
            if t == CHARITY and not include_charity:
                continue
            worst = max(worst, envy_value(inst, alloc, i, t))
    return worst


def _scan(inst, alloc, agent_eps, charity_eps):
    check_compatible(inst, alloc)
    for i in range(inst.n):
        own = bundle_value(inst, i, alloc.bundles[i])
        for t in _targets(inst.n, i):
            y, best = best_subset_of(inst, alloc, i, t)
            limit = charity_eps if t == CHARITY else agent_eps
            if best - own > limit:
                return FairnessVerdict(False, Witness(i, t, y, best - own))
    return FairnessVerdict(True)


def is_fef(inst: Instance, alloc: Allocation) -> FairnessVerdict:
    """Feasible envy-freeness towards every other agent and the charity.

    Raises :class:`AllocationError` when some bundle breaks its owner's budget.
    """
    return _scan(inst, alloc, ZERO, ZERO)


def is_fef_eps(inst: Instance, alloc: Allocation, eps, strict_charity=False) -> FairnessVerdict:
    """Every feasible-envy amount is at most ``eps``.

    Envy towards the charity is held to the same ``eps`` unless ``strict_charity``
    is set, in which case it must be zero.
    """
    eps = Fraction(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    return _scan(inst, alloc, eps, ZERO if strict_charity else eps)


@dataclass(frozen=True)
class EnvyGraph:
    n: int
    edges: frozenset  # of (i, h): i envies h

    def successors(self, i):
        return sorted(h for a, h in self.edges if a == i)

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": sorted([list(e) for e in self.edges])}


class Acyclicity(NamedTuple):
    acyclic: bool
    order: list | None
    cycle: list | None


def envy_graph(inst: Instance, alloc: Allocation) -> EnvyGraph:
    """Edge ``i -> h`` whenever i feasibly envies agent h (charity excluded)."""
    edges = set()
    for i in range(inst.n):
        own = bundle_value(inst, i, alloc.bundles[i])
        for h in range(inst.n):
            if h != i and best_subset_of(inst, alloc, i, h)[1] > own:
                edges.add((i, h))
    return EnvyGraph(inst.n, frozenset(edges))


def is_acyclic(graph: EnvyGraph) -> Acyclicity:
    """Topological order (lowest index first among ready nodes) or a directed cycle."""
    indeg = [0] * graph.n
    for _, h in graph.edges:
        indeg[h] += 1
    ready = [i for i in range(graph.n) if indeg[i] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for h in graph.successors(i):
            indeg[h] -= 1
            if indeg[h] == 0:
                heapq.heappush(ready, h)
    if len(order) == graph.n:
        return Acyclicity(True, order, None)
    return Acyclicity(False, None, _find_cycle(graph))


def _find_cycle(graph):
    color = [0] * graph.n
    stack = []

    def dfs(u):
        color[u] = 1
        stack.append(u)
        for v in graph.successors(u):
            if color[v] == 1:
                return stack[stack.index(v):]
            if color[v] == 0:
                found = dfs(v)
                if found:
                    return found
        stack.pop()
        color[u] = 2
        return None

    for s in range(graph.n):
        if color[s] == 0:
            found = dfs(s)
            if found:
                return found
    return None


def is_fefx(inst: Instance, dalloc: DiscreteAllocation, cap: int = ENUMERATION_CAP) -> FairnessVerdict:
    """FEFx for a piece-level allocation.

    For every agent i and every other bundle (charity included), no feasible
    strict sub-multiset may be worth more to i than her own bundle. A strict
    sub-multiset misses at least one piece, so it suffices to search the target
    with one piece of some good removed.
    """
    pieces = dalloc.pieces
    if len(dalloc.counts) != inst.n or len(pieces) != inst.m:
        raise AllocationError("discrete allocation shape does not match the instance")
    for i, row in enumerate(dalloc.counts):
        if multiset_size(inst, i, row, pieces) > inst.budgets[i]:
            raise AllocationError(f"discrete bundle of agent {i} breaks her budget")
    for i in range(inst.n):
        own = multiset_value(inst, i, dalloc.counts[i], pieces)
        for t in _targets(inst.n, i):
            held = dalloc.charity if t == CHARITY else dalloc.counts[t]
            target = PieceMultiset(tuple(held), pieces)
            for g in range(inst.m):
                if held[g] == 0:
                    continue
                counts, best = max_feasible_discrete_subset(inst, i, target.remove(g), cap)
                if best > own:
                    return FairnessVerdict(False, Witness(i, t, counts, best - own))
    return FairnessVerdict(True)

