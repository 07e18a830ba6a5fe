"""Best feasible sub-bundles.

For divisible goods this is a fractional knapsack, solved exactly by taking goods
in order of decreasing density. For piece multisets (goods cut into identical
pieces) the search is exhaustive over per-good piece counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapExceeded
from .model import ZERO, Instance

ENUMERATION_CAP = 10 ** 7


def density_order(inst: Instance, i: int) -> list:
    """Goods by decreasing density for agent i; ties go to the lower index."""
    return sorted(range(inst.m), key=lambda g: (-inst.density(i, g), g))


def max_feasible_subset(inst: Instance, i: int, b, values=None):
    """Most valuable ``y <= b`` that fits agent i's budget.

    ``values`` overrides agent i's value row (reported values); sizes and the
    budget always come from the instance. Goods worth nothing are never taken.
    Returns ``(y, value)``.
    """
    row = inst.values[i] if values is None else tuple(Fraction(v) for v in values)
    sizes = inst.sizes[i]
    order = sorted(range(inst.m), key=lambda g: (-(row[g] / sizes[g]), g))
    room = inst.budgets[i]
    y = [ZERO] * inst.m
    total = ZERO
    for g in order:
        if room <= 0 or row[g] == 0:
            break
        if b[g] <= 0:
            continue
        take = min(b[g], room / sizes[g])
        y[g] = take
        room -= take * sizes[g]
        total += take * row[g]
    return tuple(y), total


@dataclass(frozen=True)
class PieceMultiset:
    """``counts[g]`` available pieces of good g, where g was cut into ``pieces[g]``."""

    counts: tuple
    pieces: tuple

    def piece_value(self, inst, i, g) -> Fraction:
        return inst.values[i][g] / self.pieces[g]

    def piece_size(self, inst, i, g) -> Fraction:
        return inst.sizes[i][g] / self.pieces[g]

    def search_space(self) -> int:
        return math.prod(c + 1 for c in self.counts)

    def remove(self, g) -> "PieceMultiset":
        counts = list(self.counts)
        counts[g] -= 1
        return PieceMultiset(tuple(counts), self.pieces)


def multiset_value(inst, i, counts, pieces) -> Fraction:
    return sum((Fraction(c) * inst.values[i][g] / pieces[g] for g, c in enumerate(counts)), ZERO)


def multiset_size(inst, i, counts, pieces) -> Fraction:
    return sum((Fraction(c) * inst.sizes[i][g] / pieces[g] for g, c in enumerate(counts)), ZERO)


def max_feasible_discrete_subset(inst: Instance, i: int, pieces: PieceMultiset,
                                 cap: int = ENUMERATION_CAP):
    """Best sub-multiset of ``pieces`` within agent i's budget, by exhaustive count search.

    Returns ``(counts, value)``. Among optimal count vectors the lexicographically
    smallest one is returned.
    """
    space = pieces.search_space()
    if space > cap:
        raise CapExceeded(
            f"discrete search space {space} exceeds cap {cap}; use a larger eps (fewer pieces)")
    m = inst.m
    val = [pieces.piece_value(inst, i, g) for g in range(m)]
    size = [pieces.piece_size(inst, i, g) for g in range(m)]
    avail = [c if val[g] > 0 else 0 for g, c in enumerate(pieces.counts)]
    best_counts = [0] * m
    best = [ZERO]
    cur = [0] * m

    def visit(g, room, acc):
        if g == m:
            if acc > best[0]:
                best[0] = acc
                best_counts[:] = cur
            return
        for c in range(avail[g] + 1):
            used = size[g] * c
            if used > room:
                break
            cur[g] = c
            visit(g + 1, room - used, acc + val[g] * c)
        cur[g] = 0

    visit(0, inst.budgets[i], ZERO)
    return tuple(best_counts), best[0]
