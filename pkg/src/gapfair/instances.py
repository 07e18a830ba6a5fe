"""Named instances and random generators used by demos, tests and the CLI."""

from __future__ import annotations

import random
from fractions import Fraction

from .model import Allocation, Instance

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def nonconvex_instance() -> Instance:
    """Two agents, two goods, unit budgets; its FEF allocations do not form a convex set."""
    return Instance(values=[[2, 1], [1, 1]], sizes=[[1, 1], [1, 2]], budgets=[1, 1])


def nonconvex_allocations() -> dict:
    """The two FEF allocations ``x``, ``y`` and their non-FEF midpoint ``z``."""
    x = Allocation(((0, 1), (HALF, 0)))
    y = Allocation(((HALF, 0), (HALF, 0)))
    z = Allocation(((QUARTER, HALF), (HALF, 0)))
    return {"x": x, "y": y, "z": z}


def fef_po_certificate(a) -> Allocation:
    """Member of the FEF and PO family on :func:`nonconvex_instance` for ``a`` in [2/5, 1/2]."""
    a = Fraction(a)
    return Allocation(((a, 1 - a), (1 - a, a / 2)))


def two_good_instance(alpha, beta, budget=2) -> Instance:
    """Unconstrained two-agent instance: values ``(alpha, 1-alpha)`` and ``(beta, 1-beta)``."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    return Instance(values=[[alpha, 1 - alpha], [beta, 1 - beta]],
                    sizes=[[1, 1], [1, 1]], budgets=[budget, budget])


def random_fraction(rng: random.Random, max_den: int, lo=0, hi=1, positive=False) -> Fraction:
    """Uniform-ish rational in ``[lo, hi]`` with denominator at most ``max_den``."""
    while True:
        q = rng.randint(1, max_den)
        p = rng.randint(int(lo * q), int(hi * q))
        x = Fraction(p, q)
        if lo <= x <= hi and (x > 0 or not positive):
            return x


def random_instance(rng: random.Random, n: int, m: int, max_den: int = 8,
                    positive_values: bool = True, max_value=1, max_budget=2) -> Instance:
    values = [[random_fraction(rng, max_den, 0, max_value, positive=positive_values) for _ in range(m)]
              for _ in range(n)]
    sizes = [[random_fraction(rng, max_den, 0, 1, positive=True) for _ in range(m)] for _ in range(n)]
    budgets = [random_fraction(rng, max_den, 0, max_budget) for _ in range(n)]
    return Instance(values=values, sizes=sizes, budgets=budgets)


def random_weights(rng: random.Random, n: int, max_den: int = 12) -> tuple:
    raw = [Fraction(rng.randint(1, max_den), rng.randint(1, max_den)) for _ in range(n)]
    total = sum(raw)
    return tuple(x / total for x in raw)
