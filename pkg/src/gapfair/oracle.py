"""Brute-force ground truth on the grid ``{0, 1/k, ..., 1}`` of allocations.

Grid points are generated as integer count arrays with numpy (``c[i, g] = k * x_ig``)
so feasibility and the cheap Pareto filter run vectorized; every point that is
reported goes through the exact checkers as a :class:`~gapfair.model.Allocation`.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations

import numpy as np

from .efficiency import is_pareto_optimal
from .errors import CapExceeded
from .fairness import is_fef
from .knapsack import ENUMERATION_CAP
from .model import Allocation, Instance, fmt

logger = logging.getLogger(__name__)

CHUNK = 1 << 18


def grid_size(inst: Instance, k: int) -> int:
    return (k + 1) ** (inst.n * inst.m)


def _check_grid(inst, k, cap):
    if k < 1:
        raise ValueError("grid resolution k must be at least 1")
    size = grid_size(inst, k)
    if size > cap:
        raise CapExceeded(f"grid has {size} points, over the cap of {cap}; reduce k, n or m")


def _scaled(rows):
    """Integer matrix proportional to ``rows`` and the common scale factor."""
    den = math.lcm(*(Fraction(x).denominator for row in rows for x in row)) if rows else 1
    return [[int(Fraction(x) * den) for x in row] for row in rows], den


def _counts_chunk(start, stop, k, width):
    """Mixed-radix digits of ``arange(start, stop)`` in base ``k + 1``; first column most significant."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, width), dtype=np.int64)
    for col in range(width - 1, -1, -1):
        out[:, col] = idx % (k + 1)
        idx //= k + 1
    return out


def _budget_usage(inst, k, c3):
    """Scaled budget use per agent as integer columns, and the scaled budgets.

    Counts times sizes are compared against ``k * B_i`` after clearing size
    denominators; Python integers are used when int64 could overflow.
    """
    sizes, den = _scaled([list(r) for r in inst.sizes])
    biggest = max((x for row in sizes for x in row), default=0)
    dtype = object if biggest * k * max(inst.m, 1) >= 2 ** 62 else np.int64
    used = [c3[:, i, :].astype(dtype) @ np.array(sizes[i], dtype=dtype) for i in range(inst.n)]
    bounds = [inst.budgets[i] * k * den for i in range(inst.n)]
    return used, bounds


def _feasible_mask(inst, k, c):
    c3 = c.reshape(-1, inst.n, inst.m)
    ok = c3.sum(axis=1).max(axis=1, initial=0) <= k
    used, bounds = _budget_usage(inst, k, c3)
    for u, b in zip(used, bounds):
        ok &= (u <= math.floor(b)).astype(bool)
    return ok


def _po_candidate_mask(inst, k, c):
    """False where some agent with spare budget values a good the charity holds (certainly not PO)."""
    c3 = c.reshape(-1, inst.n, inst.m)
    charity = k - c3.sum(axis=1)
    used, bounds = _budget_usage(inst, k, c3)
    ok = np.ones(len(c), dtype=bool)
    for i in range(inst.n):
        room = (used[i] < math.ceil(bounds[i])).astype(bool)
        wants = np.zeros(len(c), dtype=bool)
        for g in range(inst.m):
            if inst.values[i][g] > 0:
                wants |= charity[:, g] > 0
        ok &= ~(room & wants)
    return ok


def _to_allocation(row, n, m, k):
    return Allocation(tuple(tuple(Fraction(int(row[i * m + g]), k) for g in range(m)) for i in range(n)))


def _chunks(inst, k):
    total = grid_size(inst, k)
    return [(s, min(s + CHUNK, total)) for s in range(0, total, CHUNK)]


def _scan(inst, k, cap, threads, po_filter, keep):
    _check_grid(inst, k, cap)
    n, m = inst.n, inst.m

    def work(bounds):
        c = _counts_chunk(bounds[0], bounds[1], k, n * m)
        mask = _feasible_mask(inst, k, c)
        if po_filter:
            mask &= _po_candidate_mask(inst, k, c)
        out = []
        for row in c[mask]:
            x = _to_allocation(row, n, m, k)
            if keep(x):
                out.append(x)
        return out

    chunks = _chunks(inst, k)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(ch) for ch in chunks]
    # chunks are in lexicographic index order, so the merge is deterministic
    return [x for part in parts for x in part]


def enumerate_feasible(inst: Instance, k: int, cap: int = ENUMERATION_CAP, threads: int = 1) -> list:
    """All feasible grid allocations in lexicographic order of their count vectors."""
    return _scan(inst, k, cap, threads, False, lambda x: True)


def enumerate_fef_set(inst: Instance, k: int, cap: int = ENUMERATION_CAP, threads: int = 1) -> list:
    """Feasible grid allocations passing :func:`is_fef`."""
    return _scan(inst, k, cap, threads, False, lambda x: is_fef(inst, x).holds)


def pareto_frontier(inst: Instance, k: int, cap: int = ENUMERATION_CAP, threads: int = 1) -> list:
    """Feasible grid allocations passing :func:`is_pareto_optimal`."""
    return _scan(inst, k, cap, threads, True, lambda x: is_pareto_optimal(inst, x).holds)


def midpoint(x: Allocation, y: Allocation) -> Allocation:
    return Allocation(tuple(tuple((a + b) / 2 for a, b in zip(rx, ry))
                            for rx, ry in zip(x.bundles, y.bundles)))


def nonconvexity_scan(inst: Instance, k: int, cap: int = ENUMERATION_CAP,
                      max_triples: int | None = None, threads: int = 1) -> list:
    """Triples ``(x, y, z)`` of FEF grid points whose midpoint ``z`` is not FEF."""
    fef = enumerate_fef_set(inst, k, cap, threads)
    pairs = len(fef) * (len(fef) - 1) // 2
    if pairs > cap:
        raise CapExceeded(f"{pairs} FEF pairs exceed the cap of {cap}; reduce k")
    triples = []
    for x, y in combinations(fef, 2):
        z = midpoint(x, y)
        if not is_fef(inst, z).holds:
            triples.append((x, y, z))
            if max_triples is not None and len(triples) >= max_triples:
                break
    return triples


def value_points(inst: Instance, allocations) -> list:
    """Each allocation's vector of agent values."""
    return [x.values(inst) for x in allocations]


def point_cloud_csv(inst: Instance, clouds: dict) -> str:
    """CSV rows ``label, v_0, ..., v_{n-1}`` (values as floats) for plotting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["label"] + [f"v{i}" for i in range(inst.n)])
    for label, allocations in clouds.items():
        for vals in value_points(inst, allocations):
            writer.writerow([label] + [float(v) for v in vals])
    return buf.getvalue()


def point_cloud_json(inst: Instance, clouds: dict) -> str:
    """JSON object mapping each label to a list of exact value vectors."""
    return json.dumps({label: [[fmt(v) for v in vals] for vals in value_points(inst, allocations)]
                       for label, allocations in clouds.items()}, indent=2, sort_keys=True)
