"""Search for allocations that are both FEF and Pareto-optimal.

The construction couples three maps: weighted-welfare maximization (weights to an
allocation), the envy matrix of an allocation, and a weight update that pushes the
weight of every envied agent far below that of her envier. A fixed point of the
coupled map is FEF and PO, but iterating the map need not converge, so the search
here does more than iterate:

* at every visited weight vector it looks for an FEF point anywhere in the optimal
  face of the welfare LP, not just at the vertex the simplex happens to return;
* it sweeps the weight segment between consecutive iterates exactly and searches
  the optimal face at every breakpoint, where the face is larger than a vertex;
* when the iterates revisit a weight vector it explores the weight simplex along
  its edges and along the lines where two welfare-optimal value vectors tie.

Anything returned as certified has been re-checked with :func:`is_fef` and
:func:`is_pareto_optimal`.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import lp
from .efficiency import (allocation_from_point, allocation_rows, is_pareto_optimal,
                         max_weighted_welfare, welfare_objective, welfare_program)
from .errors import ContractViolation, InstanceError
from .fairness import (CHARITY, EnvyGraph, best_subset_of, envy_graph, envy_matrix, is_acyclic,
                       is_fef, max_envy)
from .model import ZERO, Allocation, Instance, allocation_to_dict, fmt

logger = logging.getLogger(__name__)

CERTIFIED = "certified"
ITERATION_CAP = "iteration-cap"


@dataclass(frozen=True)
class GammaParams:
    gamma: Fraction
    eps_floor: Fraction
    M: Fraction
    cond1: Fraction
    cond2: Fraction | None  # None: no pair of distinct agents, bound vacuous
    cond3: Fraction | None  # None: the density set is empty, bound is +infinity

    def to_dict(self) -> dict:
        def f(x):
            return "inf" if x is None else fmt(x)
        return {"gamma": f(self.gamma), "eps_floor": f(self.eps_floor), "M": f(self.M),
                "cond1": f(self.cond1), "cond2": f(self.cond2), "cond3": f(self.cond3)}


def compute_gamma(inst: Instance, all_pairs: bool = False) -> GammaParams:
    """Half of the smallest upper bound on gamma, so every strict bound holds strictly.

    Pairs ``(i, h)`` range over distinct agents; ``all_pairs`` also admits ``i == h``
    (more conservative, never needed for the no-envy guarantee between distinct agents).
    """
    n, m = inst.n, inst.m
    pairs = [(i, h) for i in range(n) for h in range(n) if all_pairs or i != h]
    cond1 = Fraction(1, 2)
    cond2 = None
    for i, h in pairs:
        for g in range(m):
            if inst.values[i][g] == 0 or inst.values[h][g] == 0:
                raise InstanceError(
                    f"value of good {g} is zero for agent {i if inst.values[i][g] == 0 else h}; "
                    "the ratio bound on gamma needs positive values (perturb zeros to a small "
                    "positive rational)", "values")
            r = inst.values[i][g] / inst.values[h][g]
            cond2 = r if cond2 is None else min(cond2, r)
    cond3 = None
    for i, h in pairs:
        for g in range(m):
            for gp in range(m):
                if inst.density(i, gp) > inst.density(i, g):
                    num = inst.values[i][gp] - inst.values[i][g] * inst.sizes[i][gp] / inst.sizes[i][g]
                    r = num / inst.values[h][gp]
                    cond3 = r if cond3 is None else min(cond3, r)
    if cond3 is not None:
        cond3 = cond3 / 2
    bound = min(x for x in (cond1, cond2, cond3) if x is not None)
    gamma = bound / 2
    M = max((sum(row, ZERO) for row in inst.values), default=ZERO)
    return GammaParams(gamma, gamma ** n / n if n else gamma, M, cond1, cond2, cond3)


def envy_matrix_p2(inst: Instance, alloc: Allocation) -> list:
    """Best-feasible-subset values ``v[i][h]`` (last column: charity) via the greedy knapsack."""
    return envy_matrix(inst, alloc)


def _levels(graph: EnvyGraph) -> list:
    """Longest path length from any source to each node (graph must be acyclic)."""
    acyc = is_acyclic(graph)
    if not acyc.acyclic:
        raise ContractViolation(
            f"envy graph has a cycle {acyc.cycle}; welfare-maximizing allocations never do")
    level = [0] * graph.n
    for i in acyc.order:
        for h in graph.successors(i):
            level[h] = max(level[h], level[i] + 1)
    return level


def weights_satisfy_p3(graph: EnvyGraph, w, gamma, eps_floor) -> bool:
    return (sum(w) == 1 and all(x >= eps_floor for x in w)
            and all(w[h] <= gamma * w[i] for i, h in graph.edges))


def adjust_weights_p3(graph: EnvyGraph, gamma, eps_floor, method: str = "levels") -> tuple:
    """Weights with ``w_h <= gamma * w_i`` on every envy edge ``i -> h``, summing to 1, each >= eps_floor.

    ``levels`` sets ``w_i`` proportional to ``gamma ** level(i)``; ``lp`` solves the
    same constraint system as a feasibility LP.
    """
    gamma, eps_floor = Fraction(gamma), Fraction(eps_floor)
    n = graph.n
    if method == "levels":
        level = _levels(graph)
        raw = [gamma ** d for d in level]
        total = sum(raw)
        w = [x / total for x in raw]
        if any(x < eps_floor for x in w):
            w = [max(x, eps_floor) for x in w]
            total = sum(w)
            w = [x / total for x in w]
    elif method == "lp":
        _levels(graph)
        rows = [lp.Constraint([1] * n, lp.EQ, 1)]
        for i, h in sorted(graph.edges):
            coeffs = [0] * n
            coeffs[h] += 1
            coeffs[i] -= gamma
            rows.append(lp.Constraint(coeffs, lp.LE, 0))
        sol = lp.solve_feasibility(rows, [(eps_floor, 1)] * n)
        if not sol.optimal:
            raise ContractViolation("weight-adjustment program infeasible on an acyclic graph")
        w = list(sol.point)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not weights_satisfy_p3(graph, w, gamma, eps_floor):
        raise ContractViolation("adjusted weights fail the constraint system")
    return tuple(w)


# -- searching an optimal face for an FEF point --------------------------------------

def _no_envy_row(inst: Instance, i: int, target, lam: Fraction):
    """Linear sufficient condition for "i does not envy target", tight for the right ``lam``.

    By LP duality, i's best feasible subset of bundle b is worth
    ``min_{lam >= 0} lam*B_i + sum_g max(0, v_ig - lam*s_ig) * b_g``, attained at
    ``lam = 0`` or at one of i's densities.
    """
    n, m = inst.n, inst.m
    coeffs = [Fraction(0)] * (n * m)
    c = [max(ZERO, inst.values[i][g] - lam * inst.sizes[i][g]) for g in range(m)]
    rhs = -lam * inst.budgets[i]
    for g in range(m):
        coeffs[i * m + g] -= inst.values[i][g]
        if target == CHARITY:
            rhs -= c[g]
            for j in range(n):
                coeffs[j * m + g] -= c[g]
        else:
            coeffs[target * m + g] += c[g]
    return lp.Constraint(coeffs, lp.LE, rhs)


def _dual_candidates(inst, i):
    lams = {ZERO} | {inst.density(i, g) for g in range(inst.m)}
    return sorted(lams)


def _first_violation(inst, alloc):
    for i in range(inst.n):
        own = sum((inst.values[i][g] * alloc.bundles[i][g] for g in range(inst.m)), ZERO)
        for t in [h for h in range(inst.n) if h != i] + [CHARITY]:
            if best_subset_of(inst, alloc, i, t)[1] > own:
                return i, t
    return None


def _row_slack(row, point):
    return sum((c * x for c, x in zip(row.coeffs, point)), ZERO) - row.rhs


def fef_in_optimal_face(inst: Instance, w, node_cap: int = 400, stats: dict | None = None):
    """An FEF allocation among all maximizers of ``sum_i w_i v_i(x_i)``, or ``None``.

    Branches lazily on the dual multiplier of each violated (agent, target) pair;
    exhaustive unless ``node_cap`` LP solves are used up.
    """
    k = inst.n * inst.m
    opt = lp.solve(welfare_program(inst, w))
    base = allocation_rows(inst)
    base.append(lp.Constraint(welfare_objective(inst, w), lp.GE, opt.value))
    bounds = [(0, 1)] * k
    budget = [node_cap]

    def search(rows, fixed):
        if budget[0] <= 0:
            return None
        budget[0] -= 1
        sol = lp.solve_feasibility(rows, bounds)
        if not sol.optimal:
            return None
        x = allocation_from_point(inst, sol.point)
        bad = _first_violation(inst, x)
        if bad is None:
            return x
        if bad in fixed:
            raise ContractViolation("dual no-envy row failed to prevent envy")
        i, t = bad
        options = [(_row_slack(_no_envy_row(inst, i, t, lam), sol.point), lam)
                   for lam in _dual_candidates(inst, i)]
        for _, lam in sorted(options):
            found = search(rows + [_no_envy_row(inst, i, t, lam)], fixed | {bad})
            if found is not None:
                return found
        return None

    found = search(base, frozenset())
    if stats is not None:
        stats["lp_solves"] = stats.get("lp_solves", 0) + node_cap - budget[0]
    return found


# -- exact parametric sweep of weighted welfare along a weight segment ---------------

def _solve_values(inst, w):
    x = max_weighted_welfare(inst, w)
    return x.values(inst)


def welfare_breakpoints(inst: Instance, wa, wb) -> list:
    """Exact parameters ``t`` in ``[0, 1]`` where the welfare-optimal vertex changes along
    ``w(t) = (1 - t) wa + t wb`` (optimal value is piecewise linear and convex in t)."""
    wa = [Fraction(x) for x in wa]
    d = [Fraction(b) - a for a, b in zip(wa, wb)]
    out = set()

    def line(u):
        return sum((a * x for a, x in zip(wa, u)), ZERO), sum((c * x for c, x in zip(d, u)), ZERO)

    def refine(ta, ua, tb, ub, depth=0):
        (a0, a1), (b0, b1) = line(ua), line(ub)
        if a1 == b1:
            return
        t = (b0 - a0) / (a1 - b1)
        if not ta <= t <= tb:
            return
        wt = [a + t * c for a, c in zip(wa, d)]
        us = _solve_values(inst, wt)
        s0, s1 = line(us)
        if s0 + s1 * t == a0 + a1 * t or depth > 200:
            out.add(t)
            return
        refine(ta, ua, t, us, depth + 1)
        refine(t, us, tb, ub, depth + 1)

    refine(Fraction(0), _solve_values(inst, wa), Fraction(1), _solve_values(inst, wb))
    return sorted(out)


# -- the search ----------------------------------------------------------------------

@dataclass
class IterationRecord:
    iteration: int
    kind: str            # "iterate", "face", "sweep" or "explore"
    weights: tuple
    allocation: Allocation
    envy: list
    edges: list
    max_envy: Fraction

    def to_dict(self) -> dict:
        return {"iteration": self.iteration, "kind": self.kind,
                "weights": [fmt(x) for x in self.weights],
                "allocation": allocation_to_dict(self.allocation)["bundles"],
                "envy_matrix": [[fmt(v) for v in row] for row in self.envy],
                "edges": [list(e) for e in self.edges],
                "max_envy": fmt(self.max_envy)}


@dataclass
class SearchTrace:
    records: list = field(default_factory=list)
    status: str = ITERATION_CAP
    iterations: int = 0
    gamma: GammaParams | None = None

    def to_jsonl(self) -> str:
        lines = [json.dumps(r.to_dict()) for r in self.records]
        lines.append(json.dumps({"status": self.status, "iterations": self.iterations,
                                 "gamma": None if self.gamma is None else self.gamma.to_dict()}))
        return "\n".join(lines) + "\n"


def _certify(inst, x):
    return bool(is_fef(inst, x)) and bool(is_pareto_optimal(inst, x))


def _simplex_corners(n, eps):
    corners = []
    for i in range(n):
        w = [eps] * n
        w[i] = 1 - (n - 1) * eps
        corners.append(tuple(w))
    return corners


def _tie_line(u_a, u_b, n, eps):
    """End points, inside the floored simplex, of ``{w : w.(u_a - u_b) = 0}`` (n = 3 only)."""
    diff = [a - b for a, b in zip(u_a, u_b)]
    if n != 3 or not any(diff):
        return None
    pts = set()
    corners = _simplex_corners(3, eps)
    for p, q in combinations(corners, 2):
        fp = sum((c * x for c, x in zip(diff, p)), ZERO)
        fq = sum((c * x for c, x in zip(diff, q)), ZERO)
        if fp == fq:
            if fp == 0:
                pts.update([p, q])
            continue
        s = fp / (fp - fq)
        if 0 <= s <= 1:
            pts.add(tuple(a + s * (b - a) for a, b in zip(p, q)))
    if len(pts) < 2:
        return None
    pts = sorted(pts)
    return pts[0], pts[-1]


class _Searcher:
    def __init__(self, inst, params, node_cap, face_search):
        self.inst = inst
        self.params = params
        self.node_cap = node_cap
        self.face_search = face_search
        self.trace = SearchTrace(gamma=params)
        self.best = None
        self.faces_seen = set()
        self.lines_seen = set()

    def record(self, it, kind, w, x):
        V = envy_matrix_p2(self.inst, x)
        g = envy_graph(self.inst, x)
        worst = max_envy(self.inst, x)
        self.trace.records.append(IterationRecord(it, kind, tuple(w), x, V, sorted(g.edges), worst))
        if self.best is None or worst < self.best[0]:
            self.best = (worst, x)
        return g, worst

    def try_face(self, it, kind, w):
        key = tuple(w)
        if key in self.faces_seen or not self.face_search:
            return None
        self.faces_seen.add(key)
        x = fef_in_optimal_face(self.inst, w, self.node_cap)
        if x is None:
            return None
        self.record(it, kind, w, x)
        return x if _certify(self.inst, x) else None

    def sweep(self, it, wa, wb):
        """Search optimal faces at every breakpoint along the segment; return (found, tie pairs)."""
        d = [b - a for a, b in zip(wa, wb)]
        ties = []
        for t in welfare_breakpoints(self.inst, wa, wb):
            wt = tuple(a + t * c for a, c in zip(wa, d))
            found = self.try_face(it, "sweep", wt)
            if found is not None:
                return found, ties
            ties.append(wt)
        return None, ties

    def explore(self, it, start_ties):
        """Trace weight lines on which two optimal value vectors tie (three agents)."""
        inst, eps = self.inst, self.params.eps_floor
        corners = _simplex_corners(inst.n, eps)
        ties = list(start_ties)
        for a, b in combinations(corners, 2):
            found, more = self.sweep(it, a, b)
            if found is not None:
                return found
            ties.extend(more)
        if inst.n != 3:
            return None
        queue = list(ties)
        while queue:
            wt = queue.pop(0)
            for u_a, u_b in self._tied_value_pairs(wt):
                seg = _tie_line(u_a, u_b, 3, eps)
                if seg is None or seg in self.lines_seen:
                    continue
                self.lines_seen.add(seg)
                found, more = self.sweep(it, *seg)
                if found is not None:
                    return found
                queue.extend(more)
        return None

    def _tied_value_pairs(self, w):
        """Value vectors optimal at ``w``, probed by nudging the weights toward each corner."""
        inst = self.inst
        vals = set()
        nudge = Fraction(1, 10 ** 6)
        for i in range(inst.n):
            wn = [x * (1 - nudge) for x in w]
            wn[i] += nudge
            vals.add(tuple(_solve_values(inst, wn)))
            wn = [x * (1 + nudge) for x in w]
            wn[i] -= nudge * (1 + sum(w) - w[i])
            if all(x > 0 for x in wn):
                vals.add(tuple(_solve_values(inst, wn)))
        opt = sum((a * b for a, b in zip(w, _solve_values(inst, w))), ZERO)
        vals = [u for u in vals if sum((a * b for a, b in zip(w, u)), ZERO) == opt]
        return list(combinations(sorted(vals), 2))


def find_fef_po(inst: Instance, max_iters: int = 200, *, node_cap: int = 400,
                face_search: bool = True, p3_method: str = "levels",
                all_pairs: bool = False):
    """Search for an FEF and Pareto-optimal allocation.

    Returns ``(allocation, trace)``. ``trace.status`` is ``"certified"`` when the
    allocation passed both exact checks; otherwise ``"iteration-cap"`` and the
    allocation with the least maximum envy seen is returned.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    params = compute_gamma(inst, all_pairs)
    s = _Searcher(inst, params, node_cap, face_search)
    n = inst.n
    w = tuple([Fraction(1, n)] * n)
    visited = set()
    explored = False
    for it in range(max_iters):
        s.trace.iterations = it + 1
        x = max_weighted_welfare(inst, w)
        graph, worst = s.record(it, "iterate", w, x)
        if worst == 0 and _certify(inst, x):
            s.trace.status = CERTIFIED
            return x, s.trace
        found = s.try_face(it, "face", w)
        if found is not None:
            s.trace.status = CERTIFIED
            return found, s.trace
        visited.add(w)
        w_next = adjust_weights_p3(graph, params.gamma, params.eps_floor, p3_method)
        found, ties = s.sweep(it, w, w_next) if face_search else (None, [])
        if found is not None:
            s.trace.status = CERTIFIED
            return found, s.trace
        if w_next in visited:
            if explored or not face_search:
                break
            explored = True
            found = s.explore(it, ties)
            if found is not None:
                s.trace.status = CERTIFIED
                return found, s.trace
            break
        w = w_next
    return s.best[1], s.trace
