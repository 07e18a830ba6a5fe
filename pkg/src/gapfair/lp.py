"""Exact rational linear programming.

A bounded-variable primal simplex over :class:`fractions.Fraction` with Bland's
rule for both the entering and the leaving choice, so runs are cycle-free and
bit-for-bit reproducible. Every variable must carry finite bounds.

Equality rows, and inequality rows whose right-hand side is negative after the
bounds shift, get an artificial variable; phase 1 drives those to zero. After
phase 1 the artificial variables are pinned to ``[0, 0]`` rather than pivoted
out explicitly, which keeps redundant equality rows harmless.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ContractViolation

LE, EQ, GE = "<=", "=", ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    relation: str
    rhs: Fraction

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        rhs = Fraction(self.rhs)
        relation = self.relation
        if relation == GE:
            coeffs = tuple(-c for c in coeffs)
            rhs = -rhs
            relation = LE
        if relation not in (LE, EQ):
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "relation", relation)
        object.__setattr__(self, "rhs", rhs)

    def holds(self, point: Sequence[Fraction]) -> bool:
        lhs = sum((c * x for c, x in zip(self.coeffs, point)), _ZERO)
        return lhs == self.rhs if self.relation == EQ else lhs <= self.rhs


@dataclass(frozen=True)
class LinearProgram:
    """Maximize ``objective . x`` subject to ``rows`` and ``lo <= x <= hi``."""

    objective: tuple
    rows: tuple = ()
    bounds: tuple = field(default=None)

    def __post_init__(self):
        objective = tuple(Fraction(c) for c in self.objective)
        k = len(objective)
        rows = tuple(r if isinstance(r, Constraint) else Constraint(*r) for r in self.rows)
        bounds = self.bounds
        if bounds is None:
            bounds = ((0, 1),) * k
        bounds = tuple((Fraction(lo), Fraction(hi)) for lo, hi in bounds)
        if len(bounds) != k:
            raise ValueError(f"{len(bounds)} bounds for {k} variables")
        for r in rows:
            if len(r.coeffs) != k:
                raise ValueError(f"row of width {len(r.coeffs)} for {k} variables")
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "bounds", bounds)

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def is_feasible_point(self, point) -> bool:
        if any(not lo <= x <= hi for x, (lo, hi) in zip(point, self.bounds)):
            return False
        return all(r.holds(point) for r in self.rows)


@dataclass(frozen=True)
class LpSolution:
    status: str
    point: tuple = ()
    value: Fraction | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Dense tableau ``B^-1 A`` with explicit basic values and bound status."""

    def __init__(self, rows, rhs, upper, basis):
        self.T = rows           # list of lists
        self.val = rhs          # value of the basic variable of each row
        self.upper = upper      # per column: Fraction or None (no upper bound)
        self.basis = basis      # column index basic in each row
        self.ncols = len(upper)
        self.at_upper = [False] * self.ncols
        self.where = {j: r for r, j in enumerate(basis)}
        self.blocked = set()

    def reduced_costs(self, cost):
        d = list(cost)
        for r, j in enumerate(self.basis):
            cb = cost[j]
            if cb:
                row = self.T[r]
                for c in range(self.ncols):
                    if row[c]:
                        d[c] -= cb * row[c]
        return d

    def maximize(self, cost, max_pivots):
        d = self.reduced_costs(cost)
        for _ in range(max_pivots):
            enter, direction = None, 0
            for j in range(self.ncols):
                if j in self.where or j in self.blocked:
                    continue
                up = self.upper[j]
                if not self.at_upper[j] and d[j] > 0 and (up is None or up > 0):
                    enter, direction = j, 1
                    break
                if self.at_upper[j] and d[j] < 0:
                    enter, direction = j, -1
                    break
            if enter is None:
                return
            self._step(enter, direction, d)
        raise ContractViolation("simplex exceeded its pivot budget")

    def _step(self, j, direction, d):
        # ratio test; ties broken by smallest variable index (Bland)
        best = None
        up_j = self.upper[j]
        if up_j is not None:
            best = (up_j, j, None, None)
        for r, row in enumerate(self.T):
            a = row[j] * direction
            if a > 0:
                t, to_upper = self.val[r] / a, False
            elif a < 0:
                ub = self.upper[self.basis[r]]
                if ub is None:
                    continue
                t, to_upper = (ub - self.val[r]) / -a, True
            else:
                continue
            cand = (t, self.basis[r], r, to_upper)
            if best is None or cand[:2] < best[:2]:
                best = cand
        if best is None:
            raise ContractViolation("linear program is unbounded despite finite bounds")
        t, _, r, to_upper = best
        if t:
            step = t * direction
            for rr, row in enumerate(self.T):
                if row[j]:
                    self.val[rr] -= step * row[j]
        if r is None:
            self.at_upper[j] = not self.at_upper[j]
            return
        entering_value = (up_j if self.at_upper[j] else _ZERO) + t * direction
        leaving = self.basis[r]
        self._pivot(r, j, d)
        self.val[r] = entering_value
        self.at_upper[j] = False
        self.at_upper[leaving] = to_upper
        del self.where[leaving]
        self.where[j] = r
        self.basis[r] = j

    def _pivot(self, r, j, d):
        prow = self.T[r]
        piv = prow[j]
        if piv != 1:
            inv = 1 / piv
            prow = [x * inv if x else x for x in prow]
            self.T[r] = prow
        nz = [c for c in range(self.ncols) if prow[c]]
        for rr, row in enumerate(self.T):
            if rr != r:
                f = row[j]
                if f:
                    for c in nz:
                        row[c] -= f * prow[c]
        f = d[j]
        if f:
            for c in nz:
                d[c] -= f * prow[c]

    def column_values(self):
        x = [self.upper[j] if self.at_upper[j] else _ZERO for j in range(self.ncols)]
        for r, j in enumerate(self.basis):
            x[j] = self.val[r]
        return x


def solve(lp: LinearProgram) -> LpSolution:
    """Maximize ``lp``; returns an exactly feasible optimal vertex or ``infeasible``."""
    k = lp.num_vars
    lo = [b[0] for b in lp.bounds]
    span = [b[1] - b[0] for b in lp.bounds]
    if any(s < 0 for s in span):
        return LpSolution(INFEASIBLE)

    nrows = len(lp.rows)
    n_slack = sum(1 for r in lp.rows if r.relation == LE)
    rows, rhs, basis, upper = [], [], [], list(span)
    upper.extend([None] * n_slack)
    artificial = []
    slack_col = k
    width = k + n_slack
    pending = []  # rows that need an artificial column
    for row in lp.rows:
        coeffs = list(row.coeffs)
        b = row.rhs - sum((c * l for c, l in zip(coeffs, lo)), _ZERO)
        ext = coeffs + [_ZERO] * n_slack
        if row.relation == LE:
            ext[slack_col] = Fraction(1)
            s = slack_col
            slack_col += 1
            if b >= 0:
                rows.append(ext)
                rhs.append(b)
                basis.append(s)
                continue
        if b < 0:
            ext = [-c for c in ext]
            b = -b
        pending.append(len(rows))
        rows.append(ext)
        rhs.append(b)
        basis.append(None)
    for r in pending:
        col = width + len(artificial)
        artificial.append(col)
        basis[r] = col
    total = width + len(artificial)
    for r, row in enumerate(rows):
        row.extend([_ZERO] * len(artificial))
        if basis[r] >= width:
            row[basis[r]] = Fraction(1)
    upper.extend([None] * len(artificial))

    tab = _Tableau(rows, rhs, upper, basis)
    budget = 50 * (total + nrows + 10) ** 2
    if artificial:
        cost1 = [_ZERO] * width + [Fraction(-1)] * len(artificial)
        tab.maximize(cost1, budget)
        if any(tab.val[r] > 0 for r, j in enumerate(tab.basis) if j >= width):
            return LpSolution(INFEASIBLE)
        for col in artificial:
            tab.upper[col] = _ZERO
            tab.blocked.add(col)
    cost = list(lp.objective) + [_ZERO] * (total - k)
    tab.maximize(cost, budget)

    cols = tab.column_values()
    point = tuple(lo[j] + cols[j] for j in range(k))
    value = sum((c * x for c, x in zip(lp.objective, point)), _ZERO)
    if not lp.is_feasible_point(point):
        raise ContractViolation("simplex returned a point that violates the program")
    return LpSolution(OPTIMAL, point, value)


def solve_feasibility(rows, bounds) -> LpSolution:
    """Any exactly feasible point of ``rows`` within ``bounds`` (zero objective)."""
    bounds = tuple(bounds)
    return solve(LinearProgram(objective=(0,) * len(bounds), rows=tuple(rows), bounds=bounds))
