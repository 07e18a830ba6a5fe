"""Core domain types: instances, bundles and allocations over exact rationals.

Every quantity in the core is a :class:`fractions.Fraction`. Agents and goods are
indexed from 0. A bundle is a tuple of ``m`` fractions in ``[0, 1]``; an
allocation holds one bundle per agent and the charity receives whatever is left.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import AllocationError, InstanceError

Bundle = tuple  # tuple[Fraction, ...] of length m

ZERO = Fraction(0)
ONE = Fraction(1)


def to_fraction(value, path="value") -> Fraction:
    """Convert an int, a decimal string or a ``"p/q"`` string to an exact Fraction.

    >>> to_fraction("0.625")
    Fraction(5, 8)
    >>> to_fraction("3/6")
    Fraction(1, 2)
    """
    if isinstance(value, bool):
        raise InstanceError("booleans are not numbers", path)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InstanceError(f"non-finite number {value!r}", path)
        # repr gives the shortest decimal that round-trips, so 0.1 -> 1/10
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InstanceError(f"cannot parse number {value!r}", path) from None
    raise InstanceError(f"unsupported number type {type(value).__name__}", path)


def fmt(q: Fraction) -> str:
    """Serialize a rational as ``"p/q"`` (always with a denominator)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def zero_bundle(m: int) -> Bundle:
    return (ZERO,) * m


@dataclass(frozen=True)
class Instance:
    """``n`` agents, ``m`` divisible goods, agent-specific values and sizes, budgets."""

    values: tuple
    sizes: tuple
    budgets: tuple

    def __post_init__(self):
        values = tuple(tuple(to_fraction(v, f"values[{i}][{g}]") for g, v in enumerate(row))
                       for i, row in enumerate(self.values))
        sizes = tuple(tuple(to_fraction(s, f"sizes[{i}][{g}]") for g, s in enumerate(row))
                      for i, row in enumerate(self.sizes))
        budgets = tuple(to_fraction(b, f"budgets[{i}]") for i, b in enumerate(self.budgets))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "budgets", budgets)

        n = len(budgets)
        if len(values) != n:
            raise InstanceError(f"expected {n} rows, got {len(values)}", "values")
        if len(sizes) != n:
            raise InstanceError(f"expected {n} rows, got {len(sizes)}", "sizes")
        m = len(values[0]) if n else 0
        for i in range(n):
            if len(values[i]) != m:
                raise InstanceError(f"expected {m} entries, got {len(values[i])}", f"values[{i}]")
            if len(sizes[i]) != m:
                raise InstanceError(f"expected {m} entries, got {len(sizes[i])}", f"sizes[{i}]")
            for g in range(m):
                if values[i][g] < 0:
                    raise InstanceError("negative value", f"values[{i}][{g}]")
                if sizes[i][g] <= 0:
                    raise InstanceError("non-positive size", f"sizes[{i}][{g}]")
            if budgets[i] < 0:
                raise InstanceError("negative budget", f"budgets[{i}]")
        object.__setattr__(self, "_m", m)

    @property
    def n(self) -> int:
        return len(self.budgets)

    @property
    def m(self) -> int:
        return self._m

    def density(self, i: int, g: int) -> Fraction:
        return self.values[i][g] / self.sizes[i][g]

    def with_values(self, values) -> "Instance":
        """Same sizes and budgets, different value matrix (used for reports)."""
        return Instance(values=values, sizes=self.sizes, budgets=self.budgets)


def bundle_value(inst: Instance, i: int, b: Sequence[Fraction]) -> Fraction:
    row = inst.values[i]
    return sum((row[g] * b[g] for g in range(inst.m)), ZERO)


def bundle_size(inst: Instance, i: int, b: Sequence[Fraction]) -> Fraction:
    row = inst.sizes[i]
    return sum((row[g] * b[g] for g in range(inst.m)), ZERO)


def is_feasible(inst: Instance, i: int, b: Sequence[Fraction]) -> bool:
    return bundle_size(inst, i, b) <= inst.budgets[i]


@dataclass(frozen=True)
class Allocation:
    """Fractional assignment: ``bundles[i][g]`` is agent i's share of good g."""

    bundles: tuple

    def __post_init__(self):
        bundles = tuple(tuple(to_fraction(x, f"bundles[{i}][{g}]") for g, x in enumerate(b))
                        for i, b in enumerate(self.bundles))
        object.__setattr__(self, "bundles", bundles)
        if bundles:
            m = len(bundles[0])
            for i, b in enumerate(bundles):
                if len(b) != m:
                    raise AllocationError(f"bundle {i} has {len(b)} entries, expected {m}")
                for g, x in enumerate(b):
                    if not 0 <= x <= 1:
                        raise AllocationError(f"fraction {x} of good {g} for agent {i} outside [0, 1]")
            for g in range(m):
                total = sum(b[g] for b in bundles)
                if total > 1:
                    raise AllocationError(f"good {g} over-allocated: total share {total}")

    @property
    def n(self) -> int:
        return len(self.bundles)

    @property
    def m(self) -> int:
        return len(self.bundles[0]) if self.bundles else 0

    @property
    def charity(self) -> Bundle:
        return charity_bundle(self)

    def values(self, inst: Instance) -> tuple:
        return tuple(bundle_value(inst, i, b) for i, b in enumerate(self.bundles))

    def infeasible_agents(self, inst: Instance) -> list:
        return [i for i, b in enumerate(self.bundles) if not is_feasible(inst, i, b)]

    @classmethod
    def empty(cls, n: int, m: int) -> "Allocation":
        return cls(tuple(zero_bundle(m) for _ in range(n)))

    def __str__(self):
        return "[" + ", ".join(format_bundle(b) for b in self.bundles) + "]"


def format_bundle(b) -> str:
    """``(1/2, 1/4)``-style rendering of a bundle."""
    return "(" + ", ".join(str(Fraction(x)) for x in b) + ")"


def charity_bundle(alloc: Allocation) -> Bundle:
    """Unassigned fractions ``1 - sum_i x[i][g]``."""
    charity = []
    for g in range(alloc.m):
        rest = ONE - sum(b[g] for b in alloc.bundles)
        if rest < 0:
            raise AllocationError(f"good {g} over-allocated")
        charity.append(rest)
    return tuple(charity)


def check_compatible(inst: Instance, alloc: Allocation, require_feasible=True):
    if alloc.n != inst.n or (alloc.n and alloc.m != inst.m):
        raise AllocationError(
            f"allocation shape {alloc.n}x{alloc.m} does not match instance {inst.n}x{inst.m}")
    if require_feasible:
        bad = alloc.infeasible_agents(inst)
        if bad:
            raise AllocationError(f"allocation violates the budget of agent(s) {bad}")


@dataclass(frozen=True)
class DiscreteAllocation:
    """Piece-level allocation: each good g is cut into ``pieces[g]`` identical pieces.

    ``counts[i][g]`` is how many pieces of g agent i holds; the charity holds the rest.
    """

    counts: tuple
    pieces: tuple

    def __post_init__(self):
        counts = tuple(tuple(int(c) for c in row) for row in self.counts)
        pieces = tuple(int(k) for k in self.pieces)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "pieces", pieces)
        for g, k in enumerate(pieces):
            if k < 1:
                raise AllocationError(f"good {g} must have at least one piece")
            held = 0
            for i, row in enumerate(counts):
                if row[g] < 0:
                    raise AllocationError(f"negative piece count for agent {i}, good {g}")
                held += row[g]
            if held > k:
                raise AllocationError(f"good {g}: {held} pieces assigned but only {k} exist")

    @property
    def charity(self) -> tuple:
        return tuple(k - sum(row[g] for row in self.counts) for g, k in enumerate(self.pieces))

    def to_allocation(self) -> Allocation:
        return Allocation(tuple(tuple(Fraction(c, self.pieces[g]) for g, c in enumerate(row))
                                for row in self.counts))


# -- JSON ---------------------------------------------------------------------

def _load(text, what):
    if isinstance(text, (dict, list)):
        return text
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}", what) from None


def parse_instance(text) -> Instance:
    """Parse the JSON instance schema ``{"n", "m", "values", "sizes", "budgets"}``."""
    doc = _load(text, "instance")
    if not isinstance(doc, dict):
        raise InstanceError("expected a JSON object", "instance")
    for key in ("n", "m", "values", "sizes", "budgets"):
        if key not in doc:
            raise InstanceError("missing field", key)
    n, m = doc["n"], doc["m"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise InstanceError("must be a non-negative integer", "n")
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise InstanceError("must be a non-negative integer", "m")
    for key in ("values", "sizes"):
        rows = doc[key]
        if not isinstance(rows, list) or len(rows) != n:
            raise InstanceError(f"expected a list of {n} rows", key)
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != m:
                raise InstanceError(f"expected a list of {m} entries", f"{key}[{i}]")
    if not isinstance(doc["budgets"], list) or len(doc["budgets"]) != n:
        raise InstanceError(f"expected a list of {n} entries", "budgets")
    inst = Instance(values=doc["values"], sizes=doc["sizes"], budgets=doc["budgets"])
    if n == 0:
        object.__setattr__(inst, "_m", m)
    return inst


def instance_to_dict(inst: Instance) -> dict:
    return {
        "n": inst.n,
        "m": inst.m,
        "values": [[fmt(v) for v in row] for row in inst.values],
        "sizes": [[fmt(s) for s in row] for row in inst.sizes],
        "budgets": [fmt(b) for b in inst.budgets],
    }


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst))


def parse_allocation(text, inst: Instance | None = None) -> Allocation:
    doc = _load(text, "allocation")
    if not isinstance(doc, dict) or not isinstance(doc.get("bundles"), list):
        raise InstanceError("expected an object with a 'bundles' list", "allocation")
    rows = doc["bundles"]
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise InstanceError("expected a list", f"bundles[{i}]")
    alloc = Allocation(tuple(tuple(to_fraction(x, f"bundles[{i}][{g}]") for g, x in enumerate(row))
                             for i, row in enumerate(rows)))
    if inst is not None:
        check_compatible(inst, alloc, require_feasible=False)
    return alloc


def allocation_to_dict(alloc: Allocation) -> dict:
    return {"bundles": [[fmt(x) for x in b] for b in alloc.bundles]}


def serialize_allocation(alloc: Allocation) -> str:
    return json.dumps(allocation_to_dict(alloc))


def parse_discrete_allocation(text) -> DiscreteAllocation:
    """Parse ``{"counts": [[...], ...], "pieces": [...]}``."""
    doc = _load(text, "allocation")
    if not isinstance(doc, dict) or not isinstance(doc.get("counts"), list) \
            or not isinstance(doc.get("pieces"), list):
        raise InstanceError("expected an object with 'counts' and 'pieces' lists", "allocation")
    for key, rows in (("pieces", [doc["pieces"]]), ("counts", doc["counts"])):
        for row in rows:
            if not isinstance(row, list) or any(isinstance(c, bool) or not isinstance(c, int) for c in row):
                raise InstanceError("expected lists of integers", key)
    return DiscreteAllocation(tuple(tuple(r) for r in doc["counts"]), tuple(doc["pieces"]))


def discrete_allocation_to_dict(dalloc: DiscreteAllocation) -> dict:
    return {"counts": [list(r) for r in dalloc.counts], "pieces": list(dalloc.pieces)}
