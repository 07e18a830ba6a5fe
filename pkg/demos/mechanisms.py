"""
Truthful mechanisms and what they give up
=========================================

Split-half gives each of two agents her best feasible part of half of every good:
FEF and truthful, but not Pareto-optimal in general. The serial mechanism lets
agents maximize in turn, locking earlier values: PO and truthful, but not FEF.
"""

from gapfair.efficiency import is_pareto_optimal
from gapfair.fairness import is_fef
from gapfair.instances import nonconvex_instance
from gapfair.mechanisms import (audit_truthfulness, lattice_reports, serial_po_mechanism,
                                split_half_mechanism)
from gapfair.model import format_bundle

inst = nonconvex_instance()

x = split_half_mechanism(inst)
print("split-half:", x, "values", format_bundle(x.values(inst)))
print("  FEF:", is_fef(inst, x).holds, " PO:", is_pareto_optimal(inst, x).holds)

for order in ([0, 1], [1, 0]):
    y = serial_po_mechanism(inst, order=order)
    print(f"serial, order {order}:", y)
    print("  FEF:", is_fef(inst, y).holds, " PO:", is_pareto_optimal(inst, y).holds)

# Every report vector with entries in {0, 1/6, ..., 1}, for each agent in turn.
grid = lattice_reports(inst.m, 6)
for name, mech in (("split-half", split_half_mechanism), ("serial", serial_po_mechanism)):
    audit = audit_truthfulness(mech, inst, grid)
    print(f"{name}: {len(audit.entries)} misreports tried, best gain {audit.max_gain}")
