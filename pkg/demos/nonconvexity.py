"""
The set of FEF allocations is not convex
========================================

Two agents share two goods. Agent 0 values them (2, 1) with sizes (1, 1); agent 1
values them (1, 1) with sizes (1, 2). Both budgets are 1.
"""

from gapfair.fairness import best_subset_of, is_fef
from gapfair.instances import nonconvex_allocations, nonconvex_instance
from gapfair.model import format_bundle
from gapfair.oracle import enumerate_fef_set, nonconvexity_scan, pareto_frontier, point_cloud_csv

inst = nonconvex_instance()
allocs = nonconvex_allocations()

# x gives agent 0 the second good and agent 1 half the first; y splits the first
# good evenly. Both are FEF.
for name in ("x", "y"):
    print(name, allocs[name], "FEF:", is_fef(inst, allocs[name]).holds)

# Their midpoint z is not: agent 1 can fit a quarter of good 0 and 3/8 of good 1
# from agent 0's bundle, worth 5/8 to her, more than the 1/2 she holds.
z = allocs["z"]
verdict = is_fef(inst, z)
y, worth = best_subset_of(inst, z, 1, 0)
print("z", z, "FEF:", verdict.holds)
print("  agent 1's best part of agent 0's bundle:", format_bundle(y), "worth", worth,
      "against own", z.values(inst)[1])

# The same counterexample falls out of a brute-force scan of the quarter grid.
triples = nonconvexity_scan(inst, 4)
print(f"\n{len(triples)} non-convex triples on the k=4 grid")
for a, b, mid in triples:
    print("  ", a, "+", b, "->", mid,
          "envy", is_fef(inst, mid).witness.envy)

# Value-space point clouds, for plotting elsewhere.
csv_text = point_cloud_csv(inst, {"fef": enumerate_fef_set(inst, 4), "po": pareto_frontier(inst, 4)})
print("\nfirst rows of the value-space point cloud:")
print("\n".join(csv_text.splitlines()[:5]))
