"""
Searching for an allocation that is both FEF and Pareto-optimal
===============================================================

Weighted-welfare maximizers are Pareto-optimal. When agent i envies agent h, giving
h a much smaller weight than i removes that envy. The gamma parameter says how
much smaller is enough.
"""

import random
from fractions import Fraction

from gapfair.efficiency import is_pareto_optimal, max_weighted_welfare
from gapfair.fairness import envy_graph, is_fef
from gapfair.fixedpoint import adjust_weights_p3, compute_gamma, find_fef_po
from gapfair.instances import nonconvex_instance, random_instance

inst = nonconvex_instance()
params = compute_gamma(inst)
print("gamma parameters:", params.to_dict())

# Naively alternating welfare maximization and weight updates goes around in circles here.
w = (Fraction(1, 2), Fraction(1, 2))
for step in range(4):
    x = max_weighted_welfare(inst, w)
    g = envy_graph(inst, x)
    print(f"w = {tuple(map(str, w))}: x = {x}, envy edges {sorted(g.edges)}")
    w = adjust_weights_p3(g, params.gamma, params.eps_floor)

# The search also looks inside optimal faces and at every weight where the optimum
# changes, which is where FEF allocations hide.
x, trace = find_fef_po(inst)
print("\nsearch status:", trace.status, "after", trace.iterations, "iteration(s)")
print("allocation:", x, " FEF:", is_fef(inst, x).holds, " PO:", is_pareto_optimal(inst, x).holds)
print("trace (JSON lines):")
print(trace.to_jsonl())

rng = random.Random(0)
statuses = [find_fef_po(random_instance(rng, rng.randint(1, 3), rng.randint(1, 4)))[1].status
            for _ in range(20)]
print(f"random instances certified: {statuses.count('certified')}/20")
