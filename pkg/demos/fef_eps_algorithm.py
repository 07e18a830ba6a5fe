"""
Approximate FEF by swapping with the charity
============================================

Goods are cut into identical pieces worth at most eps each. Agents then trade
their whole bundle for a minimal charity set they envy until nobody envies the
charity. The result is FEFx on pieces and FEF-eps on the divisible goods.
"""

from fractions import Fraction

from gapfair.fairness import is_fef_eps, is_fefx, max_envy
from gapfair.fefalgo import FefxRun, compute_fefx, fef_convergence_study, split_into_pieces
from gapfair.instances import nonconvex_instance

inst = nonconvex_instance()

eps = Fraction(1, 2)
pieces = split_into_pieces(inst, eps)
print("pieces per good at eps = 1/2:", pieces.pieces)

run = FefxRun(None)
dalloc = compute_fefx(inst, pieces, record=run)
for agent, taken, total in run.swaps:
    print(f"  agent {agent} takes piece counts {taken}; total value now {total}")
print("final piece counts:", dalloc.counts, "charity:", dalloc.charity)
print("FEFx:", is_fefx(inst, dalloc).holds,
      " FEF-eps:", is_fef_eps(inst, dalloc.to_allocation(), eps).holds)

# Shrinking eps shrinks the envy bound. The allocations themselves need not settle down.
report = fef_convergence_study(inst, [1, Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)])
print("\n eps    max envy   distance to previous")
for step in report.steps:
    print(f" {str(step.eps):6} {str(step.max_envy):10} {step.distance}")
