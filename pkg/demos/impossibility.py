"""
No truthful mechanism is both FEF and PO
========================================

Two agents, two goods, no binding budgets. Agent 0 values the goods (alpha, 1-alpha)
and agent 1 (beta, 1-beta) with 1/2 < beta < alpha < 1. Every FEF and PO allocation
gives agent 0 a share of good 0 in [1/(2 alpha), 1/(2 beta)] and none of good 1.
Reporting a smaller alpha moves that band up.
"""

from fractions import Fraction

from gapfair.mechanisms import impossibility_demo
from gapfair.model import format_bundle

demo = impossibility_demo(Fraction(4, 5), Fraction(3, 5), grid_k=40)
lo, hi = demo.band
print(f"band for agent 0's share of good 0: [{lo}, {hi}]")
print(f"grid check at k=40: {demo.grid_check.po_points} PO points, "
      f"{demo.grid_check.fef_po_points} FEF and PO, all consistent: {demo.grid_check.holds}")

for rule in demo.rules:
    print(f"\n{rule.name} rule")
    print("  truthful:", format_bundle(rule.truthful.bundles[0]))
    print("  agent 0 reports", format_bundle(rule.deviation), "->", format_bundle(rule.deviated.bundles[0]))
    print("  true-value gain:", rule.gain)
    w = rule.audit.witness
    print(f"  best misreport in the audit grid: {format_bundle(w.report)} gains {w.gain}")
