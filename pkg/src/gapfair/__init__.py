"""Fair division of divisible goods under generalized assignment (budget) constraints."""

from .efficiency import is_pareto_optimal, max_weighted_welfare
from .errors import AllocationError, CapExceeded, ContractViolation, InstanceError
from .fairness import envy_graph, envy_matrix, is_fef, is_fef_eps, is_fefx, max_envy
from .fefalgo import compute_fef_eps, compute_fefx, fef_convergence_study, split_into_pieces
from .fixedpoint import adjust_weights_p3, compute_gamma, find_fef_po
from .knapsack import max_feasible_discrete_subset, max_feasible_subset
from .mechanisms import (audit_truthfulness, impossibility_demo, serial_po_mechanism,
                         split_half_mechanism)
from .model import (Allocation, DiscreteAllocation, Instance, parse_allocation, parse_instance,
                    serialize_allocation, serialize_instance)
from .oracle import enumerate_fef_set, nonconvexity_scan, pareto_frontier

__version__ = "0.1.0"
