import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import allocations, instances
from gapfair.efficiency import dominates, is_pareto_optimal, max_weighted_welfare, welfare
from gapfair.instances import random_instance, random_weights
from gapfair.knapsack import max_feasible_subset
from gapfair.model import Allocation, Instance
from gapfair.oracle import enumerate_feasible
from oracles import grid_dominated


def test_x_is_dominated(nc, nc_allocs):
    v = is_pareto_optimal(nc, nc_allocs["x"])
    assert not v and dominates(nc, v.dominator, nc_allocs["x"])
    v = is_pareto_optimal(nc, nc_allocs["x"], fast=False)
    assert not v and dominates(nc, v.dominator, nc_allocs["x"])


def test_split_half_output_is_po(nc):
    assert is_pareto_optimal(nc, Allocation(((F(1, 2), F(1, 2)), (F(1, 2), F(1, 4)))))


def test_single_agent_best_bundle_is_po():
    inst = Instance(values=[[3, 1, 2]], sizes=[[2, 1, 1]], budgets=[F(3, 2)])
    y, _ = max_feasible_subset(inst, 0, (1, 1, 1))
    assert is_pareto_optimal(inst, Allocation((y,)))


def test_welfare_maximizers(nc):
    x = max_weighted_welfare(nc, (F(1, 2), F(1, 2)))
    assert x == Allocation(((1, 0), (0, F(1, 2))))
    assert welfare(nc, x, (F(1, 2), F(1, 2))) == F(5, 4)
    assert max_weighted_welfare(nc, (F(15, 16), F(1, 16))) == Allocation(((1, 0), (0, F(1, 2))))


def test_nonpositive_weights_rejected(nc):
    with pytest.raises(ValueError):
        max_weighted_welfare(nc, (1, 0))


def test_welfare_optimum_is_po_with_acyclic_graph():
    from gapfair.fairness import envy_graph, is_acyclic
    rng = random.Random(3)
    for _ in range(60):
        inst = random_instance(rng, rng.randint(1, 3), rng.randint(1, 3), positive_values=False)
        x = max_weighted_welfare(inst, random_weights(rng, inst.n))
        assert is_pareto_optimal(inst, x)
        assert is_acyclic(envy_graph(inst, x)).acyclic


def test_scaling_weights_gives_identical_output(nc):
    rng = random.Random(5)
    for _ in range(20):
        w = random_weights(rng, 2)
        assert max_weighted_welfare(nc, w) == max_weighted_welfare(nc, [3 * x for x in w])


def test_po_agrees_with_grid_dominance_one_way():
    """A grid point dominated within the grid is never reported PO."""
    inst = Instance(values=[[1, F(1, 2)], [F(1, 3), 1]], sizes=[[1, 1], [1, 2]], budgets=[1, 1])
    grid = enumerate_feasible(inst, 4)
    for x in grid:
        if grid_dominated(inst, x, grid):
            assert not is_pareto_optimal(inst, x)


@given(st.data())
def test_dominator_revalidates(data):
    inst = data.draw(instances())
    alloc = data.draw(allocations(inst))
    for fast in (True, False):
        v = is_pareto_optimal(inst, alloc, fast=fast)
        if not v:
            assert dominates(inst, v.dominator, alloc)
    assert bool(is_pareto_optimal(inst, alloc)) == bool(is_pareto_optimal(inst, alloc, fast=False))
