from fractions import Fraction as F

import pytest

from gapfair.efficiency import is_pareto_optimal
from gapfair.errors import CapExceeded
from gapfair.fairness import is_fef
from gapfair.instances import nonconvex_allocations, two_good_instance
from gapfair.knapsack import max_feasible_subset
from gapfair.model import Allocation, Instance, is_feasible
from gapfair.oracle import (enumerate_feasible, enumerate_fef_set, grid_size, midpoint,
                            nonconvexity_scan, pareto_frontier, point_cloud_csv, point_cloud_json)
from oracles import fef_by_definition, grid_dominated


def test_fef_set_contains_x_and_y(nc, nc_allocs):
    fef = enumerate_fef_set(nc, 4)
    assert nc_allocs["x"] in fef and nc_allocs["y"] in fef
    assert all(fef_by_definition(nc, x) for x in fef)


def test_all_zero_values():
    inst = Instance(values=[[0, 0], [0, 0]], sizes=[[1, 1], [1, 1]], budgets=[1, 1])
    grid = enumerate_feasible(inst, 2)
    assert enumerate_fef_set(inst, 2) == grid
    assert pareto_frontier(inst, 2) == grid


def test_single_agent_fef_set():
    inst = Instance(values=[[1]], sizes=[[2]], budgets=[1])
    fef = enumerate_fef_set(inst, 4)
    # the agent must hold a best feasible part of what she does not already hold
    for x in enumerate_feasible(inst, 4):
        best = max_feasible_subset(inst, 0, x.charity)[1]
        assert (x in fef) == (best <= x.values(inst)[0])
    assert fef == [Allocation(((F(1, 2),),))]


def test_feasible_grid_is_complete():
    inst = Instance(values=[[1, 1]], sizes=[[1, 2]], budgets=[F(3, 2)])
    got = enumerate_feasible(inst, 2)
    expected = [Allocation(((F(a, 2), F(b, 2)),)) for a in range(3) for b in range(3)
                if is_feasible(inst, 0, (F(a, 2), F(b, 2)))]
    assert got == expected


def test_nonconvexity_scan(nc, nc_allocs):
    triples = nonconvexity_scan(nc, 4)
    hit = [t for t in triples if t[2] == nc_allocs["z"]]
    assert hit and is_fef(nc, hit[0][2]).witness.envy == F(1, 8)
    assert nonconvexity_scan(nc, 1) == []


def test_nonconvexity_single_agent_empty():
    inst = Instance(values=[[1, 2]], sizes=[[1, 3]], budgets=[1])
    assert nonconvexity_scan(inst, 4) == []


def test_pareto_frontier(nc):
    front = pareto_frontier(nc, 4)
    assert Allocation(((F(1, 2), F(1, 2)), (F(1, 2), F(1, 4)))) in front
    grid = enumerate_feasible(nc, 4)
    for x in grid:
        if grid_dominated(nc, x, grid):
            assert x not in front
    for x in front:
        assert not grid_dominated(nc, x, grid)


def test_caps(nc):
    assert grid_size(nc, 40) == 41 ** 4
    with pytest.raises(CapExceeded, match="reduce k"):
        pareto_frontier(nc, 60)
    with pytest.raises(ValueError):
        enumerate_feasible(nc, 0)


def test_threads_do_not_change_results(nc):
    assert enumerate_fef_set(nc, 4, threads=3) == enumerate_fef_set(nc, 4)


def test_point_clouds(nc):
    clouds = {"fef": enumerate_fef_set(nc, 2), "po": pareto_frontier(nc, 2)}
    csv_text = point_cloud_csv(nc, clouds)
    assert csv_text.splitlines()[0] == "label,v0,v1"
    doc = __import__("json").loads(point_cloud_json(nc, clouds))
    assert set(doc) == {"fef", "po"} and all(len(v) == 2 for v in doc["fef"])


def test_midpoint(nc_allocs):
    assert midpoint(nc_allocs["x"], nc_allocs["y"]) == nc_allocs["z"]


def test_band_structure_small_grid():
    inst = two_good_instance(F(4, 5), F(3, 5))
    for x in pareto_frontier(inst, 8):
        x11, x12 = x.bundles[0]
        assert x11 == 1 or x12 == 0
        if is_fef(inst, x):
            assert x12 == 0 and F(5, 8) <= x11 <= F(5, 6)
