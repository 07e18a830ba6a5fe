from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import allocations, instances
from gapfair.errors import AllocationError
from gapfair.fairness import (CHARITY, EnvyGraph, envy_graph, envy_matrix, envy_value,
                              is_acyclic, is_fef, is_fef_eps, is_fefx, max_envy)
from gapfair.knapsack import max_feasible_subset
from gapfair.model import Allocation, DiscreteAllocation, Instance, bundle_size, bundle_value
from gapfair.oracle import enumerate_feasible
from oracles import fef_by_definition


def test_envy_values(nc, nc_allocs):
    assert envy_value(nc, nc_allocs["z"], 1, 0) == F(1, 8)
    assert envy_value(nc, nc_allocs["x"], 0, 1) == 0
    assert envy_value(nc, nc_allocs["z"], 0, 0) == 0


def test_x_and_y_are_fef(nc, nc_allocs):
    assert is_fef(nc, nc_allocs["x"])
    assert is_fef(nc, nc_allocs["y"])


def test_midpoint_is_not_fef(nc, nc_allocs):
    v = is_fef(nc, nc_allocs["z"])
    assert not v
    w = v.witness
    assert (w.agent, w.target, w.bundle, w.envy) == (1, 0, (F(1, 4), F(3, 8)), F(1, 8))
    assert v.to_dict()["witness"]["envy"] == "1/8"


def test_all_to_charity_is_not_fef(nc):
    v = is_fef(nc, Allocation.empty(2, 2))
    assert not v and v.witness.target == CHARITY
    assert envy_value(nc, Allocation.empty(2, 2), 0, CHARITY) == 2


def test_infeasible_allocation_rejected(nc):
    with pytest.raises(AllocationError):
        is_fef(nc, Allocation(((0, 0), (0, 1))))


def test_fef_eps_thresholds(nc, nc_allocs):
    assert is_fef_eps(nc, nc_allocs["z"], F(1, 8))
    assert not is_fef_eps(nc, nc_allocs["z"], F(1, 16))
    assert is_fef_eps(nc, nc_allocs["x"], 0)


def test_strict_charity_flag():
    inst = Instance(values=[[1]], sizes=[[1]], budgets=[F(1, 2)])
    alloc = Allocation(((F(3, 8),),))
    assert envy_value(inst, alloc, 0, CHARITY) == F(1, 8)
    assert is_fef_eps(inst, alloc, F(1, 8))
    assert not is_fef_eps(inst, alloc, F(1, 8), strict_charity=True)


def test_envy_matrix_of_x(nc, nc_allocs):
    V = envy_matrix(nc, nc_allocs["x"])
    assert V[0][1] == 1 and V[1][0] == F(1, 2)
    assert envy_matrix(nc, Allocation(((0, 0), (0, 0))))[0][:2] == [0, 0]


def test_envy_graph_of_midpoint(nc, nc_allocs):
    g = envy_graph(nc, nc_allocs["z"])
    assert g.edges == {(1, 0)}
    acyc = is_acyclic(g)
    assert acyc.acyclic and acyc.order == [1, 0]
    assert envy_graph(nc, nc_allocs["x"]).edges == frozenset()


def test_cycle_witness():
    acyc = is_acyclic(EnvyGraph(3, frozenset({(0, 1), (1, 0), (1, 2)})))
    assert not acyc.acyclic and sorted(acyc.cycle) == [0, 1]


def test_fefx_single_good():
    inst = Instance(values=[[1], [1]], sizes=[[1], [1]], budgets=[1, 1])
    assert is_fefx(inst, DiscreteAllocation(((1,), (0,)), (1,)))


def test_fefx_two_identical_goods():
    inst = Instance(values=[[1, 1], [1, 1]], sizes=[[1, 1], [1, 1]], budgets=[2, 2])
    v = is_fefx(inst, DiscreteAllocation(((1, 1), (0, 0)), (1, 1)))
    assert not v and v.witness.agent == 1 and v.witness.target == 0


def test_fef_agrees_with_definition_on_grid():
    insts = [Instance(values=[[2, 1], [1, 1]], sizes=[[1, 1], [1, 2]], budgets=[1, 1]),
             Instance(values=[[1, 0], [F(1, 2), 1]], sizes=[[F(1, 2), 1], [1, 1]], budgets=[F(1, 2), 1]),
             Instance(values=[[F(3, 4), F(1, 3)], [F(1, 5), 1]], sizes=[[1, F(1, 3)], [2, 1]], budgets=[1, F(3, 2)])]
    for inst in insts:
        for x in enumerate_feasible(inst, 8):
            assert bool(is_fef(inst, x)) == fef_by_definition(inst, x)


@given(st.data())
def test_witness_revalidates(data):
    inst = data.draw(instances())
    alloc = data.draw(allocations(inst))
    eps = data.draw(st.fractions(0, 1, max_denominator=8))
    v = is_fef_eps(inst, alloc, eps)
    if v:
        assert max_envy(inst, alloc) <= eps
        return
    w = v.witness
    target = alloc.charity if w.target == CHARITY else alloc.bundles[w.target]
    assert all(0 <= a <= b for a, b in zip(w.bundle, target))
    assert bundle_size(inst, w.agent, w.bundle) <= inst.budgets[w.agent]
    assert bundle_value(inst, w.agent, w.bundle) - bundle_value(inst, w.agent, alloc.bundles[w.agent]) == w.envy
    assert w.envy > eps


@given(st.data())
def test_eps_monotone(data):
    inst = data.draw(instances())
    alloc = data.draw(allocations(inst))
    eps = data.draw(st.fractions(0, 1, max_denominator=8))
    more = eps + data.draw(st.fractions(0, 1, max_denominator=8))
    if is_fef_eps(inst, alloc, eps):
        assert is_fef_eps(inst, alloc, more)


@given(st.data())
def test_graph_matches_matrix(data):
    inst = data.draw(instances())
    alloc = data.draw(allocations(inst))
    V = envy_matrix(inst, alloc)
    own = alloc.values(inst)
    expected = {(i, h) for i in range(inst.n) for h in range(inst.n) if h != i and V[i][h] > own[i]}
    assert envy_graph(inst, alloc).edges == expected
    for i in range(inst.n):
        assert V[i][i] == max_feasible_subset(inst, i, alloc.bundles[i])[1] >= 0
