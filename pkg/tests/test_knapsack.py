import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import instances
from gapfair import lp
from gapfair.errors import CapExceeded
from gapfair.instances import random_instance
from gapfair.knapsack import (PieceMultiset, density_order, max_feasible_discrete_subset,
                              max_feasible_subset)
from gapfair.model import Instance, bundle_size
from oracles import best_subset_value_lp, brute_force_discrete_best


def p2_program(inst, i, b):
    """The best-subset problem written as an LP: maximize v_i . y with 0 <= y <= b and the budget row."""
    return lp.LinearProgram(inst.values[i], [(inst.sizes[i], lp.LE, inst.budgets[i])],
                            [(0, x) for x in b])


def test_best_part_of_midpoint_bundle(nc):
    assert max_feasible_subset(nc, 1, (F(1, 4), F(1, 2))) == ((F(1, 4), F(3, 8)), F(5, 8))


def test_half_of_second_good(nc):
    assert max_feasible_subset(nc, 1, (0, 1)) == ((0, F(1, 2)), F(1, 2))


def test_empty_bundle(nc):
    assert max_feasible_subset(nc, 0, (0, 0)) == ((0, 0), 0)


def test_zero_value_goods_never_taken():
    inst = Instance(values=[[0, 1]], sizes=[[1, 1]], budgets=[5])
    assert max_feasible_subset(inst, 0, (1, 1))[0] == (0, 1)


def test_density_ties_go_to_lower_index():
    inst = Instance(values=[[1, 2, 2]], sizes=[[1, 2, 2]], budgets=[1])
    assert density_order(inst, 0) == [0, 1, 2]
    assert max_feasible_subset(inst, 0, (1, 1, 1))[0] == (1, 0, 0)


def test_reported_values_override():
    inst = Instance(values=[[1, 2]], sizes=[[1, 1]], budgets=[1])
    assert max_feasible_subset(inst, 0, (1, 1), values=(3, 1)) == ((1, 0), 3)


def test_discrete_single_good():
    inst = Instance(values=[[2]], sizes=[[2]], budgets=[1])
    assert max_feasible_discrete_subset(inst, 0, PieceMultiset((2,), (2,))) == ((1,), 1)


def test_discrete_two_pieces_per_good(nc):
    # two halves of the first good fit the unit budget and are worth 2
    assert max_feasible_discrete_subset(nc, 0, PieceMultiset((2, 2), (2, 2))) == ((2, 0), 2)
    assert brute_force_discrete_best(nc, 0, (2, 2), (2, 2)) == 2


def test_discrete_zero_budget(nc):
    inst = Instance(values=nc.values, sizes=nc.sizes, budgets=[0, 0])
    assert max_feasible_discrete_subset(inst, 0, PieceMultiset((2, 2), (2, 2))) == ((0, 0), 0)


def test_discrete_cap():
    inst = Instance(values=[[1] * 4], sizes=[[1] * 4], budgets=[2])
    with pytest.raises(CapExceeded, match="larger eps"):
        max_feasible_discrete_subset(inst, 0, PieceMultiset((99,) * 4, (99,) * 4), cap=1000)


def test_greedy_matches_lp_p2():
    rng = random.Random(11)
    for _ in range(300):
        inst = random_instance(rng, rng.randint(1, 3), rng.randint(1, 5), max_den=12,
                               positive_values=False)
        i = rng.randrange(inst.n)
        b = [F(rng.randint(0, 12), 12) for _ in range(inst.m)]
        y, val = max_feasible_subset(inst, i, b)
        assert val == lp.solve(p2_program(inst, i, b)).value
        assert val == best_subset_value_lp(inst.values[i], inst.sizes[i], inst.budgets[i], b)
        assert all(0 <= a <= c for a, c in zip(y, b))
        assert bundle_size(inst, i, y) <= inst.budgets[i]


@given(st.data())
def test_monotone_and_scale_covariant(data):
    inst = data.draw(instances())
    i = data.draw(st.integers(0, inst.n - 1))
    b = [data.draw(st.fractions(0, 1, max_denominator=8)) for _ in range(inst.m)]
    bigger = [min(F(1), x + data.draw(st.fractions(0, 1, max_denominator=4))) for x in b]
    assert max_feasible_subset(inst, i, b)[1] <= max_feasible_subset(inst, i, bigger)[1]
    sizes = [list(r) for r in inst.sizes]
    sizes[i] = [2 * s for s in sizes[i]]
    budgets = list(inst.budgets)
    budgets[i] *= 2
    scaled = Instance(values=inst.values, sizes=sizes, budgets=budgets)
    assert max_feasible_subset(scaled, i, b)[1] == max_feasible_subset(inst, i, b)[1]


@given(st.data())
def test_discrete_matches_brute_force(data):
    inst = data.draw(instances(max_m=3))
    i = data.draw(st.integers(0, inst.n - 1))
    pieces = tuple(data.draw(st.integers(1, 4)) for _ in range(inst.m))
    counts = tuple(data.draw(st.integers(0, k)) for k in pieces)
    _, val = max_feasible_discrete_subset(inst, i, PieceMultiset(counts, pieces))
    assert val == brute_force_discrete_best(inst, i, counts, pieces)
