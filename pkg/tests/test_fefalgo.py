import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conftest import instances
from gapfair.errors import ContractViolation
from gapfair.fairness import is_fef_eps, is_fefx, max_envy
from gapfair.fefalgo import (FefxRun, compute_fef_eps, compute_fefx, fef_convergence_study,
                             find_minimal_envied_set, split_into_pieces)
from gapfair.instances import random_instance
from gapfair.knapsack import PieceMultiset, max_feasible_discrete_subset, multiset_value
from gapfair.model import DiscreteAllocation, Instance
from oracles import brute_force_discrete_best


def test_split_counts(nc):
    assert split_into_pieces(nc, 1).pieces == (2, 2)
    assert split_into_pieces(nc, F(1, 2)).pieces == (4, 4)
    assert split_into_pieces(nc, 5).pieces == (1, 1)
    with pytest.raises(ValueError):
        split_into_pieces(nc, 0)


def test_minimal_envied_set(nc):
    empty = DiscreteAllocation(((0, 0), (0, 0)), (2, 2))
    assert find_minimal_envied_set(nc, empty) == ((1, 0), 0)
    full = DiscreteAllocation(((2, 0), (0, 2)), (2, 2))
    assert find_minimal_envied_set(nc, full) is None


def test_minimal_envied_set_singleton():
    inst = Instance(values=[[1]], sizes=[[1]], budgets=[5])
    assert find_minimal_envied_set(inst, DiscreteAllocation(((0,),), (1,))) == ((1,), 0)


def test_minimality_is_exact():
    rng = random.Random(2)
    for _ in range(40):
        inst = random_instance(rng, rng.randint(1, 3), rng.randint(1, 3))
        pieces = (2,) * inst.m
        found = find_minimal_envied_set(inst, DiscreteAllocation(tuple((0,) * inst.m for _ in range(inst.n)), pieces))
        if found is None:
            continue
        T, k = found
        assert brute_force_discrete_best(inst, k, T, pieces) > 0
        for g in range(inst.m):
            if T[g]:
                smaller = tuple(c - (h == g) for h, c in enumerate(T))
                assert all(brute_force_discrete_best(inst, i, smaller, pieces) <= 0 for i in range(inst.n))


def test_fefx_trivial_cases():
    one = Instance(values=[[1]], sizes=[[1]], budgets=[1])
    assert compute_fefx(one).counts == ((1,),)
    two = Instance(values=[[1, 0], [0, 1]], sizes=[[1, 1], [1, 1]], budgets=[1, 1])
    d = compute_fefx(two)
    assert d.counts == ((1, 0), (0, 1)) and d.charity == (0, 0)
    assert is_fefx(two, d)


def test_fef_eps_on_nonconvex_instance(nc):
    for eps in (2, 1, F(1, 2), F(1, 4)):
        d = compute_fefx(nc, split_into_pieces(nc, eps))
        assert is_fefx(nc, d)
        assert is_fef_eps(nc, compute_fef_eps(nc, eps), eps)


def test_swaps_strictly_raise_total(nc):
    run = FefxRun(None)
    compute_fefx(nc, (4, 4), record=run)
    totals = [t for _, _, t in run.swaps]
    assert totals == sorted(set(totals)) and len(totals) >= 1


def test_convergence_study(nc):
    rep = fef_convergence_study(nc, [1, F(1, 2), F(1, 4)])
    assert [s.eps for s in rep.steps] == [1, F(1, 2), F(1, 4)]
    assert all(s.max_envy <= s.eps for s in rep.steps)
    assert rep.steps[0].distance is None and rep.steps[1].distance is not None
    assert len(fef_convergence_study(nc, [1]).steps) == 1
    with pytest.raises(ValueError):
        fef_convergence_study(nc, [F(1, 2), 1])


def test_convergence_study_truncates_at_cap(nc):
    rep = fef_convergence_study(nc, [1, F(1, 64)], cap=50)
    assert rep.truncated and len(rep.steps) == 1 and "eps" in rep.reason


@settings(max_examples=40)
@given(instances(max_m=3), st.sampled_from([1, F(1, 2), F(1, 4)]))
def test_outputs_verify(inst, eps):
    d = compute_fefx(inst, split_into_pieces(inst, eps))
    assert is_fefx(inst, d)
    x = d.to_allocation()
    assert is_fef_eps(inst, x, eps)
    piece = split_into_pieces(inst, eps)
    assert all(v / piece.pieces[g] <= eps for row in inst.values for g, v in enumerate(row))
