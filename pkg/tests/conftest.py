import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from gapfair.instances import nonconvex_allocations, nonconvex_instance  # noqa: E402
from gapfair.model import Allocation, Instance  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


@pytest.fixture
def nc():
    return nonconvex_instance()


@pytest.fixture
def nc_allocs():
    return nonconvex_allocations()


def fractions(max_den=8, lo=0, hi=1, positive=False):
    s = st.integers(1, max_den).flatmap(
        lambda q: st.integers(0, q).map(lambda p: lo + (hi - lo) * Fraction(p, q)))
    if positive:
        s = s.filter(lambda q: q > 0)
    return s


@st.composite
def instances(draw, max_n=3, max_m=3, positive_values=False, max_den=8):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    values = [[draw(fractions(max_den, positive=positive_values)) for _ in range(m)] for _ in range(n)]
    sizes = [[draw(fractions(max_den, positive=True)) for _ in range(m)] for _ in range(n)]
    budgets = [draw(fractions(max_den, 0, 2)) for _ in range(n)]
    return Instance(values=values, sizes=sizes, budgets=budgets)


@st.composite
def allocations(draw, inst, max_den=8, feasible=True):
    """Random allocation; with ``feasible`` each bundle is scaled down into its owner's budget."""
    bundles = []
    left = [Fraction(1)] * inst.m
    for i in range(inst.n):
        row = []
        for g in range(inst.m):
            x = draw(fractions(max_den)) * left[g]
            row.append(x)
        if feasible:
            size = sum(s * x for s, x in zip(inst.sizes[i], row))
            if size > inst.budgets[i]:
                scale = inst.budgets[i] / size
                row = [x * scale for x in row]
        left = [a - x for a, x in zip(left, row)]
        bundles.append(tuple(row))
    return Allocation(tuple(bundles))
