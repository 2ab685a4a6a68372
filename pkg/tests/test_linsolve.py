from fractions import Fraction
from random import Random

from hypothesis import given, settings, strategies as st

from starq.linsolve import ColumnReducer


def test_solves_small_system_exactly():
    r = ColumnReducer()
    r.add_column("a", {0: Fraction(2), 1: Fraction(1)})
    r.add_column("b", {0: Fraction(1), 2: Fraction(3)})
    combo = r.solve({0: Fraction(4), 1: Fraction(1), 2: Fraction(6)})
    assert combo == {"a": Fraction(1), "b": Fraction(2)}


def test_dependent_columns_are_never_used():
    r = ColumnReducer()
    assert r.add_column("a", {0: 1, 1: 1})
    assert not r.add_column("copy", {0: 2, 1: 2})
    combo = r.solve({0: Fraction(3), 1: Fraction(3)})
    assert combo == {"a": Fraction(3)}


def test_infeasible_returns_none_and_residual_reports_gap():
    r = ColumnReducer()
    r.add_column("a", {0: 1})
    assert r.solve({1: Fraction(1)}) is None
    gap = r.residual({0: Fraction(2), 1: Fraction(5)})
    assert gap == {1: Fraction(5)}


def test_zero_rhs_solves_empty():
    r = ColumnReducer()
    r.add_column("a", {0: 1})
    assert r.solve({}) == {}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_random_combinations_are_recovered(seed):
    rng = Random(seed)
    rows, cols = rng.randint(1, 6), rng.randint(1, 5)
    matrix = {c: {r: Fraction(rng.randint(-4, 4))
                  for r in range(rows) if rng.random() < 0.7}
              for c in range(cols)}
    reducer = ColumnReducer()
    for c in range(cols):
        reducer.add_column(c, matrix[c])
    weights = {c: Fraction(rng.randint(-3, 3)) for c in range(cols)}
    rhs: dict = {}
    for c, w in weights.items():
        for r, v in matrix[c].items():
            rhs[r] = rhs.get(r, Fraction(0)) + w * v
    rhs = {r: v for r, v in rhs.items() if v}
    combo = reducer.solve(rhs)
    assert combo is not None
    # the returned combination reproduces the right-hand side exactly
    rebuilt: dict = {}
    for c, w in combo.items():
        for r, v in matrix[c].items():
            rebuilt[r] = rebuilt.get(r, Fraction(0)) + w * v
    rebuilt = {r: v for r, v in rebuilt.items() if v}
    assert rebuilt == rhs
