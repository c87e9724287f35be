import time

import pytest
from hypothesis import given, strategies as st

from czeta.errors import DomainError
from czeta.predict import (PredictionGrid, prediction_table, special_sets, summand_terms,
                           trdeg_count, trdeg_formula)


def test_special_sets_examples():
    assert special_sets(3, "U", 1, 4) == [1]
    assert special_sets(2, "U", 2, 10) == [1, 5, 7]
    assert special_sets(2, "V", 3, 10) == [1, 3, 5, 9]
    for s in (1, 7, 50):
        assert special_sets(2, "U", 1, s) == [1]
        assert special_sets(2, "V", 1, s) == []


def test_special_sets_rejects_bad_input():
    with pytest.raises(DomainError):
        special_sets(3, "W", 1, 4)
    with pytest.raises(DomainError):
        special_sets(3, "U", 0, 4)


def test_grid_validation():
    with pytest.raises(DomainError):
        PredictionGrid(4, 1, 1)
    with pytest.raises(DomainError):
        PredictionGrid(3, 0, 1)
    with pytest.raises(DomainError):
        PredictionGrid(3, 1, 0)


@pytest.mark.parametrize("p,d,s,expected", [(2, 1, 17, 1), (3, 1, 4, 2), (2, 3, 10, 10)])
def test_formula_and_count_examples(p, d, s, expected):
    grid = PredictionGrid(p, d, s)
    assert trdeg_formula(grid) == expected
    assert trdeg_count(grid) == expected


def test_summand_terms_example():
    assert summand_terms(3, 1, 4) == (4, -1, -2, 0, 1)
    rows = prediction_table(PredictionGrid(2, 3, 10))["rows"]
    assert [row["formula"] for row in rows] == [1, 4, 5]


def test_exhaustive_sweep():
    start = time.perf_counter()
    for p in (2, 3, 5, 7):
        for d in range(1, 7):
            for s in range(1, 201):
                grid = PredictionGrid(p, d, s)
                assert trdeg_formula(grid) == trdeg_count(grid), grid
    assert time.perf_counter() - start < 5.0


@given(st.sampled_from([2, 3, 5, 7, 11]), st.integers(1, 6), st.integers(1, 400))
def test_monotone_in_s_and_d(p, d, s):
    g = trdeg_formula(PredictionGrid(p, d, s))
    assert trdeg_formula(PredictionGrid(p, d, s + 1)) >= g
    assert trdeg_formula(PredictionGrid(p, d + 1, s)) >= g


@given(st.integers(1, 10 ** 6))
def test_p2_first_row_is_one(s):
    assert sum(summand_terms(2, 1, s)) == 1
