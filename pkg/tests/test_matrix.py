import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as hs

from delaygames.matrix import certify, fictitious_play, matrix_value, reduce_dominated, solve_exact


def test_matching_pennies():
    s = solve_exact([[1, 0], [0, 1]])
    assert s.value == F(1, 2)
    assert s.row == [F(1, 2), F(1, 2)] and s.col == [F(1, 2), F(1, 2)]


def test_rock_paper_scissors():
    s = solve_exact([[0, -1, 1], [1, 0, -1], [-1, 1, 0]])
    assert s.value == 0
    assert s.row == [F(1, 3)] * 3


def test_saddle_point():
    s = solve_exact([[3, 1], [4, 2]])
    assert s.value == 2 and s.row == [0, 1] and s.col == [0, 1]


def test_degenerate_shapes():
    assert solve_exact([[F(2, 3)]]).value == F(2, 3)
    assert solve_exact([[1, 0, 0]]).value == 0
    assert solve_exact([[1], [0], [0]]).value == 1
    with pytest.raises(ValueError):
        solve_exact([])
    with pytest.raises(ValueError):
        solve_exact([[1, 2], [3]])


def test_certify_rejects_wrong_value():
    with pytest.raises(ArithmeticError):
        certify([[1, 0], [0, 1]], F(2, 3), [F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)])


def test_iterative_mode():
    s = matrix_value([[1, 0], [0, 1]], "iterative", 1e-3)
    assert not s.exact and abs(s.value - 0.5) <= 1e-3 and s.gap <= 1e-3
    for bad in (0, -1.0, None):
        with pytest.raises(ValueError):
            matrix_value([[1]], "iterative", bad)
    with pytest.raises(ValueError):
        matrix_value([[1]], "fuzzy")


matrices = hs.integers(1, 5).flatmap(
    lambda r: hs.integers(1, 5).flatmap(
        lambda c: hs.lists(hs.lists(hs.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_exact_value_is_certified_and_bounded(M):
    s = solve_exact(M)
    certify(M, s.value, s.row, s.col)
    assert max(min(r) for r in M) <= s.value <= min(max(M[i][j] for i in range(len(M))) for j in range(len(M[0])))


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_dominance_preserves_value(M):
    rows, cols = reduce_dominated(M)
    sub = [[M[i][j] for j in cols] for i in rows]
    assert solve_exact(sub).value == solve_exact(M).value


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_fictitious_play_brackets_exact_value(M):
    s = solve_exact(M)
    fp = fictitious_play(M, 0.05)
    if fp.gap <= 0.05:
        assert abs(fp.value - float(s.value)) <= 0.05 + 1e-9
