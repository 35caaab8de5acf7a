"""Exact rational linear algebra against small known matrices and numpy."""

import random
from fractions import Fraction

import numpy as np
import pytest

from derham.exactla import (
    ExactSolveError,
    ExactWidthExceeded,
    LinearExpander,
    direct_sum_check,
    exact_rank,
    float_rank,
    mat_mul,
    mat_vec,
    rank_nullspace,
    rank_of_columns,
    solve_any,
    solve_square,
    span_compare,
    transpose,
)

F = Fraction


def random_matrix(rng, nrows, ncols, rank):
    """Random rational matrix of prescribed rank, built as a product."""
    left = [[F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(rank)]
            for _ in range(nrows)]
    right = [[F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(ncols)]
             for _ in range(rank)]
    return mat_mul(left, right)


def test_rank_of_identity_and_zero():
    eye = [[F(int(i == j)) for j in range(4)] for i in range(4)]
    assert exact_rank(eye) == 4
    assert exact_rank([[F(0)] * 3 for _ in range(2)]) == 0


def test_rank_one_outer_product():
    a = [F(1), F(2), F(-3)]
    b = [F(1, 2), F(5), F(0), F(-7, 3)]
    rows = [[x * y for y in b] for x in a]
    res = rank_nullspace(rows)
    assert res.rank == 1
    assert res.nullity == 3
    for vec in res.nullspace:
        assert all(v == 0 for v in mat_vec(rows, vec))


@pytest.mark.parametrize("seed", range(6))
def test_prescribed_rank_and_nullspace(seed):
    rng = random.Random(seed)
    rank = rng.randint(1, 4)
    rows = random_matrix(rng, 6, 5, rank)
    res = rank_nullspace(rows)
    assert res.rank == rank
    assert res.nullity == 5 - rank
    for vec in res.nullspace:
        assert all(v == 0 for v in mat_vec(rows, vec))
    # nullspace vectors are independent
    assert rank_of_columns(res.nullspace) == res.nullity


@pytest.mark.parametrize("seed", range(6))
def test_float_rank_matches_exact(seed):
    rng = random.Random(100 + seed)
    rows = random_matrix(rng, 7, 6, rng.randint(1, 5))
    assert float_rank(rows, 1e-10) == exact_rank(rows)


def test_float_rank_sees_near_dependence_as_exact_does():
    # a row differing from a multiple of another by 1e-30 is dependent in
    # floats at tol 1e-10 but independent exactly; keep the two notions apart
    rows_exact = [[F(1), F(2)], [F(2), F(4) + F(1, 10**30)]]
    assert exact_rank(rows_exact) == 2
    assert float_rank(rows_exact, 1e-10) == 1


def test_span_compare_relations():
    e1, e2, e3 = [F(1), F(0), F(0)], [F(0), F(1), F(0)], [F(0), F(0), F(1)]
    both = span_compare([e1, e2], [[F(1), F(1), F(0)], e1])
    assert both.equal
    sub = span_compare([e1], [e1, e2])
    assert sub.relation == "left_in_right"
    assert sub.witness_right == 1  # e2 is outside span{e1}
    sup = span_compare([e1, e2], [e2])
    assert sup.relation == "right_in_left"
    disj = span_compare([e1], [e3])
    assert disj.relation == "incomparable"


def test_direct_sum_check_with_gram():
    gram = [[F(2), F(0)], [F(0), F(3)]]
    parts = [[[F(1), F(0)]], [[F(0), F(1)]]]
    cert = direct_sum_check(parts, gram)
    assert cert.is_direct and cert.orthogonal
    skew = direct_sum_check([[[F(1), F(1)]], [[F(0), F(1)]]], gram)
    assert skew.is_direct and not skew.orthogonal
    overlapping = direct_sum_check([[[F(1), F(0)]], [[F(1), F(0)]]])
    assert not overlapping.is_direct


def test_solve_any_consistent_and_inconsistent():
    rows = [[F(1), F(2)], [F(2), F(4)]]
    x = solve_any(rows, [F(3), F(6)])
    assert x is not None and mat_vec(rows, x) == [F(3), F(6)]
    assert solve_any(rows, [F(3), F(7)]) is None


def test_solve_square_multi_rhs():
    rng = random.Random(2)
    rows = random_matrix(rng, 4, 4, 4)
    rhs_cols = [[F(rng.randint(-9, 9)) for _ in range(4)] for _ in range(3)]
    sols = solve_square(rows, rhs_cols)
    for col, sol in zip(rhs_cols, sols):
        assert mat_vec(rows, sol) == col


def test_linear_expander_inside_and_outside():
    cols = [[F(1), F(0), F(1)], [F(0), F(1), F(1)]]
    exp = LinearExpander(cols)
    assert exp.expand([F(2), F(3), F(5)]) == [F(2), F(3)]
    with pytest.raises(ExactSolveError):
        exp.expand([F(0), F(0), F(1)])
    with pytest.raises(ExactSolveError):
        LinearExpander([[F(1), F(2)], [F(2), F(4)]])  # dependent columns


def test_width_guard(monkeypatch):
    monkeypatch.setenv("DERHAM_MAX_EXACT_COLS", "3")
    with pytest.raises(ExactWidthExceeded):
        exact_rank([[F(1)] * 4])
    assert exact_rank([[F(1)] * 3]) == 1


def test_against_numpy_on_integers():
    rng = random.Random(31)
    rows = [[rng.randint(-4, 4) for _ in range(5)] for _ in range(5)]
    a = np.array(rows, dtype=float)
    assert exact_rank([[F(v) for v in r] for r in rows]) == np.linalg.matrix_rank(a)
    b = [[rng.randint(-4, 4) for _ in range(3)] for _ in range(5)]
    prod = mat_mul(rows, b)
    assert np.array_equal(np.array([[int(v) for v in r] for r in prod]), a @ np.array(b))
    assert transpose(transpose(rows)) == rows
