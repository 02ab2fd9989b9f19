import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from jetcomplex.exactalg import (BinomialTable, EchelonBasis, ExactMatrix, choose, kernel_basis, lemma23_check,
                                 identity_sides, rank, rank_mod_prime, rank_modp, rref, row_space_equal, solve)

small_ints = st.integers(min_value=-4, max_value=4)


@st.composite
def matrices(draw, max_dim=7):
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(1, max_dim))
    density = draw(st.sampled_from([0.2, 0.5, 1.0]))
    rows = []
    for _ in range(r):
        row = []
        for _ in range(c):
            keep = draw(st.floats(0, 1)) < density
            num = draw(small_ints) if keep else 0
            den = draw(st.integers(1, 3))
            row.append(Fraction(num, den))
        rows.append(row)
    return ExactMatrix.from_dense(rows, ncols=c)


def sympy_of(M):
    return sympy.Matrix(M.nrows, M.ncols, lambda i, j: sympy.Rational(M[i, j].numerator, M[i, j].denominator))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_sympy(M):
    assert rank(M) == sympy_of(M).rank()


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_rref_matches_sympy(M):
    R, r, pivots = rref(M)
    ref, ref_piv = sympy_of(M).rref()
    assert r == len(ref_piv)
    assert pivots == list(ref_piv)
    for i in range(r):
        for j in range(M.ncols):
            assert R[i, j] == Fraction(int(ref[i, j].p), int(ref[i, j].q))


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_kernel_basis_is_kernel_of_full_rank(M):
    K = kernel_basis(M)
    assert (M @ K).is_zero()
    assert K.ncols == M.ncols - rank(M)
    assert rank(K) == K.ncols


@settings(max_examples=80, deadline=None)
@given(matrices(), st.randoms(use_true_random=False))
def test_solve_consistent_rhs(M, r):
    x0 = [Fraction(r.randint(-3, 3)) for _ in range(M.ncols)]
    b = M.apply(x0)
    x = solve(M, b)
    assert x is not None and M.apply(x) == b


def test_solve_reports_inconsistency():
    M = ExactMatrix.from_dense([[1, 1], [2, 2]])
    assert solve(M, [1, 3]) is None


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_modular_rank_agrees(M):
    assert rank_modp(M, trials=2, rng=random.Random(1)) == rank(M)


def test_modular_rank_rejects_small_prime():
    with pytest.raises(ValueError):
        rank_modp(ExactMatrix.identity(2), prime=101)


def test_bad_prime_reduction_is_detected():
    p = int(sympy.nextprime(1 << 21))
    M = ExactMatrix.from_dense([[Fraction(1, p)]])
    assert rank_mod_prime(M, p) is None
    assert rank_modp(M, prime=p, rng=random.Random(0)) == 1


def test_row_space_equal():
    A = ExactMatrix.from_dense([[1, 2, 3], [0, 1, 1]])
    B = ExactMatrix.from_dense([[1, 3, 4], [2, 4, 6]])
    C = ExactMatrix.from_dense([[1, 0, 0], [0, 1, 1]])
    assert row_space_equal(A, B)
    assert not row_space_equal(A, C)


def test_block_decomposition_does_not_change_rank():
    rng = random.Random(5)
    blocks = [[[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)] for _ in range(4)]
    entries = {}
    for b, blk in enumerate(blocks):
        for i in range(3):
            for j in range(3):
                entries[3 * b + i, 3 * b + j] = blk[i][j]
    M = ExactMatrix(12, 12, entries)
    assert rank(M) == sum(sympy.Matrix(blk).rank() for blk in blocks)


def test_choose_edge_cases():
    assert choose(5, 2) == 10
    assert choose(3, 5) == 0
    assert choose(4, -1) == 0
    assert choose(0, 0) == 1


def test_binomial_table_pascal():
    t = BinomialTable(30)
    assert t.pascal_ok()
    assert t(30, 15) == choose(30, 15)


@pytest.mark.parametrize("identity_id,params", [(1, (2, 3)), (2, (1, 2, 4)), (3, (2, 1, 3)), (4, (1, 3)),
                                                (5, (4, 1, 3)), (6, (2, 3, 2))])
def test_identity_examples(identity_id, params):
    lhs, rhs = identity_sides(identity_id, *params)
    assert lhs == rhs


def test_identity_side_conditions():
    with pytest.raises(ValueError):
        lemma23_check(2, 1, 5, 3)
    with pytest.raises(ValueError):
        lemma23_check(5, 2, 1, 3)
    with pytest.raises(ValueError):
        lemma23_check(6, 1, 2, 3)
    with pytest.raises(ValueError):
        lemma23_check(7, 1)


def test_echelon_basis_span():
    E = EchelonBasis()
    assert E.add({0: 1, 2: 1})
    assert E.add({1: 1, 2: -1})
    assert not E.add({0: 2, 1: 3, 2: -1})
    assert E.contains({0: 1, 1: 1})
    assert not E.contains({2: 1})
    assert len(E) == 2
