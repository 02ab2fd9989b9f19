import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jetcomplex.cauchyfueter import cf_apply, random_pair, tor0_apply
from jetcomplex.forms import (HYPOTHESIS_NOT_SATISFIED, PolyForm, SymArray, euler_contract, ext_d, is_closed,
                              koszul_solve, lemma31_conclusion, lemma31_instance_check, random_hypothesis_instance,
                              torsion_residuals)
from jetcomplex.poly import Poly

form_shapes = st.tuples(st.integers(1, 4), st.integers(0, 3), st.integers(0, 3), st.integers(0, 10_000))


def _random_form(shape):
    N, r, s, seed = shape
    r = min(r, N)
    return PolyForm.random(N, r, s, random.Random(seed))


def test_d_of_simple_form():
    f = PolyForm(2, 1, 1, {(1,): Poly.var(2, 0)})
    assert ext_d(f) == PolyForm(2, 2, 0, {(0, 1): Poly.const(2, 1)})


def test_closedness_examples():
    assert is_closed(PolyForm(2, 2, 0, {(0, 1): Poly.const(2, 1)}))
    assert not is_closed(PolyForm(2, 1, 1, {(0,): Poly.var(2, 1)}))
    assert is_closed(PolyForm.random(3, 3, 2, random.Random(0)))


def test_koszul_on_area_form():
    u = koszul_solve(PolyForm(2, 2, 0, {(0, 1): Poly.const(2, 1)}))
    half = Fraction(1, 2)
    assert u == PolyForm(2, 1, 1, {(0,): Poly.var(2, 1, -half), (1,): Poly.var(2, 0, half)})


def test_koszul_rejections():
    with pytest.raises(ValueError):
        koszul_solve(PolyForm(2, 1, 1, {(0,): Poly.var(2, 1)}))
    with pytest.raises(ValueError):
        koszul_solve(PolyForm(2, 0, 0, {(): Poly.const(2, 1)}))


def test_form_key_validation():
    with pytest.raises(ValueError):
        PolyForm(3, 2, 0, {(1, 0): Poly.const(3, 1)})
    with pytest.raises(ValueError):
        PolyForm(3, 1, 1, {(0,): Poly.const(3, 1)})


@settings(max_examples=200, deadline=None)
@given(form_shapes)
def test_d_squared_is_zero(shape):
    f = _random_form(shape)
    if f.form_degree + 2 <= f.space_dim:
        assert ext_d(ext_d(f)).is_zero()


@settings(max_examples=200, deadline=None)
@given(form_shapes)
def test_euler_homotopy_identity(shape):
    f = _random_form(shape)
    N, r, s = f.space_dim, f.form_degree, f.coeff_degree
    if r == 0 or r == N:
        return
    lhs = ext_d(euler_contract(f)) + euler_contract(ext_d(f)) if s > 0 else ext_d(euler_contract(f))
    assert lhs == f.scale(s + r)


@settings(max_examples=100, deadline=None)
@given(form_shapes)
def test_koszul_roundtrip_on_exact_forms(shape):
    g = _random_form(shape)
    if g.form_degree + 1 > g.space_dim or g.coeff_degree == 0:
        return
    f = ext_d(g)
    if f.is_zero():
        return
    u = koszul_solve(f)
    assert ext_d(u) == f
    if g.form_degree + 2 <= g.space_dim:
        assert ext_d(u - g).is_zero()


def test_random_closed_three_form_in_four_variables():
    g = PolyForm.random(4, 2, 2, random.Random(3))
    f = ext_d(g)
    assert f.coeff_degree == 1
    assert ext_d(koszul_solve(f)) == f


# -- torsion residuals ---------------------------------------------------------

def test_residuals_vanish_on_complex_images(rng):
    for _ in range(5):
        phi = tor0_apply(cf_apply(random_pair(rng, 3))).as_mapping()
        for block in (0, 1):
            assert all(v.is_zero() for v in torsion_residuals(phi, block).values())


def test_residuals_detect_noncompatible_family():
    zero = Poly.zero(8)
    phi = {(0, 1, 2): zero, (0, 1, 3): zero, (0, 2, 3): zero, (1, 2, 3): Poly.var(8, 0)}
    res = torsion_residuals(phi, 0)
    assert res[(0, 1, 2, 3)] == Poly.const(8, -1)
    assert all(v.is_zero() for v in torsion_residuals(phi, 1).values())


def test_residuals_of_zero():
    zero = Poly.zero(8)
    phi = {t: zero for t in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]}
    assert all(v.is_zero() for v in torsion_residuals(phi, 0).values())


def test_residuals_reject_non_antisymmetric():
    p = Poly.var(8, 1)
    with pytest.raises(ValueError):
        torsion_residuals({(0, 1, 2): p, (1, 0, 2): p}, 0)
    with pytest.raises(ValueError):
        torsion_residuals({(0, 0, 2): p}, 0)
    with pytest.raises(ValueError):
        torsion_residuals({(0, 1, 2): p}, 2)


# -- closedness lemma instances -------------------------------------------------

def test_closedness_zero_array():
    assert lemma31_instance_check(SymArray(4, 3, {}), (0,)) is True


def test_closedness_fully_symmetric_array(rng):
    # X^k_{(A)b(L)} = coefficient of x^{A+b+L} in F^k: symmetric in all lower indices at once
    F = [Poly.random_homogeneous(4, 4, rng) for _ in range(4)]
    values = {}
    for k, A, b, L in SymArray.slots(4, 3):
        mono = [0] * 4
        for i in A + (b,) + L:
            mono[i] += 1
        values[(k, A, b, L)] = F[k].coeff(tuple(mono))
    X = SymArray(4, 3, values)
    assert lemma31_instance_check(X, (1,)) is True


@pytest.mark.parametrize("grade,prefix", [(2, ()), (3, (0,)), (4, (1,)), (4, (0, 2))])
def test_closedness_on_random_hypothesis_instances(grade, prefix):
    rng = random.Random(grade * 10 + len(prefix))
    for _ in range(3):
        X = random_hypothesis_instance(4, grade, prefix, rng)
        assert lemma31_instance_check(X, prefix) is True


def test_closedness_hypothesis_violation_is_reported(rng):
    X = SymArray(4, 4, {s: rng.randint(-3, 3) for s in SymArray.slots(4, 4)})
    assert lemma31_instance_check(X, (2,)) is HYPOTHESIS_NOT_SATISFIED
    # the conclusion genuinely needs the hypothesis: without it the form is not closed
    assert not is_closed(lemma31_conclusion(X, (2,)))


def test_symarray_rejects_broken_symmetry():
    with pytest.raises(ValueError):
        SymArray(4, 2, {(0, (1, 2), 0, ()): 1, (0, (2, 1), 0, ()): 2})
    with pytest.raises(ValueError):
        SymArray(4, 2, {(0, (1,), 0, ()): 1})
    with pytest.raises(ValueError):
        SymArray(4, 2, {(0, (1,), 0): 1})
