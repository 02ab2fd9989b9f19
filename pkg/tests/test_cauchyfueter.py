import random
from itertools import product

import pytest
import sympy

from jetcomplex.cauchyfueter import (NVARS, TRIPLES, VARIABLE_NAMES, CFPair, Lambda3Field, cf_apply, cf_chain,
                                     cf_kernel_formula, cf_symbol, certificate_value, degree7_certificate,
                                     exactness_dims, random_pair, tor0_apply, tor0_symbol, tor1_apply, tor1_symbol)
from jetcomplex.complexbuilder import is_zero_matrix, same_relations, syzygy_generators
from jetcomplex.jets import tableau_dim
from jetcomplex.poly import Poly, monomials

Z = sympy.symbols(" ".join(VARIABLE_NAMES))


def zs(i, d):
    return Z[i + 4 * d]


def to_sympy(p):
    return sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod([x ** e for x, e in zip(Z, m)])
               for m, c in p.terms.items())


def var(i, d):
    return Poly.var(NVARS, i + 4 * d)


def test_cf_constants_and_single_partial():
    zero = Poly.zero(NVARS)
    assert all(p.is_zero() for p in cf_apply(CFPair(Poly.const(NVARS, 3), Poly.const(NVARS, -2))))
    assert cf_apply(CFPair(var(0, 0), zero)) == (Poly.const(NVARS, 1), zero, zero, zero)


def test_cf_against_symbolic_differentiation(rng):
    p = CFPair(var(1, 1) * var(0, 0), -(var(1, 0) * var(0, 0)))
    out = cf_apply(p)
    P0, P1 = to_sympy(p.phi0), to_sympy(p.phi1)
    for i in range(4):
        assert sympy.expand(to_sympy(out[i]) - sympy.diff(P0, zs(i, 0)) - sympy.diff(P1, zs(i, 1))) == 0
    assert out[0] == var(1, 1)


def tor0_oracle(Phi):
    out = {}
    for i, t, k in TRIPLES:
        out[(i, t, k)] = sympy.expand(
            sympy.diff(Phi[k], zs(i, 1), zs(t, 0)) - sympy.diff(Phi[k], zs(i, 0), zs(t, 1))
            + sympy.diff(Phi[i], zs(k, 0), zs(t, 1)) - sympy.diff(Phi[i], zs(k, 1), zs(t, 0))
            + sympy.diff(Phi[t], zs(i, 0), zs(k, 1)) - sympy.diff(Phi[t], zs(i, 1), zs(k, 0)))
    return out


def test_tor0_against_symbolic_differentiation(rng):
    Phi = [Poly.random_homogeneous(NVARS, 3, rng, density=0.3) for _ in range(4)]
    got = tor0_apply(Phi).as_mapping()
    ref = tor0_oracle([to_sympy(p) for p in Phi])
    for t in TRIPLES:
        assert sympy.expand(to_sympy(got[t]) - ref[t]) == 0


def test_tor0_hand_example():
    # z01*z10 is killed: no triple i<t<k pairs the index 0 with an upper block index 1 in that way
    Phi = [var(0, 1) * var(1, 0), Poly.zero(NVARS), Poly.zero(NVARS), Poly.zero(NVARS)]
    assert tor0_apply(Phi).is_zero()
    Phi = [Poly.zero(NVARS), Poly.zero(NVARS), var(0, 1) * var(1, 0), Poly.zero(NVARS)]
    out = tor0_apply(Phi).as_mapping()
    assert out[(0, 1, 2)] == Poly.const(NVARS, 1)  # d2 Phi_2 / dz01 dz10


def test_tor0_kills_low_degree(rng):
    Phi = [Poly.random_homogeneous(NVARS, 1, rng) for _ in range(4)]
    assert tor0_apply(Phi).is_zero()


def test_tor1_examples():
    zero = Poly.zero(NVARS)
    assert tor1_apply(Lambda3Field((zero,) * 4)).is_zero()
    out = tor1_apply(Lambda3Field((zero, zero, zero, var(0, 0))))
    assert out.block0 == Poly.const(NVARS, -1) and out.block1.is_zero()


def test_tor1_invariant_under_relabelled_storage(rng):
    comps = [Poly.random_homogeneous(NVARS, 2, rng) for _ in range(4)]
    field = Lambda3Field(tuple(comps))
    relabelled = {(t[1], t[0], t[2]): -p for t, p in zip(TRIPLES, comps)}
    assert tor1_apply(Lambda3Field.from_mapping(relabelled)) == tor1_apply(field)


def _monomial_inputs(ncols, degree):
    for i in range(ncols):
        for m in monomials(NVARS, degree):
            v = [Poly.zero(NVARS)] * ncols
            v[i] = Poly(NVARS, {m: 1})
            yield v


@pytest.mark.parametrize("degree", [0, 1, 2, 3, 4])
def test_complex_identities_on_monomials(degree):
    for v in _monomial_inputs(2, degree):
        assert tor0_apply(cf_apply(CFPair(*v))).is_zero()
    for v in _monomial_inputs(4, degree):
        assert tor1_apply(tor0_apply(v)).is_zero()


def test_symbol_products_vanish():
    S, T0, T1 = cf_chain()
    assert is_zero_matrix(T0 @ S) and is_zero_matrix(T1 @ T0)


def test_symbols_match_operators(rng):
    # symbol read off the action agrees with applying the operator to a plane wave of degree 2
    T0 = tor0_symbol()
    xi = [rng.randint(-4, 4) for _ in range(NVARS)]
    lin = Poly(NVARS, {tuple(1 if t == j else 0 for t in range(NVARS)): c for j, c in enumerate(xi)})
    for col in range(4):
        v = [Poly.zero(NVARS)] * 4
        v[col] = lin * lin
        out = tor0_apply(v).components
        for m in range(4):
            assert out[m] == Poly.const(NVARS, 2 * T0.entries[m][col].evaluate(xi))


@pytest.mark.parametrize("q", range(6))
def test_cf_kernel_formula(cf, q):
    if q <= 2:
        assert tableau_dim(cf, q + 1) == 4 * sympy.binomial(q + 5, 4) + 2 * sympy.binomial(q + 5, 3)
    if q >= 3:
        assert cf_kernel_formula(q - 3) == 4 * sympy.binomial(q + 4, 4) + 2 * sympy.binomial(q + 4, 3)


def test_torsion_row_spaces():
    S = cf_symbol()
    stage = syzygy_generators(S, 2)
    assert same_relations(S, 3, stage.generators[2], tor0_symbol().entries)
    T0 = tor0_symbol()
    stage2 = syzygy_generators(T0, 2)
    assert stage2.count(1) == 2 and stage2.count(2) == 0
    assert same_relations(T0, 4, stage2.generators[1], tor1_symbol().entries)


def test_exactness_k0():
    r = exactness_dims(0)
    assert r.spaces == (660, 480, 32, 2)
    assert r.ranks == (450, 30, 2)
    assert r.kernels[0] == 210 and r.passed


def test_exactness_bound():
    with pytest.raises(ValueError):
        exactness_dims(8)


def test_certificate():
    cert = degree7_certificate()
    assert cert.values == (0,) * 8 and cert.eighth_difference == 0
    assert certificate_value(0) == 32 - 480 + 660 - 210 - 2
    assert certificate_value(1) == 144 - 1320 + 1584 - 392 - 16
