from itertools import combinations, permutations

import pytest

from jetcomplex.complexbuilder import SymbolMatrix, syzygy_generators
from jetcomplex.exactalg import choose
from jetcomplex.jets import tableau_dim
from jetcomplex.poly import Poly
from jetcomplex.wfamily import (IndexSetError, canonical, formula_validated, make_wsystem, torsion_row, wdim,
                                wdim_formula, wtorsion_conditions)


def test_single_pair():
    ws = make_wsystem(1, 1, [(1, 1)])
    assert ws.base.equations == 1 and ws.base.variables == 2
    assert ws.base.equation_text(0) == "dphi0/dz10 + dphi1/dz11 = 0"


def test_cf_is_diagonal_instance():
    ws = make_wsystem(4, 4, [(i, i) for i in range(1, 5)])
    for m in range(4):
        nz = [(i, j) for i in range(2) for j in range(8) if ws.base.coeffs[m][i][j]]
        assert nz == [(0, m), (1, 4 + m)]


@pytest.mark.parametrize("pairs", [[(1, 1), (2, 1)], [(1, 1), (1, 2)], [(3, 1)], []])
def test_bad_index_sets(pairs):
    with pytest.raises(IndexSetError):
        make_wsystem(2, 2, pairs)


@pytest.mark.parametrize("args,expected", [((4, 4, 4, 0), 12), ((4, 4, 4, 1), 40), ((2, 2, 1, 0), 7)])
def test_formula_values(args, expected):
    assert wdim_formula(*args) == expected


def test_formula_range_checks():
    with pytest.raises(ValueError):
        wdim_formula(2, 2, 3, 0)
    with pytest.raises(ValueError):
        wdim_formula(2, 2, 1, -1)


def test_fallback_outside_census_range():
    assert not formula_validated(2, 2, 2)
    value, used = wdim(2, 2, 2, 2)
    assert not used
    assert value == tableau_dim(make_wsystem(2, 2, [(1, 1), (2, 2)]).base, 2)


def test_relabelling_preserves_dimensions():
    ws = make_wsystem(3, 4, [(1, 3), (3, 1)])
    can = canonical(ws)
    assert can.index_set.pairs == ((2, 3), (3, 4))
    for q in range(3):
        assert tableau_dim(ws.base, q) == tableau_dim(can.base, q)


@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_torsion_count_matches_syzygies(t):
    ws = make_wsystem(4, 4, [(i, i) for i in range(1, t + 1)])
    conds = wtorsion_conditions(ws)
    assert len(conds) == choose(t, 3)
    stage = syzygy_generators(SymbolMatrix.from_system(ws.base), 2)
    assert stage.count(1) == 0 and stage.count(2) == len(conds)


def test_torsion_rows_annihilate_symbol():
    ws = make_wsystem(3, 4, [(1, 2), (2, 4), (3, 1)])
    S = SymbolMatrix.from_system(ws.base)
    for cond in wtorsion_conditions(ws):
        for i in range(2):
            total = Poly.zero(7)
            for m, g in enumerate(cond.row):
                total = total + g * S.entries[m][i]
            assert total.is_zero()


def test_torsion_row_antisymmetry():
    ws = make_wsystem(4, 4, [(1, 2), (2, 1), (3, 4), (4, 3)])
    for base in combinations(ws.index_set.j1_set, 3):
        ref = torsion_row(ws, base)
        for perm in permutations(range(3)):
            triple = tuple(base[p] for p in perm)
            inversions = sum(1 for a in range(3) for b in range(a + 1, 3) if perm[a] > perm[b])
            sign = -1 if inversions % 2 else 1
            assert torsion_row(ws, triple) == tuple(x.scale(sign) for x in ref)
