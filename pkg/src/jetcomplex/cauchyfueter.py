"""The eight-variable Cauchy-Fueter operator and its two compatibility operators.

Variables are z^{i0} (positions 0..3) then z^{i1} (positions 4..7).  The
sequence is

    (phi0, phi1) --CF--> (Phi_0..Phi_3) --tor0--> Lambda^3 (4 comps) --tor1--> 2 comps

of orders 1, 2, 1.  Three-index families are stored on increasing triples.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

from .complexbuilder import (DEFAULT_MODULAR_THRESHOLD, DEFAULT_SIZE_GUARD, ExactnessReport,
                             SymbolMatrix, exactness_check)
from .exactalg import choose
from .forms import antisymmetric_extension, cf_variable, torsion_residuals
from .jets import PDESystem, jet_dim
from .poly import Poly, monomials
from .wfamily import make_wsystem

NVARS = 8
WIDTH = 4
TRIPLES: Tuple[Tuple[int, int, int], ...] = tuple(combinations(range(WIDTH), 3))
VARIABLE_NAMES = tuple(f"z{i}0" for i in range(WIDTH)) + tuple(f"z{i}1" for i in range(WIDTH))
RATIONAL_K_MAX = 3
MODULAR_K_MAX = 7


def z(i: int, block: int) -> int:
    return cf_variable(i, block, WIDTH)


def cf_system() -> PDESystem:
    """dphi0/dz^{i0} + dphi1/dz^{i1} = 0 for i = 0..3."""
    ws = make_wsystem(WIDTH, WIDTH, [(i, i) for i in range(1, WIDTH + 1)], label="cauchy-fueter",
                      names=VARIABLE_NAMES)
    return ws.base


@dataclass(frozen=True)
class CFPair:
    phi0: Poly
    phi1: Poly

    def __post_init__(self):
        if self.phi0.nvars != NVARS or self.phi1.nvars != NVARS:
            raise ValueError("CF pairs live in 8 variables")


@dataclass(frozen=True)
class Lambda3Field:
    components: Tuple[Poly, ...]  # ordered as TRIPLES

    def __post_init__(self):
        if len(self.components) != len(TRIPLES):
            raise ValueError("a Lambda^3 field on four indices has 4 components")

    @classmethod
    def from_mapping(cls, phi: Mapping[Tuple[int, int, int], Poly]) -> "Lambda3Field":
        F = antisymmetric_extension(phi, WIDTH)
        return cls(tuple(F(*t) for t in TRIPLES))

    def as_mapping(self) -> Dict[Tuple[int, int, int], Poly]:
        return dict(zip(TRIPLES, self.components))

    def component(self, i: int, t: int, k: int) -> Poly:
        return antisymmetric_extension(self.as_mapping(), WIDTH)(i, t, k)

    def is_zero(self) -> bool:
        return not any(self.components)


@dataclass(frozen=True)
class Lambda4Pair:
    block0: Poly
    block1: Poly

    def is_zero(self) -> bool:
        return not self.block0 and not self.block1


def cf_apply(p: CFPair) -> Tuple[Poly, ...]:
    return tuple(p.phi0.diff(z(i, 0)) + p.phi1.diff(z(i, 1)) for i in range(WIDTH))


def _d2(p: Poly, a: int, b: int) -> Poly:
    return p.diff(a).diff(b)


def tor0_apply(Phi: Sequence[Poly]) -> Lambda3Field:
    if len(Phi) != WIDTH:
        raise ValueError("tor0 acts on four polynomials")
    out = []
    for i, t, k in TRIPLES:
        out.append(_d2(Phi[k], z(i, 1), z(t, 0)) - _d2(Phi[k], z(i, 0), z(t, 1))
                   + _d2(Phi[i], z(k, 0), z(t, 1)) - _d2(Phi[i], z(k, 1), z(t, 0))
                   + _d2(Phi[t], z(i, 0), z(k, 1)) - _d2(Phi[t], z(i, 1), z(k, 0)))
    return Lambda3Field(tuple(out))


def tor1_apply(phi: Lambda3Field) -> Lambda4Pair:
    mapping = phi.as_mapping()
    r0 = torsion_residuals(mapping, 0, WIDTH)[(0, 1, 2, 3)]
    r1 = torsion_residuals(mapping, 1, WIDTH)[(0, 1, 2, 3)]
    return Lambda4Pair(r0, r1)


# ---------------------------------------------------------------------------
# symbols


def symbol_of(apply: Callable[[List[Poly]], List[Poly]], ncols: int, order: int) -> List[List[Poly]]:
    """Symbol of a homogeneous constant-coefficient operator, read off its action.

    Applying the operator to x^a in column i yields the constant a! * c_a in
    each row, where c_a is the xi^a coefficient of the symbol entry.
    """
    rows: List[Dict[int, Dict[Tuple[int, ...], Fraction]]] = []
    for i in range(ncols):
        for mono in monomials(NVARS, order):
            inp = [Poly.zero(NVARS)] * ncols
            inp[i] = Poly(NVARS, {mono: 1})
            out = apply(inp)
            weight = 1
            for e in mono:
                weight *= factorial(e)
            if not rows:
                rows = [dict() for _ in out]
            for m, val in enumerate(out):
                c = val.coeff((0,) * NVARS)
                if c:
                    rows[m].setdefault(i, {})[mono] = c / weight
    return [[Poly(NVARS, rows[m].get(i, {})) for i in range(ncols)] for m in range(len(rows))]


def cf_symbol() -> SymbolMatrix:
    return SymbolMatrix.from_system(cf_system())


def tor0_symbol() -> SymbolMatrix:
    rows = symbol_of(lambda v: list(tor0_apply(v).components), WIDTH, 2)
    return SymbolMatrix(NVARS, rows, (3,) * len(rows), (1,) * WIDTH)


def tor1_symbol() -> SymbolMatrix:
    def apply(v):
        out = tor1_apply(Lambda3Field(tuple(v)))
        return [out.block0, out.block1]

    rows = symbol_of(apply, len(TRIPLES), 1)
    return SymbolMatrix(NVARS, rows, (4, 4), (3,) * len(TRIPLES))


def cf_chain() -> List[SymbolMatrix]:
    return [cf_symbol(), tor0_symbol(), tor1_symbol()]


# ---------------------------------------------------------------------------
# jet-level bookkeeping


def cf_kernel_formula(k: int) -> int:
    """Solutions of CF homogeneous of degree k+4: 4*C(k+7,4) + 2*C(k+7,3)."""
    return 4 * choose(k + 7, 4) + 2 * choose(k + 7, 3)


@dataclass
class CFExactnessRow:
    k: int
    spaces: Tuple[int, int, int, int]
    ranks: Tuple[int, int, int]
    kernels: Tuple[int, int, int]
    exact_middle: Tuple[bool, bool]
    surjective: bool
    cf_kernel_matches_formula: bool
    modular: Tuple[bool, bool, bool]
    prime_trials: int

    @property
    def passed(self) -> bool:
        return all(self.exact_middle) and self.surjective and self.cf_kernel_matches_formula


def exactness_dims(k: int, modular_threshold: int = DEFAULT_MODULAR_THRESHOLD, prime_trials: int = 2,
                   seed: int = 0, size_guard: int = DEFAULT_SIZE_GUARD) -> CFExactnessRow:
    """Ranks of CF, tor0, tor1 between jets of degrees k+4, k+3, k+1, k."""
    if k < 0 or k > MODULAR_K_MAX:
        raise ValueError(f"k must lie in [0, {MODULAR_K_MAX}]")
    rep: ExactnessReport = exactness_check(cf_chain(), k, modular_threshold=modular_threshold,
                                           prime_trials=prime_trials, seed=seed, size_guard=size_guard)
    s = rep.slots
    spaces = tuple(x.dim for x in s)
    kernels = tuple(x.kernel for x in s[:3])
    return CFExactnessRow(
        k=k,
        spaces=spaces,
        ranks=tuple(rep.ranks),
        kernels=kernels,
        exact_middle=(bool(s[1].exact), bool(s[2].exact)),
        surjective=bool(s[3].exact),
        cf_kernel_matches_formula=kernels[0] == cf_kernel_formula(k),
        modular=tuple(rep.modular),
        prime_trials=prime_trials,
    )


def certificate_value(k: int) -> int:
    """Alternating dimension sum of the jet sequence minus the CF kernel count; zero when exact."""
    return (jet_dim(4, k + 1, NVARS) - jet_dim(4, k + 3, NVARS) + jet_dim(2, k + 4, NVARS)
            - cf_kernel_formula(k) - jet_dim(2, k, NVARS))


@dataclass
class DegreeCertificate:
    values: Tuple[int, ...]
    eighth_difference: int

    @property
    def passed(self) -> bool:
        return not any(self.values) and self.eighth_difference == 0


def degree7_certificate() -> DegreeCertificate:
    """P(k) for k = 0..7 and the order-8 finite difference of P over k = 0..8.

    Every summand of P is a polynomial of degree <= 7 in k, so a vanishing
    8th difference confirms the degree bound and eight zeros force P = 0.
    """
    values = tuple(certificate_value(k) for k in range(8))
    diff8 = sum((-1) ** (8 - j) * choose(8, j) * certificate_value(j) for j in range(9))
    cert = DegreeCertificate(values, diff8)
    assert cert.passed, f"certificate failed: {values}, {diff8}"
    return cert


def random_pair(rng: random.Random, degree: int, lo: int = -5, hi: int = 5) -> CFPair:
    return CFPair(Poly.random_homogeneous(NVARS, degree, rng, lo, hi),
                  Poly.random_homogeneous(NVARS, degree, rng, lo, hi))
