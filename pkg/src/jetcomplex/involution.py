"""Cartan's involution test, regular sequences of partial 2-jets, and the
dimension criterion relating a system to its compatibility operator."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .complexbuilder import SymbolMatrix, jet_matrix
from .exactalg import ExactMatrix, kernel_basis, rank, solve
from .jets import CoordinateChange, PDESystem, change_coordinates, jet_dim, restricted_tableau_dim, tableau_dim
from .poly import Poly

NONE_EXISTS = None  # extend_regular's "no extension" value


@dataclass(frozen=True)
class CartanResult:
    lhs: int
    rhs: int
    restricted: Tuple[int, ...]  # dim A^0, dim A^0_1, ..., dim A^0_{n-1}

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def cartan_test(sys: PDESystem, T: Optional[CoordinateChange] = None) -> CartanResult:
    """dim A^1 against dim A^0 + sum_j dim A^0_j in the coordinates y = T^{-1} x."""
    if T is not None:
        sys = change_coordinates(sys, T)
    n = sys.variables
    lhs = tableau_dim(sys, 1)
    parts = (tableau_dim(sys, 0),) + tuple(restricted_tableau_dim(sys, j, 0) for j in range(1, n))
    res = CartanResult(lhs, sum(parts), parts)
    assert res.lhs <= res.rhs, f"Cartan inequality violated: {res.lhs} > {res.rhs}"
    return res


@dataclass
class InvolutionReport:
    lhs: int
    rhs_samples: List[Tuple[int, int]]  # (coordinate seed, rhs)
    seed: int
    restricted_min: Tuple[int, ...] = ()

    @property
    def samples(self) -> int:
        return len(self.rhs_samples)

    @property
    def rhs_min(self) -> int:
        return min(r for _, r in self.rhs_samples)

    @property
    def involutive(self) -> bool:
        return self.lhs == self.rhs_min

    @property
    def verdict(self) -> str:
        if self.involutive:
            return "involutive"
        return f"not involutive ({self.lhs} < {self.rhs_min})"


def sample_seeds(seed: int, samples: int) -> List[int]:
    rng = random.Random(seed)
    return [rng.randrange(1 << 32) for _ in range(samples)]


def is_involutive(sys: PDESystem, samples: int = 20, seed: int = 0) -> InvolutionReport:
    """Cartan test minimized over random integer coordinate changes."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    out: List[Tuple[int, int]] = []
    lhs = None
    best: Optional[CartanResult] = None
    for s in sample_seeds(seed, samples):
        T = CoordinateChange.random(sys.variables, random.Random(s), seed=s)
        res = cartan_test(sys, T)
        if lhs is not None and res.lhs != lhs:
            raise AssertionError("dim A^1 changed under a coordinate change")
        lhs = res.lhs
        out.append((s, res.rhs))
        if best is None or res.rhs < best.rhs:
            best = res
    return InvolutionReport(lhs, out, seed, best.restricted)


# ---------------------------------------------------------------------------
# regular sequences


@dataclass(frozen=True)
class RegularSequenceWitness:
    """Level l (1-based) stores P^i_{l j} for j = l..n as ``levels[l-1][i][j-l]``."""

    unknowns: int
    variables: int
    levels: Tuple[Tuple[Tuple[Fraction, ...], ...], ...] = ()

    def __post_init__(self):
        lv = tuple(tuple(tuple(Fraction(x) for x in comp) for comp in level) for level in self.levels)
        if len(lv) > self.variables:
            raise ValueError("more levels than variables")
        for l, level in enumerate(lv, start=1):
            if len(level) != self.unknowns:
                raise ValueError(f"level {l} must hold one row per unknown")
            for comp in level:
                if len(comp) != self.variables - l + 1:
                    raise ValueError(f"level {l} rows need {self.variables - l + 1} entries")
        object.__setattr__(self, "levels", lv)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def entry(self, i: int, a: int, b: int) -> Fraction:
        """P^i_{ab} (1-based a, b), read from the level min(a, b)."""
        lo, hi = min(a, b), max(a, b)
        if lo > self.depth:
            raise KeyError(f"level {lo} not present")
        return self.levels[lo - 1][i][hi - lo]

    def extended(self, level: Sequence[Sequence[object]]) -> "RegularSequenceWitness":
        return RegularSequenceWitness(self.unknowns, self.variables, self.levels + (tuple(map(tuple, level)),))


def _level_system(sys: PDESystem, w: RegularSequenceWitness, l: int) -> Tuple[ExactMatrix, List[Fraction]]:
    """Unknowns P^i_{lj} (i, j >= l), i-major; rhs from the lower levels."""
    n, beta = sys.variables, sys.unknowns
    width = n - l + 1
    entries = {}
    rhs = []
    for m in range(sys.equations):
        acc = Fraction(0)
        for i in range(beta):
            for j in range(1, n + 1):
                a = sys.coeffs[m][i][j - 1]
                if not a:
                    continue
                if j >= l:
                    entries[m, i * width + (j - l)] = a
                else:
                    acc -= a * w.entry(i, j, l)
        rhs.append(acc)
    return ExactMatrix(sys.equations, beta * width, entries), rhs


def _unpack(vec: Sequence[Fraction], beta: int, width: int) -> Tuple[Tuple[Fraction, ...], ...]:
    return tuple(tuple(vec[i * width:(i + 1) * width]) for i in range(beta))


def is_regular(sys: PDESystem, w: RegularSequenceWitness) -> bool:
    """Each stored level satisfies its relation against the lower ones."""
    for l in range(1, w.depth + 1):
        M, rhs = _level_system(sys, RegularSequenceWitness(w.unknowns, w.variables, w.levels[:l - 1]), l)
        flat = [x for comp in w.levels[l - 1] for x in comp]
        if M.apply(flat) != rhs:
            return False
    return True


def extend_regular(sys: PDESystem, w: RegularSequenceWitness, l: Optional[int] = None,
                   rng: Optional[random.Random] = None) -> Optional[RegularSequenceWitness]:
    """Append a level-l entry solving the level relation, or NONE_EXISTS.

    Without ``rng`` the particular solution with zeros in free positions is
    used; with ``rng`` a random kernel combination is added to it.
    """
    if (w.unknowns, w.variables) != (sys.unknowns, sys.variables):
        raise ValueError("witness shape does not match the system")
    if l is None:
        l = w.depth + 1
    if l != w.depth + 1 or l > sys.variables:
        raise ValueError(f"witness has depth {w.depth}; can only extend to level {w.depth + 1} <= n")
    if not is_regular(sys, w):
        raise ValueError("witness is not regular up to its depth")
    M, rhs = _level_system(sys, w, l)
    x = solve(M, rhs)
    if x is None:
        return NONE_EXISTS
    K = kernel_basis(M)
    if l == 1 and K.ncols and rng is None:
        x = [K[r, 0] for r in range(K.nrows)]
    if rng is not None:
        weights = [rng.randint(-9, 9) for _ in range(K.ncols)]
        for (r, c), v in K.entries().items():
            x[r] += v * weights[c]
    out = w.extended(_unpack(x, sys.unknowns, sys.variables - l + 1))
    assert is_regular(sys, out)
    return out


def sample_witness(sys: PDESystem, rng: random.Random, depth: int) -> Tuple[RegularSequenceWitness, Optional[int]]:
    """Grow a random witness level by level; return it with the first level that failed to extend."""
    w = RegularSequenceWitness(sys.unknowns, sys.variables)
    for l in range(1, depth + 1):
        nxt = extend_regular(sys, w, l, rng)
        if nxt is None:
            return w, l
        w = nxt
    return w, None


def witnesses_extend(sys: PDESystem, samples: int = 100, seed: int = 0,
                     T: Optional[CoordinateChange] = None) -> Tuple[bool, List[Optional[int]]]:
    """Whether every sampled regular witness extends to a full n-regular one."""
    if T is not None:
        sys = change_coordinates(sys, T)
    rng = random.Random(seed)
    fails = [sample_witness(sys, rng, sys.variables)[1] for _ in range(samples)]
    return all(f is None for f in fails), fails


def regular_sequence_space_dim(sys: PDESystem) -> int:
    """Dimension of the space of n-regular witnesses, built as one linear system.

    Unknowns are P^i_{ab}, a <= b; the level relations for l = 1..n are
    exactly the conditions cutting out A^1, so the result is dim A^1.
    """
    n, beta = sys.variables, sys.unknowns
    pairs = [(a, b) for a in range(1, n + 1) for b in range(a, n + 1)]
    pos = {(i, p): k for k, (i, p) in enumerate((i, p) for i in range(beta) for p in pairs)}
    entries = {}
    row = 0
    for l in range(1, n + 1):
        for m in range(sys.equations):
            for i in range(beta):
                for j in range(1, n + 1):
                    a = sys.coeffs[m][i][j - 1]
                    if a:
                        key = (row, pos[i, (min(j, l), max(j, l))])
                        entries[key] = entries.get(key, 0) + a
            row += 1
    M = ExactMatrix(row, len(pos), entries)
    return M.ncols - rank(M)


# ---------------------------------------------------------------------------
# dimension criterion for a system and its compatibility operator


def restrict_symbol(S: SymbolMatrix, cut: int) -> SymbolMatrix:
    """Set xi_1..xi_cut to zero and drop those variables."""
    if not 0 <= cut < S.nvars:
        raise ValueError("cut index out of range")
    nv = S.nvars - cut

    def restrict(p: Poly) -> Poly:
        return Poly(nv, {m[cut:]: c for m, c in p.terms.items() if not any(m[:cut])})

    return SymbolMatrix(nv, [[restrict(p) for p in row] for row in S.entries], S.row_degrees, S.col_degrees)


def _b0_dim(B: SymbolMatrix) -> int:
    """Kernel of B on the jets it maps to degree-0 targets."""
    M = jet_matrix(B, max(B.row_degrees))
    return M.ncols - rank(M)


@dataclass(frozen=True)
class RestrictedDimRow:
    j: int
    b0: int
    rhs: int

    @property
    def equal(self) -> bool:
        return self.b0 == self.rhs


def lemma46_check(sysA: PDESystem, sysB: Union[PDESystem, SymbolMatrix, None]) -> List[RestrictedDimRow]:
    """Per j = 1..n-1: dim B^0_j against dim S^beta_{2,(n-j)} - dim A^1_j."""
    n = sysA.variables
    if sysB is None:
        return []
    B = SymbolMatrix.from_system(sysB) if isinstance(sysB, PDESystem) else sysB
    if B.ncols != sysA.equations:
        raise ValueError(f"B consumes {B.ncols} components but A has {sysA.equations} equations")
    if B.nvars != n:
        raise ValueError("A and B must share the variables")
    rows = []
    for j in range(1, n):
        b0 = _b0_dim(restrict_symbol(B, j))
        rhs = jet_dim(sysA.unknowns, 2, n - j) - restricted_tableau_dim(sysA, j, 1)
        rows.append(RestrictedDimRow(j, b0, rhs))
    return rows
