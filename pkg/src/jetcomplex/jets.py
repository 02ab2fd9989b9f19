"""Jet spaces, first-order constant-coefficient systems and their prolongations.

A homogeneous degree-k jet with p components is stored as its coefficient
vector against the graded-lex monomial basis (component-major).  The
prolongation of a system to degree k is then the matrix of
``P -> (sum_ij a[m][i][j] dP^i/dx_j)_m`` from degree-(k+1) to degree-k jets.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactalg import ExactMatrix, choose, rank, rref
from .poly import Monomial, Poly, monomial_index, monomials

Tensor = Tuple[Tuple[Tuple[Fraction, ...], ...], ...]


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Exponent vector; ``exponents[j]`` counts occurrences of variable j."""

    exponents: Tuple[int, ...]

    def __post_init__(self):
        if any(e < 0 for e in self.exponents):
            raise ValueError("exponents must be non-negative")

    @classmethod
    def from_indices(cls, n: int, indices: Sequence[int]) -> "MultiIndex":
        exps = [0] * n
        for i in indices:
            exps[i] += 1
        return cls(tuple(exps))

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def nvars(self) -> int:
        return len(self.exponents)

    def count(self, j: int) -> int:
        return self.exponents[j]

    def position(self) -> int:
        """Index of this multi-index inside its degree block."""
        return monomial_index(self.nvars, self.degree)[self.exponents]

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a + b for a, b in zip(self.exponents, other.exponents)))


@dataclass(frozen=True)
class JetSpace:
    components: int
    degree: int
    variables: int

    @property
    def block(self) -> int:
        return jet_dim(1, self.degree, self.variables)

    @property
    def dim(self) -> int:
        return self.components * self.block

    def basis(self) -> List[Tuple[int, Monomial]]:
        mons = monomials(self.variables, self.degree)
        return [(c, m) for c in range(self.components) for m in mons]

    def index(self, component: int, mono: Monomial) -> int:
        return component * self.block + monomial_index(self.variables, self.degree)[tuple(mono)]

    def to_polys(self, vec: Sequence[object]) -> List[Poly]:
        mons = monomials(self.variables, self.degree)
        b = self.block
        return [Poly(self.variables, {m: vec[c * b + k] for k, m in enumerate(mons)})
                for c in range(self.components)]

    def from_polys(self, polys: Sequence[Poly]) -> List[Fraction]:
        vec = [Fraction(0)] * self.dim
        for c, p in enumerate(polys):
            for m, v in p.terms.items():
                vec[self.index(c, m)] = v
        return vec


def jet_dim(p: int, k: int, n: int) -> int:
    """Dimension of p-component homogeneous degree-k jets in n variables."""
    if p < 0 or n < 0:
        raise ValueError("p and n must be non-negative")
    if k < 0:
        return 0
    if n == 0:
        return p if k == 0 else 0
    return p * choose(k + n - 1, n - 1)


def _as_tensor(coeffs, alpha: int, beta: int, n: int) -> Tensor:
    out = []
    if len(coeffs) != alpha:
        raise ValueError(f"expected {alpha} equations, got {len(coeffs)}")
    for m, eq in enumerate(coeffs):
        if len(eq) != beta:
            raise ValueError(f"equation {m} has {len(eq)} unknown slots, expected {beta}")
        rows = []
        for i, r in enumerate(eq):
            if len(r) != n:
                raise ValueError(f"equation {m}, unknown {i}: expected {n} variable slots")
            rows.append(tuple(Fraction(v) for v in r))
        out.append(tuple(rows))
    return tuple(out)


@dataclass(frozen=True)
class PDESystem:
    """sum_{i,j} a[m][i][j] dP^i/dx_j = 0, m = 0..alpha-1."""

    equations: int
    unknowns: int
    variables: int
    coeffs: Tensor
    label: str = ""
    variable_names: Tuple[str, ...] = ()
    unknown_names: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_tensor(self.coeffs, self.equations, self.unknowns, self.variables))
        for m, eq in enumerate(self.coeffs):
            if not any(v for r in eq for v in r):
                raise ValueError(f"equation {m} is identically zero")
        if not self.variable_names:
            object.__setattr__(self, "variable_names", tuple(f"x{j + 1}" for j in range(self.variables)))
        if not self.unknown_names:
            object.__setattr__(self, "unknown_names", tuple(f"u{i + 1}" for i in range(self.unknowns)))
        if len(self.variable_names) != self.variables or len(self.unknown_names) != self.unknowns:
            raise ValueError("name lists do not match the system shape")
        if len(set(self.variable_names)) != self.variables or len(set(self.unknown_names)) != self.unknowns:
            raise ValueError("names must be unique")

    @classmethod
    def from_terms(cls, unknowns: int, variables: int, equations: Sequence[Sequence[Tuple[int, int, object]]],
                   **kw) -> "PDESystem":
        """Build from equations given as lists of (unknown, variable, coeff)."""
        a = [[[Fraction(0)] * variables for _ in range(unknowns)] for _ in equations]
        for m, terms in enumerate(equations):
            for i, j, c in terms:
                a[m][i][j] += Fraction(c)
        return cls(len(equations), unknowns, variables, a, **kw)

    def coeff(self, m: int, i: int, j: int) -> Fraction:
        return self.coeffs[m][i][j]

    def symbol(self, m: int, i: int) -> Poly:
        """Linear form sigma^m_i(xi) = sum_j a[m][i][j] xi_j."""
        return Poly(self.variables, {tuple(1 if t == j else 0 for t in range(self.variables)): v
                                     for j, v in enumerate(self.coeffs[m][i])})

    def restrict(self, cut: int) -> "PDESystem":
        """The system seen on jets depending only on x_{cut+1}, ..., x_n.

        Columns for the first ``cut`` variables are dropped; equations that
        become identically zero carry no condition and are removed.
        """
        if not 0 <= cut <= self.variables:
            raise ValueError(f"cut index {cut} out of range")
        kept = []
        for eq in self.coeffs:
            rows = [r[cut:] for r in eq]
            if any(v for r in rows for v in r):
                kept.append(rows)
        return PDESystem(len(kept), self.unknowns, self.variables - cut, kept,
                         label=f"{self.label}|x>{cut}" if self.label else "",
                         variable_names=self.variable_names[cut:], unknown_names=self.unknown_names)

    def equation_text(self, m: int) -> str:
        parts = []
        for i in range(self.unknowns):
            for j in range(self.variables):
                c = self.coeffs[m][i][j]
                if not c:
                    continue
                d = f"d{self.unknown_names[i]}/d{self.variable_names[j]}"
                if c == 1:
                    parts.append(d)
                elif c == -1:
                    parts.append("-" + d)
                else:
                    parts.append(f"{c}*{d}")
        return (" + ".join(parts)).replace("+ -", "- ") + " = 0"


def prolongation_matrix(sys: PDESystem, k: int) -> ExactMatrix:
    """Matrix of the system from degree-(k+1) jets to degree-k jets."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    n = sys.variables
    src = JetSpace(sys.unknowns, k + 1, n)
    dst = JetSpace(sys.equations, k, n)
    dst_idx = monomial_index(n, k)
    entries: Dict[Tuple[int, int], Fraction] = {}
    for col, (i, mono) in enumerate(src.basis()):
        for j, e in enumerate(mono):
            if not e:
                continue
            lower = mono[:j] + (e - 1,) + mono[j + 1:]
            r0 = dst_idx[lower]
            for m in range(sys.equations):
                a = sys.coeffs[m][i][j]
                if a:
                    key = (m * dst.block + r0, col)
                    entries[key] = entries.get(key, 0) + a * e
    return ExactMatrix(dst.dim, src.dim, entries)


def tableau_dim(sys: PDESystem, q: int) -> int:
    """dim A^q: homogeneous degree-(q+1) solutions of the system."""
    M = prolongation_matrix(sys, q)
    return M.ncols - rank(M)


def restricted_tableau_dim(sys: PDESystem, cut: int, q: int) -> int:
    if not 0 <= cut <= sys.variables - 1:
        raise ValueError(f"cut index must lie in [0, {sys.variables - 1}]")
    return tableau_dim(sys.restrict(cut), q)


# ---------------------------------------------------------------------------
# coordinate changes


def _invert(T: ExactMatrix) -> ExactMatrix:
    n = T.nrows
    aug = {**T.entries(), **{(i, n + i): 1 for i in range(n)}}
    R, r, pivots = rref(ExactMatrix(n, 2 * n, aug))
    if pivots[:n] != list(range(n)) or r != n:
        raise ValueError("coordinate change is singular")
    return ExactMatrix(n, n, {(i, c - n): v for (i, c), v in R.entries().items() if c >= n})


@dataclass(frozen=True)
class CoordinateChange:
    """Invertible linear substitution; new coordinates y satisfy x = T y."""

    matrix: ExactMatrix
    seed: Optional[int] = None
    inverse: ExactMatrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.matrix.nrows != self.matrix.ncols:
            raise ValueError("coordinate change must be square")
        object.__setattr__(self, "inverse", _invert(self.matrix))

    @property
    def n(self) -> int:
        return self.matrix.nrows

    @classmethod
    def identity(cls, n: int) -> "CoordinateChange":
        return cls(ExactMatrix.identity(n))

    @classmethod
    def random(cls, n: int, rng: random.Random, lo: int = -9, hi: int = 9, seed: Optional[int] = None) -> "CoordinateChange":
        while True:
            M = ExactMatrix.from_dense([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)], ncols=n)
            if rank(M) == n:
                return cls(M, seed=seed)

    def inverted(self) -> "CoordinateChange":
        return CoordinateChange(self.inverse)


def change_coordinates(sys: PDESystem, T: CoordinateChange) -> PDESystem:
    """System satisfied by P(T y) whenever P solves ``sys``.

    Coefficients transform as a' = a T^{-T}; applying T and then T^{-1}
    restores the original tensor exactly.
    """
    if T.n != sys.variables:
        raise ValueError("coordinate change has the wrong size")
    inv = T.inverse.to_dense()
    n = sys.variables
    new = []
    for eq in sys.coeffs:
        new.append([[sum((row[j] * inv[k][j] for j in range(n)), Fraction(0)) for k in range(n)] for row in eq])
    return PDESystem(sys.equations, sys.unknowns, n, new, label=sys.label,
                     variable_names=sys.variable_names, unknown_names=sys.unknown_names)
