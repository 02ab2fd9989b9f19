"""Graded syzygies of symbol matrices and the compatibility complex they generate.

A :class:`SymbolMatrix` is a matrix of homogeneous polynomials in the dual
variables xi.  Row m and column i carry degrees so that entry (m, i) is
homogeneous of degree ``row_degrees[m] - col_degrees[i]`` (first-order
systems: rows 1, columns 0).  Syzygies ``g`` with ``sum_m g_m * row_m = 0``
are found degree by degree as kernels of exact matrices; no Groebner bases.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .exactalg import EchelonBasis, ExactMatrix, kernel_basis, rank, rank_modp, row_space_equal
from .jets import PDESystem, jet_dim
from .poly import Monomial, Poly, mono_add, monomial_index, monomials

log = logging.getLogger(__name__)

DEFAULT_MAX_DEG = 4
DEFAULT_MODULAR_THRESHOLD = 2000
DEFAULT_SIZE_GUARD = 250_000


class SizeGuardError(RuntimeError):
    pass


class RationalFitError(ValueError):
    pass


@dataclass(frozen=True)
class SymbolMatrix:
    nvars: int
    entries: Tuple[Tuple[Poly, ...], ...]
    row_degrees: Tuple[int, ...]
    col_degrees: Tuple[int, ...]

    def __post_init__(self):
        ents = tuple(tuple(row) for row in self.entries)
        object.__setattr__(self, "entries", ents)
        object.__setattr__(self, "row_degrees", tuple(self.row_degrees))
        object.__setattr__(self, "col_degrees", tuple(self.col_degrees))
        if len(self.row_degrees) != len(ents):
            raise ValueError("one row degree per row required")
        for m, row in enumerate(ents):
            if len(row) != len(self.col_degrees):
                raise ValueError(f"row {m} has {len(row)} entries, expected {len(self.col_degrees)}")
            for i, p in enumerate(row):
                if p.nvars != self.nvars:
                    raise ValueError("entries must share the variable count")
                want = self.row_degrees[m] - self.col_degrees[i]
                if p and not p.is_homogeneous(want):
                    raise ValueError(f"entry ({m},{i}) is not homogeneous of degree {want}")

    @classmethod
    def from_system(cls, sys: PDESystem) -> "SymbolMatrix":
        rows = [[sys.symbol(m, i) for i in range(sys.unknowns)] for m in range(sys.equations)]
        return cls(sys.variables, rows, (1,) * sys.equations, (0,) * sys.unknowns)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Poly]], col_degrees: Optional[Sequence[int]] = None) -> "SymbolMatrix":
        """Infer row degrees from the first nonzero entry of each row."""
        nvars = next(p.nvars for row in rows for p in row)
        ncols = len(rows[0])
        col_degrees = tuple(col_degrees) if col_degrees is not None else (0,) * ncols
        degs = []
        for row in rows:
            d = next((p.degree() + col_degrees[i] for i, p in enumerate(row) if p), None)
            if d is None:
                raise ValueError("zero row")
            degs.append(d)
        return cls(nvars, rows, tuple(degs), col_degrees)

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.col_degrees)

    def order(self) -> int:
        """Highest entry degree, i.e. the differential order of the operator."""
        return max((p.degree() for row in self.entries for p in row if p), default=0)

    def orders(self) -> Tuple[int, ...]:
        return tuple(sorted({p.degree() for row in self.entries for p in row if p}))

    def __matmul__(self, other: "SymbolMatrix") -> List[List[Poly]]:
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in symbol product")
        out = []
        for row in self.entries:
            new = []
            for c in range(other.ncols):
                acc = Poly.zero(self.nvars)
                for k, p in enumerate(row):
                    if p and other.entries[k][c]:
                        acc = acc + p * other.entries[k][c]
                new.append(acc)
            out.append(new)
        return out

    def evaluate(self, point: Sequence[object]) -> ExactMatrix:
        return ExactMatrix.from_dense([[p.evaluate(point) for p in row] for row in self.entries], ncols=self.ncols)

    def generic_rank(self, rng: random.Random, trials: int = 2) -> int:
        """Rank over Q(xi), as the max of ranks at random integer points."""
        best = 0
        for _ in range(trials):
            pt = [rng.randint(-50, 50) for _ in range(self.nvars)]
            best = max(best, rank(self.evaluate(pt)))
        return best

    def row_text(self, m: int, names: Sequence[str], unknowns: Sequence[str]) -> str:
        """Render row m as a differential condition, e.g. ``d2(u1)/dx1dx2 - ... = 0``."""
        parts = []
        for i, p in enumerate(self.entries[m]):
            for mono, c in sorted(p.terms.items(), reverse=True):
                ds = "".join(f"d{names[j]}" * e for j, e in enumerate(mono) if e)
                order = sum(mono)
                op = f"d{order if order > 1 else ''}({unknowns[i]})/{ds}" if order else unknowns[i]
                if c == 1:
                    parts.append(f"+ {op}")
                elif c == -1:
                    parts.append(f"- {op}")
                else:
                    sign = "-" if c < 0 else "+"
                    parts.append(f"{sign} {abs(c)}*{op}")
        text = " ".join(parts).lstrip("+ ").strip()
        if text.startswith("- "):
            text = "-" + text[2:]
        return (text or "0") + " = 0"


def is_zero_matrix(rows: Sequence[Sequence[Poly]]) -> bool:
    return all(not p for row in rows for p in row)


# ---------------------------------------------------------------------------
# jet-level matrices


def _graded_layout(nvars: int, degrees: Sequence[int], top: int) -> List[Tuple[int, int, int]]:
    """(component, polynomial degree, offset) for each component at grade ``top``."""
    out = []
    off = 0
    for comp, d in enumerate(degrees):
        pd = top - d
        out.append((comp, pd, off))
        off += jet_dim(1, pd, nvars) if pd >= 0 else 0
    return out


def graded_dim(nvars: int, degrees: Sequence[int], top: int) -> int:
    return sum(jet_dim(1, top - d, nvars) for d in degrees if top - d >= 0)


def jet_matrix(S: SymbolMatrix, top: int) -> ExactMatrix:
    """Action of the operator p(d/dx) on jets of grade ``top``.

    Source component i holds homogeneous polynomials of degree
    ``top - col_degrees[i]``; target component m has degree ``top - row_degrees[m]``.
    """
    n = S.nvars
    src = _graded_layout(n, S.col_degrees, top)
    dst = _graded_layout(n, S.row_degrees, top)
    entries: Dict[Tuple[int, int], Fraction] = {}
    for m, (_, tdeg, toff) in enumerate(dst):
        if tdeg < 0:
            continue
        tidx = monomial_index(n, tdeg)
        for i, (_, sdeg, soff) in enumerate(src):
            p = S.entries[m][i]
            if not p or sdeg < 0:
                continue
            for k, mono in enumerate(monomials(n, sdeg)):
                for dmono, c in p.terms.items():
                    if any(a < b for a, b in zip(mono, dmono)):
                        continue
                    f = 1
                    for a, b in zip(mono, dmono):
                        for t in range(b):
                            f *= a - t
                    low = tuple(a - b for a, b in zip(mono, dmono))
                    key = (toff + tidx[low], soff + k)
                    entries[key] = entries.get(key, 0) + c * f
    return ExactMatrix(graded_dim(n, S.row_degrees, top), graded_dim(n, S.col_degrees, top), entries)


# ---------------------------------------------------------------------------
# syzygies


@dataclass
class GradedSyzygyStage:
    source: SymbolMatrix
    cutoff: int
    generators: Dict[int, List[Tuple[Poly, ...]]] = field(default_factory=dict)
    syzygy_dims: Dict[int, int] = field(default_factory=dict)

    def count(self, d: int) -> int:
        return len(self.generators.get(d, []))

    def all_generators(self) -> List[Tuple[int, Tuple[Poly, ...]]]:
        return [(d, g) for d in sorted(self.generators) for g in self.generators[d]]

    def is_empty(self) -> bool:
        return not any(self.generators.values())


def _candidate_layout(S: SymbolMatrix, D: int):
    """Components of the candidate space at internal degree D: g_m of degree D - row_degrees[m]."""
    return _graded_layout(S.nvars, S.row_degrees, D)


def _multiplication_matrix(S: SymbolMatrix, D: int) -> ExactMatrix:
    """Matrix of g -> sum_m g_m * row_m at internal degree D."""
    n = S.nvars
    src = _candidate_layout(S, D)
    dst = _graded_layout(n, S.col_degrees, D)
    entries: Dict[Tuple[int, int], Fraction] = {}
    for m, (_, gdeg, goff) in enumerate(src):
        if gdeg < 0:
            continue
        for i, (_, tdeg, toff) in enumerate(dst):
            p = S.entries[m][i]
            if not p or tdeg < 0:
                continue
            tidx = monomial_index(n, tdeg)
            for k, mono in enumerate(monomials(n, gdeg)):
                for pm, c in p.terms.items():
                    key = (toff + tidx[mono_add(mono, pm)], goff + k)
                    entries[key] = entries.get(key, 0) + c
    return ExactMatrix(graded_dim(n, S.col_degrees, D), graded_dim(n, S.row_degrees, D), entries)


def _vector_to_tuple(S: SymbolMatrix, D: int, vec: Dict[int, Fraction]) -> Tuple[Poly, ...]:
    n = S.nvars
    out = []
    for m, (_, gdeg, goff) in enumerate(_candidate_layout(S, D)):
        if gdeg < 0:
            out.append(Poly.zero(n))
            continue
        mons = monomials(n, gdeg)
        size = len(mons)
        out.append(Poly(n, {mons[c - goff]: v for c, v in vec.items() if goff <= c < goff + size}))
    return tuple(out)


def _tuple_to_vector(S: SymbolMatrix, D: int, g: Sequence[Poly]) -> Dict[int, Fraction]:
    vec = {}
    for m, (_, gdeg, goff) in enumerate(_candidate_layout(S, D)):
        if not g[m]:
            continue
        idx = monomial_index(S.nvars, gdeg)
        for mono, c in g[m].terms.items():
            vec[goff + idx[mono]] = c
    return vec


def syzygy_generators(S: SymbolMatrix, max_deg: int = DEFAULT_MAX_DEG) -> GradedSyzygyStage:
    """Minimal syzygy generators of the rows of S, relative degrees 1..max_deg.

    Relative degree d means internal degree ``d + max(row_degrees)``; for
    uniform row degrees it is the polynomial degree of each g_m.
    """
    if max_deg < 1:
        raise ValueError("max_deg must be >= 1")
    stage = GradedSyzygyStage(S, max_deg)
    if S.nrows == 0:
        return stage
    base = max(S.row_degrees)
    found: List[Tuple[int, Tuple[Poly, ...]]] = []  # (internal degree, generator)
    for d in range(0, max_deg + 1):
        D = d + base
        M = _multiplication_matrix(S, D)
        K = kernel_basis(M)
        stage.syzygy_dims[d] = K.ncols
        if K.ncols == 0:
            continue
        echelon = EchelonBasis()
        for D0, g in found:
            for mu in monomials(S.nvars, D - D0):
                mp = Poly(S.nvars, {mu: 1})
                echelon.add(_tuple_to_vector(S, D, [mp * x if x else x for x in g]))
        lower = len(echelon)
        cols: Dict[int, Dict[int, Fraction]] = {}
        for (r, c), v in K.entries().items():
            cols.setdefault(c, {})[r] = v
        new = []
        for c in range(K.ncols):
            if echelon.add(cols.get(c, {})):
                new.append(_vector_to_tuple(S, D, cols[c]))
        assert lower + len(new) == K.ncols, "syzygy space not spanned by lower multiples plus new generators"
        if new:
            if d == 0:
                log.warning("degree-0 syzygies: rows of the symbol are linearly dependent over Q")
            stage.generators[d] = new
            found.extend((D, g) for g in new)
    return stage


def _as_symbol(obj: Union[PDESystem, SymbolMatrix]) -> SymbolMatrix:
    return SymbolMatrix.from_system(obj) if isinstance(obj, PDESystem) else obj


def stage_matrix(stage: GradedSyzygyStage) -> Optional[SymbolMatrix]:
    gens = stage.all_generators()
    if not gens:
        return None
    S = stage.source
    base = max(S.row_degrees)
    rows = [list(g) for _, g in gens]
    return SymbolMatrix(S.nvars, rows, tuple(d + base for d, _ in gens), S.row_degrees)


def compatibility_operator(sys: Union[PDESystem, SymbolMatrix], max_deg: int = DEFAULT_MAX_DEG) -> Optional[SymbolMatrix]:
    """Stack the minimal syzygies of the symbol as the rows of a new operator."""
    S = _as_symbol(sys)
    out = stage_matrix(syzygy_generators(S, max_deg))
    if out is not None:
        assert is_zero_matrix(out @ S)
    return out


@dataclass
class ComplexChain:
    operators: List[SymbolMatrix]
    stages: List[GradedSyzygyStage]
    cutoff_reached: bool
    terminated: bool
    notes: List[str] = field(default_factory=list)

    @property
    def orders(self) -> List[int]:
        return [op.order() for op in self.operators]

    @property
    def sizes(self) -> List[int]:
        if not self.operators:
            return []
        return [self.operators[0].ncols] + [op.nrows for op in self.operators]

    def __len__(self) -> int:
        return len(self.operators)


def build_complex(sys: Union[PDESystem, SymbolMatrix], max_deg: int = DEFAULT_MAX_DEG,
                  max_len: Optional[int] = None, seed: int = 0) -> ComplexChain:
    """Iterate compatibility operators until no syzygies remain.

    A stage with no syzygies up to ``max_deg`` ends the chain.  The end is
    certified when the last symbol has full row rank over Q(xi); otherwise
    ``cutoff_reached`` is set because generators may sit above the cutoff.
    """
    S = _as_symbol(sys)
    n = S.nvars
    if max_len is None:
        max_len = n + 1
    if max_len > n + 1:
        raise ValueError(f"max_len must be <= n+1 = {n + 1}")
    rng = random.Random(seed)
    ops = [S]
    stages: List[GradedSyzygyStage] = []
    notes: List[str] = []
    cutoff = False
    terminated = False
    while True:
        cur = ops[-1]
        if cur.generic_rank(rng) == cur.nrows:
            terminated = True
            notes.append(f"stage {len(ops)}: symbol has full row rank, no syzygies at any degree")
            break
        if len(ops) >= max_len:
            cutoff = True
            notes.append(f"cutoff reached: chain length limit {max_len} hit with syzygies remaining")
            break
        stage = syzygy_generators(cur, max_deg)
        stages.append(stage)
        nxt = stage_matrix(stage)
        if nxt is None:
            cutoff = True
            notes.append(f"cutoff reached: stage {len(ops)} has syzygies but none up to degree {max_deg}; "
                         "chain possibly incomplete")
            break
        if stage.count(max_deg):
            cutoff = True
            notes.append(f"cutoff reached: stage {len(ops)} has generators at the cutoff degree {max_deg}; "
                         "chain possibly incomplete")
        if not is_zero_matrix(nxt @ cur):
            raise AssertionError("consecutive operators do not compose to zero")
        ops.append(nxt)
    return ComplexChain(ops, stages, cutoff, terminated, notes)


# ---------------------------------------------------------------------------
# jet-level exactness


@dataclass
class SlotReport:
    dim: int
    rank_in: int
    rank_out: int
    exact: Optional[bool]

    @property
    def kernel(self) -> int:
        return self.dim - self.rank_out


@dataclass
class ExactnessReport:
    k: int
    slots: List[SlotReport]
    ranks: List[int]
    modular: List[bool]
    prime_trials: int

    @property
    def all_exact(self) -> bool:
        return all(s.exact is not False for s in self.slots)


def operator_rank(M: ExactMatrix, modular_threshold: int, prime_trials: int,
                  rng: random.Random) -> Tuple[int, bool]:
    if max(M.shape) > modular_threshold:
        return rank_modp(M, trials=prime_trials, rng=rng), True
    return rank(M), False


def exactness_check(ops: Union[ComplexChain, Sequence[SymbolMatrix]], k: int,
                    modular_threshold: int = DEFAULT_MODULAR_THRESHOLD, prime_trials: int = 2,
                    seed: int = 0, size_guard: int = DEFAULT_SIZE_GUARD) -> ExactnessReport:
    """Ranks of the jet-level maps whose last target has polynomial degree k."""
    if isinstance(ops, ComplexChain):
        ops = ops.operators
    ops = list(ops)
    if k < 0:
        raise ValueError("k must be non-negative")
    top = k + max(ops[-1].row_degrees)
    mats = [jet_matrix(op, top) for op in ops]
    biggest = max(max(M.shape) for M in mats)
    if biggest > size_guard:
        raise SizeGuardError(f"jet matrix dimension {biggest} exceeds the size guard {size_guard}")
    rng = random.Random(seed)
    ranks, modular = [], []
    for M in mats:
        r, mod = operator_rank(M, modular_threshold, prime_trials, rng)
        ranks.append(r)
        modular.append(mod)
    dims = [mats[0].ncols] + [M.nrows for M in mats]
    slots = []
    for s, dim in enumerate(dims):
        rin = ranks[s - 1] if s > 0 else 0
        rout = ranks[s] if s < len(ranks) else 0
        if s == 0:
            exact = None
        elif s == len(dims) - 1:
            exact = rin == dim
        else:
            exact = dim - rout == rin
        slots.append(SlotReport(dim, rin, rout, exact))
    return ExactnessReport(k, slots, ranks, modular, prime_trials)


# ---------------------------------------------------------------------------
# Hilbert-Poincare series


@dataclass(frozen=True)
class RationalSeries:
    numerator: Tuple[Fraction, ...]
    denominator: Tuple[Fraction, ...]
    verified_terms: int

    def taylor(self, nterms: int) -> List[Fraction]:
        q0 = self.denominator[0]
        out: List[Fraction] = []
        for i in range(nterms):
            acc = self.numerator[i] if i < len(self.numerator) else Fraction(0)
            for j in range(1, min(i, len(self.denominator) - 1) + 1):
                acc -= self.denominator[j] * out[i - j]
            out.append(acc / q0)
        return out

    def one_minus_z_power(self) -> Tuple[int, Tuple[Fraction, ...]]:
        """Split the denominator as (1-z)^e * rest."""
        den = list(self.denominator)
        e = 0
        while len(den) > 1 and sum(den) == 0:
            # synthetic division by (1 - z)
            quo = []
            acc = Fraction(0)
            for c in den[:-1]:
                acc += c
                quo.append(acc)
            den = quo
            e += 1
        return e, tuple(den)

    def __str__(self) -> str:
        num = _poly_text(self.numerator)
        e, rest = self.one_minus_z_power()
        pieces = []
        if len(rest) > 1 or rest[0] != 1:
            pieces.append(f"({_poly_text(rest)})")
        if e == 1:
            pieces.append("(1-z)")
        elif e > 1:
            pieces.append(f"(1-z)^{e}")
        if not pieces:
            return num
        return f"({num})/" + "*".join(pieces) if len(self.numerator) > 1 else f"{num}/" + "*".join(pieces)


def _poly_text(coeffs: Sequence[Fraction]) -> str:
    parts = []
    for i, c in enumerate(coeffs):
        if not c:
            continue
        mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
        mag = abs(c)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}{mono}")
        parts.append(("- " if c < 0 else "+ ") + body)
    if not parts:
        return "0"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def _berlekamp_massey(seq: Sequence[Fraction]) -> Tuple[List[Fraction], int]:
    C = [Fraction(1)]
    B = [Fraction(1)]
    L, m, b = 0, 1, Fraction(1)
    for n, s in enumerate(seq):
        d = s + sum((C[i] * seq[n - i] for i in range(1, L + 1) if i < len(C)), Fraction(0))
        if d == 0:
            m += 1
            continue
        coef = d / b
        newC = C + [Fraction(0)] * max(0, len(B) + m - len(C))
        for i, x in enumerate(B):
            newC[i + m] -= coef * x
        if 2 * L <= n:
            B, L, b, m = C, n + 1 - L, d, 1
        else:
            m += 1
        C = newC
    while len(C) > 1 and C[-1] == 0:
        C.pop()
    return C, L


def hilbert_series(dims: Sequence[int], max_order: Optional[int] = None) -> RationalSeries:
    """Rational generating function of ``dims`` by exact recurrence fitting.

    Needs at least ``2 * max_order`` terms (default order: half the terms);
    raises RationalFitError if no recurrence of order <= max_order reproduces
    every term.
    """
    seq = [Fraction(x) for x in dims]
    if max_order is None:
        max_order = len(seq) // 2
    if max_order < 0 or len(seq) < max(1, 2 * max_order):
        raise ValueError(f"need at least {2 * max_order} terms for recurrence order {max_order}")
    C, L = _berlekamp_massey(seq)
    if L > max_order or 2 * L > len(seq):
        raise RationalFitError(f"no rational fit within bound: recurrence order {L} exceeds {max_order}")
    num = []
    for i in range(L):
        num.append(sum((C[j] * seq[i - j] for j in range(len(C)) if j <= i), Fraction(0)))
    while num and num[-1] == 0:
        num.pop()
    series = RationalSeries(tuple(num) or (Fraction(0),), tuple(C), len(seq))
    if series.taylor(len(seq)) != seq:
        raise RationalFitError("no rational fit within bound: resummation does not reproduce the input")
    return series


def relation_matrix(S: SymbolMatrix, D: int, relations: Sequence[Sequence[Poly]]) -> ExactMatrix:
    """Coordinates of relations on the rows of S (degree-D candidates), one matrix row each."""
    vecs = [_tuple_to_vector(S, D, g) for g in relations]
    return ExactMatrix(len(vecs), graded_dim(S.nvars, S.row_degrees, D),
                       {(r, c): v for r, vec in enumerate(vecs) for c, v in vec.items()})


def same_relations(S: SymbolMatrix, D: int, A: Sequence[Sequence[Poly]], B: Sequence[Sequence[Poly]]) -> bool:
    """Whether two families of degree-D relations on S span the same space."""
    return row_space_equal(relation_matrix(S, D, A), relation_matrix(S, D, B))
