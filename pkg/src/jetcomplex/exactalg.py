"""Exact linear algebra over Q and GF(p), plus binomial bookkeeping.

Matrices are sparse: each row is a ``{col: Fraction}`` dict holding only
nonzero entries.  Rank and row reduction split the matrix into the connected
components of its row/column incidence graph first; jet-space matrices of
constant-coefficient operators decompose into many small blocks this way.
"""

from __future__ import annotations

import heapq
import math
import random
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from sympy import nextprime

Row = Dict[int, Fraction]

PRIME_FLOOR = 1 << 20
DEFAULT_PRIME_BITS = 62


class ExactMatrix:
    """Immutable sparse matrix with rational entries."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, entries: Optional[Mapping[Tuple[int, int], object]] = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.nrows = nrows
        self.ncols = ncols
        rows: Dict[int, Row] = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError(f"entry ({r}, {c}) outside {nrows}x{ncols}")
            v = Fraction(v)
            if v:
                rows.setdefault(r, {})[c] = v
        self._rows = rows

    @classmethod
    def from_rows(cls, nrows: int, ncols: int, rows: Mapping[int, Mapping[int, object]]) -> "ExactMatrix":
        return cls(nrows, ncols, {(r, c): v for r, row in rows.items() for c, v in row.items()})

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[object]], ncols: Optional[int] = None) -> "ExactMatrix":
        nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if nrows else 0
        return cls(nrows, ncols, {(r, c): v for r, row in enumerate(data) for c, v in enumerate(row)})

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "ExactMatrix":
        return cls(nrows, ncols)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def row(self, r: int) -> Row:
        return dict(self._rows.get(r, {}))

    def rows(self) -> Iterator[Tuple[int, Row]]:
        for r in sorted(self._rows):
            yield r, dict(self._rows[r])

    def entries(self) -> Dict[Tuple[int, int], Fraction]:
        return {(r, c): v for r, row in self._rows.items() for c, v in row.items()}

    def nnz(self) -> int:
        return sum(len(row) for row in self._rows.values())

    def __getitem__(self, rc: Tuple[int, int]) -> Fraction:
        r, c = rc
        return self._rows.get(r, {}).get(c, Fraction(0))

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for r, row in self._rows.items():
            for c, v in row.items():
                out[r][c] = v
        return out

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.ncols, self.nrows, {(c, r): v for (r, c), v in self.entries().items()})

    def column(self, c: int) -> List[Fraction]:
        return [self[r, c] for r in range(self.nrows)]

    def columns(self) -> List[List[Fraction]]:
        dense = self.to_dense()
        return [[dense[r][c] for r in range(self.nrows)] for c in range(self.ncols)]

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out: Dict[Tuple[int, int], Fraction] = {}
        for r, row in self._rows.items():
            for k, a in row.items():
                for c, b in other._rows.get(k, {}).items():
                    out[r, c] = out.get((r, c), Fraction(0)) + a * b
        return ExactMatrix(self.nrows, other.ncols, out)

    def apply(self, vec: Sequence[object]) -> List[Fraction]:
        if len(vec) != self.ncols:
            raise ValueError("vector length does not match column count")
        out = [Fraction(0)] * self.nrows
        for r, row in self._rows.items():
            out[r] = sum((v * Fraction(vec[c]) for c, v in row.items()), Fraction(0))
        return out

    def is_zero(self) -> bool:
        return not self._rows

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.shape, frozenset(self.entries().items())))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


# ---------------------------------------------------------------------------
# block decomposition


def _components(rows: Mapping[int, Mapping[int, object]]) -> List[List[int]]:
    """Group row ids into connected components (rows sharing a column)."""
    parent: Dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    col_owner: Dict[int, int] = {}
    for r, row in rows.items():
        if not row:
            continue
        parent.setdefault(r, r)
        for c in row:
            other = col_owner.get(c)
            if other is None:
                col_owner[c] = r
            else:
                a, b = find(r), find(other)
                if a != b:
                    parent[a] = b
    groups: Dict[int, List[int]] = {}
    for r in parent:
        groups.setdefault(find(r), []).append(r)
    return [sorted(g) for g in groups.values()]


# ---------------------------------------------------------------------------
# rank: fraction-free integer elimination with a Markowitz-style pivot rule


def _integer_row(row: Mapping[int, Fraction]) -> Dict[int, int]:
    den = 1
    for v in row.values():
        den = den * v.denominator // math.gcd(den, v.denominator)
    out = {c: int(v * den) for c, v in row.items()}
    return _primitive(out)


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def _eliminate_block(rows: List[Dict[int, int]], combine) -> int:
    """Generic sparse forward elimination; ``combine`` folds the pivot into a row.

    Pivot choice: the live row with fewest entries, and within it the column
    touched by the fewest live rows.
    """
    live: Dict[int, Dict[int, int]] = {i: r for i, r in enumerate(rows) if r}
    col_rows: Dict[int, set] = {}
    for i, r in live.items():
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    heap = [(len(r), i) for i, r in live.items()]
    heapq.heapify(heap)
    rank = 0
    while heap:
        size, i = heapq.heappop(heap)
        row = live.get(i)
        if row is None or len(row) != size:
            continue
        if not row:
            del live[i]
            continue
        col = min(row, key=lambda c: (len(col_rows[c]), c))
        del live[i]
        for c in row:
            col_rows[c].discard(i)
        rank += 1
        for j in list(col_rows[col]):
            target = live[j]
            for c in target:
                col_rows[c].discard(j)
            new = combine(target, row, col)
            live[j] = new
            for c in new:
                col_rows.setdefault(c, set()).add(j)
            heapq.heappush(heap, (len(new), j))
    return rank


def _combine_int(target: Dict[int, int], pivot: Dict[int, int], col: int) -> Dict[int, int]:
    a = pivot[col]
    b = target[col]
    g = math.gcd(a, b)
    fa, fb = a // g, b // g
    out = {c: v * fa for c, v in target.items()}
    for c, v in pivot.items():
        nv = out.get(c, 0) - fb * v
        if nv:
            out[c] = nv
        else:
            out.pop(c, None)
    out.pop(col, None)
    return _primitive(out)


def rank(M: ExactMatrix) -> int:
    """Exact rank over Q."""
    total = 0
    rows = dict(M.rows())
    for block in _components(rows):
        total += _eliminate_block([_integer_row(rows[r]) for r in block], _combine_int)
    return total


# ---------------------------------------------------------------------------
# reduced row echelon form over Q


def _rref_block(rows: List[Row]) -> List[Tuple[int, Row]]:
    """Fully reduced echelon rows of one block, as (pivot col, row) pairs."""
    live: Dict[int, Row] = {i: dict(r) for i, r in enumerate(rows) if r}
    col_rows: Dict[int, set] = {}
    for i, r in live.items():
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    pivots: Dict[int, int] = {}
    used: set = set()
    for col in sorted(col_rows):
        cands = [i for i in col_rows[col] if i not in used]
        if not cands:
            continue
        p = min(cands, key=lambda i: (len(live[i]), i))
        prow = live[p]
        inv = 1 / prow[col]
        prow = {c: v * inv for c, v in prow.items()}
        live[p] = prow
        pivots[col] = p
        used.add(p)
        for j in list(col_rows[col]):
            if j == p:
                continue
            target = live[j]
            f = target[col]
            for c, v in prow.items():
                nv = target.get(c, 0) - f * v
                if nv:
                    if c not in target:
                        col_rows.setdefault(c, set()).add(j)
                    target[c] = nv
                else:
                    target.pop(c, None)
                    col_rows[c].discard(j)
    return sorted(((col, live[p]) for col, p in pivots.items()), key=lambda t: t[0])


def rref(M: ExactMatrix) -> Tuple[ExactMatrix, int, List[int]]:
    """Reduced row-echelon form over Q: (matrix, rank, pivot columns)."""
    rows = dict(M.rows())
    reduced: List[Tuple[int, Row]] = []
    for block in _components(rows):
        reduced.extend(_rref_block([rows[r] for r in block]))
    reduced.sort(key=lambda t: t[0])
    out = ExactMatrix.from_rows(M.nrows, M.ncols, {i: row for i, (_, row) in enumerate(reduced)})
    return out, len(reduced), [c for c, _ in reduced]


def kernel_basis(M: ExactMatrix) -> ExactMatrix:
    """Null-space basis; column ``k`` of the result is the k-th basis vector."""
    R, r, pivots = rref(M)
    pivot_set = set(pivots)
    free = [c for c in range(M.ncols) if c not in pivot_set]
    free_pos = {c: k for k, c in enumerate(free)}
    entries: Dict[Tuple[int, int], Fraction] = {}
    for c in free:
        entries[c, free_pos[c]] = Fraction(1)
    for i, (_, row) in enumerate(R.rows()):
        pc = pivots[i]
        for c, v in row.items():
            if c in free_pos:
                entries[pc, free_pos[c]] = -v
    K = ExactMatrix(M.ncols, len(free), entries)
    assert r + K.ncols == M.ncols
    return K


def solve(M: ExactMatrix, rhs: Sequence[object]) -> Optional[List[Fraction]]:
    """One solution of ``M x = rhs`` with zeros in free positions, or None."""
    if len(rhs) != M.nrows:
        raise ValueError("right-hand side length does not match row count")
    aug = dict(M.rows())
    b = M.ncols
    for r, v in enumerate(rhs):
        v = Fraction(v)
        if v:
            aug.setdefault(r, {})[b] = v
    R, _, pivots = rref(ExactMatrix.from_rows(M.nrows, M.ncols + 1, aug))
    if b in pivots:
        return None
    x = [Fraction(0)] * M.ncols
    for i, (_, row) in enumerate(R.rows()):
        x[pivots[i]] = row.get(b, Fraction(0))
    return x


def row_space_equal(A: ExactMatrix, B: ExactMatrix) -> bool:
    """True iff A and B (same column count) have identical row spaces."""
    if A.ncols != B.ncols:
        raise ValueError("column counts differ")
    ra, rb = rank(A), rank(B)
    if ra != rb:
        return False
    stacked = ExactMatrix(A.nrows + B.nrows, A.ncols,
                          {**A.entries(), **{(r + A.nrows, c): v for (r, c), v in B.entries().items()}})
    return rank(stacked) == ra


# ---------------------------------------------------------------------------
# modular rank


class PrimeSelectionError(RuntimeError):
    pass


def random_prime(rng: random.Random, bits: int = DEFAULT_PRIME_BITS) -> int:
    lo = (1 << bits) - (1 << (bits - 20))
    return int(nextprime(rng.randrange(lo, 1 << bits)))


def _reduce_rows(M: ExactMatrix, p: int) -> Optional[List[Dict[int, int]]]:
    rows = []
    for _, row in M.rows():
        out = {}
        for c, v in row.items():
            if v.denominator % p == 0:
                return None
            x = v.numerator * pow(v.denominator, -1, p) % p
            if x:
                out[c] = x
        rows.append(out)
    return rows


def _rank_mod(rows: List[Dict[int, int]], p: int) -> int:
    def combine(target, pivot, col):
        f = target[col] * pow(pivot[col], -1, p) % p
        out = dict(target)
        for c, v in pivot.items():
            nv = (out.get(c, 0) - f * v) % p
            if nv:
                out[c] = nv
            else:
                out.pop(c, None)
        out.pop(col, None)
        return out

    total = 0
    as_map = dict(enumerate(rows))
    for block in _components(as_map):
        total += _eliminate_block([as_map[r] for r in block], combine)
    return total


def rank_mod_prime(M: ExactMatrix, p: int) -> Optional[int]:
    """Rank of M reduced mod p, or None if a denominator vanishes mod p."""
    rows = _reduce_rows(M, p)
    return None if rows is None else _rank_mod(rows, p)


def rank_modp(M: ExactMatrix, prime: Optional[int] = None, trials: int = 2,
              rng: Optional[random.Random] = None, max_attempts: int = 20) -> int:
    """Rank estimate from reductions modulo large primes.

    Each trial is a lower bound for the rational rank; the maximum is
    returned.  If trials disagree one extra trial is run.  ``prime``, when
    given, is used for the first trial.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if prime is not None and prime <= PRIME_FLOOR:
        raise ValueError(f"prime must exceed 2^20, got {prime}")
    rng = rng or random.Random(0)

    def one_trial(first: bool) -> int:
        candidate = prime if (first and prime is not None) else None
        for _ in range(max_attempts):
            p = candidate if candidate is not None else random_prime(rng)
            candidate = None
            rows = _reduce_rows(M, p)
            if rows is not None:
                return _rank_mod(rows, p)
        raise PrimeSelectionError(f"no usable prime after {max_attempts} attempts")

    results = [one_trial(i == 0) for i in range(trials)]
    if len(set(results)) > 1:
        results.append(one_trial(False))
    return max(results)


# ---------------------------------------------------------------------------
# binomials


@lru_cache(maxsize=None)
def choose(b: int, a: int) -> int:
    """``b`` choose ``a``; zero outside 0 <= a <= b.

    The literature's C^a_b notation means choose(b, a).
    """
    if a < 0 or b < 0 or a > b:
        return 0
    return math.comb(b, a)


class BinomialTable:
    """Cached Pascal triangle up to a fixed row."""

    def __init__(self, size: int):
        self.size = size
        self._rows: List[List[int]] = [[1]]
        for b in range(1, size + 1):
            prev = self._rows[-1]
            self._rows.append([1] + [prev[a - 1] + prev[a] for a in range(1, b)] + [1])

    def __call__(self, b: int, a: int) -> int:
        if a < 0 or b < 0 or a > b:
            return 0
        if b > self.size:
            return choose(b, a)
        return self._rows[b][a]

    def pascal_ok(self) -> bool:
        return all(self(b, a) == self(b - 1, a - 1) + self(b - 1, a)
                   for b in range(1, self.size + 1) for a in range(0, b + 1))


# The six summation identities used for the tableau-dimension count.  Each
# entry: (parameter names, side condition, direct sum, closed form).
def _sum(rng: Iterable[int], f) -> int:
    return sum(f(s) for s in rng)


BINOMIAL_IDENTITIES = {
    1: (("a", "q"),
        lambda a, q: True,
        lambda a, q: _sum(range(q + 1), lambda s: choose(a + s, a)),
        lambda a, q: choose(a + q + 1, a + 1)),
    2: (("a", "p", "q"),
        lambda a, p, q: p <= q,
        lambda a, p, q: _sum(range(p, q + 1), lambda s: choose(a + s, a)),
        lambda a, p, q: choose(a + q + 1, a + 1) - choose(a + p, a + 1)),
    3: (("a", "b", "q"),
        lambda a, b, q: True,
        lambda a, b, q: _sum(range(q + 1), lambda s: choose(a + s, b)),
        lambda a, b, q: choose(a + q + 1, b + 1) - choose(a, b + 1)),
    4: (("a", "q"),
        lambda a, q: True,
        lambda a, q: _sum(range(q + 1), lambda s: (s + 1) * choose(a + s, a)),
        lambda a, q: (a + 1) * choose(a + q + 1, a + 2) + choose(a + q + 1, a + 1)),
    5: (("a", "b", "q"),
        lambda a, b, q: a >= b + 2,
        lambda a, b, q: _sum(range(q + 1), lambda s: (s + 1) * choose(a + s, b)),
        lambda a, b, q: ((b + 1) * (choose(a + q + 1, b + 2) - choose(a, b + 2))
                         + (b - a + 1) * (choose(a + q + 1, b + 1) - choose(a, b + 1)))),
    6: (("a", "b", "d"),
        lambda a, b, d: d <= b,
        lambda a, b, d: _sum(range(d + 1), lambda s: choose(a + s, a) * choose(b - s, b - d)),
        lambda a, b, d: choose(a + b + 1, a + b + 1 - d)),
}


def identity_sides(identity_id: int, *params: int) -> Tuple[int, int]:
    """(direct summation, closed form) for one of the six identities."""
    if identity_id not in BINOMIAL_IDENTITIES:
        raise ValueError(f"identity id must be 1..6, got {identity_id}")
    names, side, direct, closed = BINOMIAL_IDENTITIES[identity_id]
    if len(params) != len(names):
        raise ValueError(f"identity {identity_id} takes parameters {names}")
    if any(p < 0 for p in params) or not side(*params):
        raise ValueError(f"parameters {dict(zip(names, params))} violate the side condition of identity {identity_id}")
    return direct(*params), closed(*params)


def lemma23_check(identity_id: int, *params: int) -> bool:
    lhs, rhs = identity_sides(identity_id, *params)
    return lhs == rhs


class EchelonBasis:
    """Incrementally grown echelon basis of sparse rational vectors."""

    def __init__(self):
        self._rows: Dict[int, Row] = {}  # pivot column -> row with 1 at pivot

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vec: Mapping[int, object]) -> Row:
        v = {c: Fraction(x) for c, x in vec.items() if x}
        while v:
            hit = [c for c in v if c in self._rows]
            if not hit:
                break
            c = min(hit)
            f = v[c]
            for cc, x in self._rows[c].items():
                nv = v.get(cc, 0) - f * x
                if nv:
                    v[cc] = nv
                else:
                    v.pop(cc, None)
        return v

    def add(self, vec: Mapping[int, object]) -> bool:
        """Insert ``vec``; False if it already lies in the span."""
        v = self.reduce(vec)
        if not v:
            return False
        c = min(v)
        inv = 1 / v[c]
        v = {cc: x * inv for cc, x in v.items()}
        for pc, row in self._rows.items():
            f = row.get(c)
            if f:
                for cc, x in v.items():
                    nv = row.get(cc, 0) - f * x
                    if nv:
                        row[cc] = nv
                    else:
                        row.pop(cc, None)
        self._rows[c] = v
        return True

    def contains(self, vec: Mapping[int, object]) -> bool:
        return not self.reduce(vec)
