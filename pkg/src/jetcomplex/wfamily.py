"""The two-unknown family  d phi0/dz^{j0,0} + d phi1/dz^{j,1} = varphi^{j0,j}.

Variables are ordered z^{1,0}, ..., z^{n,0}, z^{1,1}, ..., z^{m,1} (1-based
labels, 0-based positions).  Equations are ordered by increasing j.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .exactalg import choose
from .jets import PDESystem, tableau_dim
from .poly import Poly, unit

Pair = Tuple[int, int]


class IndexSetError(ValueError):
    pass


@dataclass(frozen=True)
class IndexSet:
    n: int
    m: int
    pairs: Tuple[Pair, ...]

    def __post_init__(self):
        pairs = tuple(sorted(set(map(tuple, self.pairs)), key=lambda p: (p[1], p[0])))
        if not pairs:
            raise IndexSetError("index set is empty")
        for j0, j in pairs:
            if not (1 <= j0 <= self.n and 1 <= j <= self.m):
                raise IndexSetError(f"pair ({j0},{j}) outside [1,{self.n}]x[1,{self.m}]")
        js = [j for _, j in pairs]
        j0s = [j0 for j0, _ in pairs]
        if len(set(js)) != len(js):
            dup = sorted({j for j in js if js.count(j) > 1})
            raise IndexSetError(
                f"pairs share j={dup}: two equations with the same dphi1/dz^(j,1) term differ by a "
                "derivative of phi0 only, so one is redundant; keep a single pair per j")
        if len(set(j0s)) != len(j0s):
            dup = sorted({j0 for j0 in j0s if j0s.count(j0) > 1})
            raise IndexSetError(
                f"pairs share j0={dup}: the same redundancy argument applies with the roles of "
                "phi0 and phi1 exchanged; keep a single pair per j0")
        object.__setattr__(self, "pairs", pairs)

    @property
    def t(self) -> int:
        return len(self.pairs)

    @property
    def j1_set(self) -> Tuple[int, ...]:
        return tuple(j for _, j in self.pairs)

    @property
    def j0_set(self) -> Tuple[int, ...]:
        return tuple(sorted(j0 for j0, _ in self.pairs))

    def b(self, j: int) -> int:
        """The j0 paired with j."""
        for j0, jj in self.pairs:
            if jj == j:
                return j0
        raise KeyError(j)

    def var0(self, i: int) -> int:
        return i - 1

    def var1(self, j: int) -> int:
        return self.n + j - 1


@dataclass(frozen=True)
class WSystem:
    base: PDESystem
    index_set: IndexSet


def variable_names(n: int, m: int) -> Tuple[str, ...]:
    return tuple(f"z{i}0" for i in range(1, n + 1)) + tuple(f"z{j}1" for j in range(1, m + 1))


def make_wsystem(n: int, m: int, pairs: Iterable[Pair], label: Optional[str] = None,
                 names: Optional[Sequence[str]] = None) -> WSystem:
    idx = IndexSet(n, m, tuple(pairs))
    eqs = [[(0, idx.var0(j0), 1), (1, idx.var1(j), 1)] for j0, j in idx.pairs]
    base = PDESystem.from_terms(2, n + m, eqs,
                                label=label or f"wfamily:{n},{m},{list(idx.pairs)}",
                                variable_names=tuple(names) if names else variable_names(n, m),
                                unknown_names=("phi0", "phi1"))
    return WSystem(base, idx)


def canonical_pairs(n: int, m: int, t: int) -> Tuple[Pair, ...]:
    """The relabelled index set {(n-k, m-k): k = 0..t-1}."""
    return tuple((n - k, m - k) for k in range(t))


def canonical(ws: WSystem) -> WSystem:
    idx = ws.index_set
    return make_wsystem(idx.n, idx.m, canonical_pairs(idx.n, idx.m, idx.t))


def _check_range(n: int, m: int, t: int, q: int) -> None:
    if not (1 <= t <= min(n, m)):
        raise ValueError(f"need 1 <= t <= min(n, m); got n={n}, m={m}, t={t}")
    if q < 0:
        raise ValueError("q must be non-negative")


def wdim_formula(n: int, m: int, t: int, q: int) -> int:
    """Closed-form dim A^q:  t*C(q+m+n-t, m+n-t) + 2*C(q+m+n-t, m+n-t-1)."""
    _check_range(n, m, t, q)
    top = q + m + n - t
    return t * choose(top, m + n - t) + 2 * choose(top, m + n - t - 1)


def formula_validated(n: int, m: int, t: int) -> bool:
    """Whether the binomial census behind the closed form applies (m+n-2t-1 >= 0)."""
    return m + n - 2 * t - 1 >= 0


def wdim(n: int, m: int, t: int, q: int) -> Tuple[int, bool]:
    """dim A^q with a flag telling whether the closed form was used.

    Outside the census range the kernel is computed directly instead.
    """
    _check_range(n, m, t, q)
    if formula_validated(n, m, t):
        return wdim_formula(n, m, t, q), True
    return tableau_dim(make_wsystem(n, m, canonical_pairs(n, m, t)).base, q), False


@dataclass(frozen=True)
class TorsionCondition:
    triple: Tuple[int, int, int]
    row: Tuple[Poly, ...]  # symbol entry per equation (ordered as the system's equations)
    expression: str


def torsion_row(ws: WSystem, triple: Tuple[int, int, int]) -> Tuple[Poly, ...]:
    """Symbol row of the condition attached to an ordered triple of j-labels.

    Permuting the triple multiplies the row by the sign of the permutation.
    """
    idx = ws.index_set
    N = idx.n + idx.m
    pos = {j: e for e, j in enumerate(idx.j1_set)}
    if len(set(triple)) != 3 or any(j not in pos for j in triple):
        raise ValueError(f"{triple} is not a triple of distinct j-labels")

    def xi(v: int) -> Poly:
        return Poly(N, {unit(N, v): 1})

    def x0(j):
        return xi(idx.var0(idx.b(j)))

    def x1(j):
        return xi(idx.var1(j))

    j, jp, k = triple
    row = [Poly.zero(N)] * idx.t
    row[pos[j]] = x0(k) * x1(jp) - x0(jp) * x1(k)
    row[pos[jp]] = x0(j) * x1(k) - x0(k) * x1(j)
    row[pos[k]] = x0(jp) * x1(j) - x0(j) * x1(jp)
    return tuple(row)


def wtorsion_conditions(ws: WSystem) -> List[TorsionCondition]:
    """One second-order compatibility condition per 3-subset {j < j' < k} of the j-set."""
    idx = ws.index_set
    names = ws.base.variable_names

    def z0(j):
        return idx.var0(idx.b(j))

    def z1(j):
        return idx.var1(j)

    def term(sign: str, eq: int, a: int, b: int) -> str:
        return f"{sign} d2(varphi^{eq})/d{names[a]}d{names[b]}"

    out = []
    for j, jp, k in combinations(idx.j1_set, 3):
        text = " ".join([
            term("", j, z0(k), z1(jp)), term("-", j, z0(jp), z1(k)),
            term("+", jp, z0(j), z1(k)), term("-", jp, z0(k), z1(j)),
            term("+", k, z0(jp), z1(j)), term("-", k, z0(j), z1(jp)),
        ]).strip() + " = 0"
        out.append(TorsionCondition((j, jp, k), torsion_row(ws, (j, jp, k)), text))
    return out
