"""Differential forms with homogeneous polynomial coefficients.

A form of degree r on N variables is a map from strictly increasing r-tuples
to polynomials that are all homogeneous of one degree s.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product
from math import factorial
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .exactalg import ExactMatrix, kernel_basis
from .poly import Monomial, Poly, monomials

Key = Tuple[int, ...]


def _sort_sign(idx: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """(sign of the sorting permutation, sorted tuple); sign 0 on a repeat."""
    arr = list(idx)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
            elif arr[j] == arr[j + 1]:
                return 0, tuple(arr)
    return sign, tuple(arr)


class PolyForm:
    __slots__ = ("space_dim", "form_degree", "coeff_degree", "coefficients")

    def __init__(self, space_dim: int, form_degree: int, coeff_degree: int,
                 coefficients: Optional[Mapping[Key, Poly]] = None):
        if not 0 <= form_degree <= space_dim:
            raise ValueError(f"form degree {form_degree} outside [0, {space_dim}]")
        if coeff_degree < 0:
            raise ValueError("coefficient degree must be non-negative")
        clean: Dict[Key, Poly] = {}
        for key, p in (coefficients or {}).items():
            key = tuple(key)
            if len(key) != form_degree or any(a >= b for a, b in zip(key, key[1:])):
                raise ValueError(f"key {key} is not a strictly increasing {form_degree}-tuple")
            if any(not 0 <= i < space_dim for i in key):
                raise ValueError(f"key {key} has an index outside [0, {space_dim})")
            if p.nvars != space_dim:
                raise ValueError("coefficients must live in space_dim variables")
            if not p.is_homogeneous(coeff_degree):
                raise ValueError(f"coefficient at {key} is not homogeneous of degree {coeff_degree}")
            if p:
                clean[key] = p
        self.space_dim = space_dim
        self.form_degree = form_degree
        self.coeff_degree = coeff_degree
        self.coefficients = clean

    @classmethod
    def zero(cls, space_dim: int, form_degree: int, coeff_degree: int = 0) -> "PolyForm":
        return cls(space_dim, form_degree, coeff_degree)

    @classmethod
    def random(cls, space_dim: int, form_degree: int, coeff_degree: int, rng,
               lo: int = -5, hi: int = 5) -> "PolyForm":
        coeffs = {key: Poly.random_homogeneous(space_dim, coeff_degree, rng, lo, hi)
                  for key in combinations(range(space_dim), form_degree)}
        return cls(space_dim, form_degree, coeff_degree, coeffs)

    @classmethod
    def from_terms(cls, space_dim: int, form_degree: int, coeff_degree: int,
                   terms: Iterable[Tuple[Sequence[int], Poly]]) -> "PolyForm":
        """Accumulate ``p dX^{i1}^...^dX^{ir}`` for arbitrary index orders."""
        acc: Dict[Key, Poly] = {}
        for idx, p in terms:
            sign, key = _sort_sign(idx)
            if sign == 0 or not p:
                continue
            acc[key] = acc.get(key, Poly.zero(space_dim)) + p.scale(sign)
        return cls(space_dim, form_degree, coeff_degree, acc)

    def coefficient(self, key: Sequence[int]) -> Poly:
        return self.coefficients.get(tuple(key), Poly.zero(self.space_dim))

    def is_zero(self) -> bool:
        return not self.coefficients

    def _same_shape(self, other: "PolyForm") -> None:
        if (self.space_dim, self.form_degree) != (other.space_dim, other.form_degree):
            raise ValueError("forms of different shape")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._same_shape(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.coeff_degree != other.coeff_degree:
            raise ValueError("coefficient degrees differ")
        keys = set(self.coefficients) | set(other.coefficients)
        return PolyForm(self.space_dim, self.form_degree, self.coeff_degree,
                        {k: self.coefficient(k) + other.coefficient(k) for k in keys})

    def scale(self, c: object) -> "PolyForm":
        return PolyForm(self.space_dim, self.form_degree, self.coeff_degree,
                        {k: p.scale(c) for k, p in self.coefficients.items()})

    def __neg__(self) -> "PolyForm":
        return self.scale(-1)

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyForm):
            return NotImplemented
        if (self.space_dim, self.form_degree) != (other.space_dim, other.form_degree):
            return False
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return self.coeff_degree == other.coeff_degree and self.coefficients == other.coefficients

    def __repr__(self) -> str:
        parts = [f"({p.to_str()}) dX{'^dX'.join(map(str, k))}" if k else p.to_str()
                 for k, p in sorted(self.coefficients.items())]
        return "PolyForm[" + (" + ".join(parts) or "0") + "]"


def ext_d(f: PolyForm) -> PolyForm:
    """Exterior derivative; the zero form of degree r+1 when s = 0 or r = N."""
    N, r, s = f.space_dim, f.form_degree, f.coeff_degree
    if r == N:
        raise ValueError("d of a top-degree form leaves the exterior algebra")
    if s == 0:
        return PolyForm.zero(N, r + 1, 0)
    terms = []
    for key, p in f.coefficients.items():
        for j in range(N):
            if j in key:
                continue
            dp = p.diff(j)
            if dp:
                terms.append(((j,) + key, dp))
    return PolyForm.from_terms(N, r + 1, s - 1, terms)


def is_closed(f: PolyForm) -> bool:
    if f.form_degree == f.space_dim:
        return True
    return ext_d(f).is_zero()


def euler_contract(f: PolyForm) -> PolyForm:
    """Contraction with sum_i x_i d/dx_i: raises s by one, lowers r by one."""
    N, r, s = f.space_dim, f.form_degree, f.coeff_degree
    if r == 0:
        raise ValueError("cannot contract a 0-form")
    acc: Dict[Key, Poly] = {}
    for key, p in f.coefficients.items():
        for pos, i in enumerate(key):
            rest = key[:pos] + key[pos + 1:]
            term = p * Poly.var(N, i, -1 if pos % 2 else 1)
            acc[rest] = acc.get(rest, Poly.zero(N)) + term
    return PolyForm(N, r - 1, s + 1, acc)


def koszul_solve(f: PolyForm) -> PolyForm:
    """A primitive u with du = f for closed f, via u = iota_E f / (s + r)."""
    if f.form_degree == 0:
        raise ValueError("a 0-form is never exact unless zero; no primitive of degree -1")
    total = f.coeff_degree + f.form_degree
    if total == 0:
        raise ValueError("s + r = 0: Euler homotopy degenerates")
    if not is_closed(f):
        raise ValueError("form is not closed, so it has no primitive")
    u = euler_contract(f).scale(Fraction(1, total))
    assert ext_d(u) == f
    return u


# ---------------------------------------------------------------------------
# torsion residuals for the antisymmetric three-index families


def cf_variable(i: int, block: int, width: int = 4) -> int:
    """Position of z^{i,block} in the 8-variable ordering z^{00}..z^{30}, z^{01}..z^{31}."""
    return i + width * block


def antisymmetric_extension(phi: Mapping[Tuple[int, int, int], Poly], width: int = 4
                            ) -> Callable[[int, int, int], Poly]:
    """Validate a Lambda^3 family and return its full antisymmetric lookup.

    Keys need not be sorted, but permuted keys must agree up to the sign of
    the permutation and repeated indices must carry zero.
    """
    if not phi:
        raise ValueError("empty family")
    nvars = next(iter(phi.values())).nvars
    canon: Dict[Tuple[int, int, int], Poly] = {}
    for key, p in phi.items():
        if len(key) != 3 or any(not 0 <= i < width for i in key):
            raise ValueError(f"bad index triple {key}")
        sign, sk = _sort_sign(key)
        if sign == 0:
            if p:
                raise ValueError(f"family is not antisymmetric: nonzero entry at repeated index {key}")
            continue
        val = p.scale(sign)
        if sk in canon and canon[sk] != val:
            raise ValueError(f"family is not antisymmetric at {sk}")
        canon[sk] = val

    def lookup(a: int, b: int, c: int) -> Poly:
        sign, sk = _sort_sign((a, b, c))
        if sign == 0:
            return Poly.zero(nvars)
        return canon.get(sk, Poly.zero(nvars)).scale(sign)

    return lookup


def torsion_residuals(phi: Mapping[Tuple[int, int, int], Poly], direction: int, width: int = 4,
                      variable: Callable[[int, int], int] = cf_variable
                      ) -> Dict[Tuple[int, int, int, int], Poly]:
    """Four-index alternating sums of first partials in one variable block.

    R(i,t,k,l) = d phi_{itk}/dz^{l.} - d phi_{ltk}/dz^{i.} + d phi_{lik}/dz^{t.} - d phi_{lit}/dz^{k.}
    for every ordered 4-tuple of distinct indices; all vanish exactly when
    the family is closed in that block.
    """
    if direction not in (0, 1):
        raise ValueError("direction must be 0 or 1")
    F = antisymmetric_extension(phi, width)

    def dz(p: Poly, idx: int) -> Poly:
        return p.diff(variable(idx, direction))

    out: Dict[Tuple[int, int, int, int], Poly] = {}
    for i, t, k, l in permutations(range(width), 4):
        out[(i, t, k, l)] = dz(F(i, t, k), l) - dz(F(l, t, k), i) + dz(F(l, i, k), t) - dz(F(l, i, t), k)
    for key, val in out.items():
        sign, sk = _sort_sign(key)
        assert val == out[sk].scale(sign), "residual family lost antisymmetry"
    return out


# ---------------------------------------------------------------------------
# instance checker for the closedness lemma on symmetric index arrays

SymKey = Tuple[int, Tuple[int, ...], int, Tuple[int, ...]]


class HypothesisNotSatisfied:
    """Returned when the hypothesis identity fails, so no conclusion is drawn."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return "hypothesis not satisfied"


HYPOTHESIS_NOT_SATISFIED = HypothesisNotSatisfied()


@dataclass(frozen=True)
class SymArray:
    """Numbers X^k_{(A) b (L)}: upper index k, a symmetric group A, one plain index b, a symmetric group L.

    Values are stored per symmetry class (A and L sorted).  ``grade`` is the
    common size |A| + |L| of the lower index groups.
    """

    dim: int
    grade: int
    values: Mapping[SymKey, Fraction]

    def __post_init__(self):
        clean: Dict[SymKey, Fraction] = {}
        for raw, v in self.values.items():
            key = self.canonical(raw)
            v = Fraction(v)
            if key in clean and clean[key] != v:
                raise ValueError(f"entries {raw} and its permuted class disagree: symmetry violated")
            if v:
                clean[key] = v
        object.__setattr__(self, "values", clean)

    def canonical(self, key: Sequence) -> SymKey:
        try:
            k, A, b, L = key
        except (TypeError, ValueError):
            raise ValueError(f"malformed key {key!r}: expected (k, A, b, L)")
        A, L = tuple(sorted(A)), tuple(sorted(L))
        if len(A) + len(L) != self.grade:
            raise ValueError(f"key {key!r} has |A|+|L| != {self.grade}")
        if any(not 0 <= i < self.dim for i in (k, b) + A + L):
            raise ValueError(f"key {key!r} has an index outside [0, {self.dim})")
        return (k, A, b, L)

    def __call__(self, k: int, A: Sequence[int], b: int, L: Sequence[int]) -> Fraction:
        return self.values.get(self.canonical((k, A, b, L)), Fraction(0))

    @staticmethod
    def slots(dim: int, grade: int) -> List[SymKey]:
        """All symmetry classes of a given grade."""
        out = []
        for na in range(grade + 1):
            for A in _multisets(dim, na):
                for L in _multisets(dim, grade - na):
                    for k, b in product(range(dim), repeat=2):
                        out.append((k, A, b, L))
        return out


def _multisets(dim: int, size: int) -> List[Tuple[int, ...]]:
    return [tuple(i for i, e in enumerate(m) for _ in range(e)) for m in monomials(dim, size)]


def _arrangements(ms: Sequence[int]) -> int:
    out = factorial(len(ms))
    for i in set(ms):
        out //= factorial(ms.count(i))
    return out


def _hyp_sides(X: SymArray, P: Tuple[int, ...], a: int, b: int, c: int, lam: Tuple[int, ...]):
    lhs = ((X(c, P + (b,), a, lam) - X(a, P + (b,), c, lam))
           - (X(c, P + (a,), b, lam) - X(b, P + (a,), c, lam))
           + (X(a, P + (c,), b, lam) - X(b, P + (c,), a, lam)))
    rhs = ((X(c, P, b, (a,) + lam) - X(b, P, c, (a,) + lam))
           - (X(c, P, a, (b,) + lam) - X(a, P, c, (b,) + lam))
           + (X(b, P, a, (c,) + lam) - X(a, P, b, (c,) + lam)))
    return lhs, rhs


def closedness_hypothesis_rows(dim: int, grade: int, prefix: Sequence[int]):
    """Linear functionals (as {slot: coeff}) whose vanishing is the hypothesis."""
    Q = tuple(sorted(prefix))
    nlam = grade - len(Q) - 2
    if nlam < 0:
        raise ValueError("prefix too long for the array grade")
    rows = []
    for x in range(dim):
        P = tuple(sorted(Q + (x,)))
        for lam in _multisets(dim, nlam):
            for a, b, c in combinations(range(dim), 3):
                probe = _LinearProbe(dim, grade)
                lhs, rhs = _hyp_sides(probe, P, a, b, c, lam)
                row = lhs.minus(rhs)
                if row:
                    rows.append(row)
    return rows


class _LinearProbe:
    """Stand-in for SymArray that records linear combinations of slots."""

    def __init__(self, dim: int, grade: int):
        self.shape = SymArray(dim, grade, {})

    def __call__(self, k, A, b, L) -> "_Lin":
        return _Lin({self.shape.canonical((k, A, b, L)): 1})


class _Lin(dict):
    def _combine(self, other, sign):
        out = _Lin(self)
        for key, v in other.items():
            nv = out.get(key, 0) + sign * v
            if nv:
                out[key] = nv
            else:
                out.pop(key, None)
        return out

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def minus(self, other):
        return self._combine(other, -1)


def lemma31_conclusion(X: SymArray, prefix: Sequence[int]) -> PolyForm:
    """The 3-form whose closedness the lemma asserts.

    Its coefficient on dX^a^dX^b^dX^c (a<b<c) is
    sum over multisets M of  C(a,b,c;M) * #arrangements(M) * X^M  with
    C = (X^c_{(Qa)b(M)} - X^b_{(Qa)c(M)}) - (X^c_{(Qb)a(M)} - X^a_{(Qb)c(M)})
        + (X^b_{(Qc)a(M)} - X^a_{(Qc)b(M)}),   Q = prefix.
    """
    Q = tuple(sorted(prefix))
    dim = X.dim
    nm = X.grade - len(Q) - 1
    if nm < 0:
        raise ValueError("prefix too long for the array grade")
    coeffs: Dict[Key, Poly] = {}
    for a, b, c in combinations(range(dim), 3):
        terms: Dict[Monomial, Fraction] = {}
        for M, mono in zip(_multisets(dim, nm), monomials(dim, nm)):
            val = ((X(c, Q + (a,), b, M) - X(b, Q + (a,), c, M))
                   - (X(c, Q + (b,), a, M) - X(a, Q + (b,), c, M))
                   + (X(b, Q + (c,), a, M) - X(a, Q + (c,), b, M)))
            if val:
                terms[mono] = val * _arrangements(M)
        coeffs[(a, b, c)] = Poly(dim, terms)
    return PolyForm(dim, 3, nm, coeffs)


def lemma31_instance_check(X: SymArray, prefix: Sequence[int]) -> Union[bool, HypothesisNotSatisfied]:
    """Check the closedness lemma on one symmetric array.

    The three trailing entries of the lemma's multi-index are summed over,
    so only the remaining ``prefix`` is a free parameter.  The hypothesis is
    required for every extension of the prefix by one index and every lower
    group L.  Returns HYPOTHESIS_NOT_SATISFIED when it fails, otherwise
    whether the conclusion form is closed.
    """
    if X.dim < 3:
        raise ValueError("need at least three form indices")
    Q = tuple(sorted(prefix))
    if any(not 0 <= i < X.dim for i in Q):
        raise ValueError("prefix index out of range")
    nlam = X.grade - len(Q) - 2
    if nlam < 0:
        raise ValueError("prefix too long for the array grade")
    for x in range(X.dim):
        P = tuple(sorted(Q + (x,)))
        for lam in _multisets(X.dim, nlam):
            for a, b, c in combinations(range(X.dim), 3):
                lhs, rhs = _hyp_sides(X, P, a, b, c, lam)
                if lhs != rhs:
                    return HYPOTHESIS_NOT_SATISFIED
    return is_closed(lemma31_conclusion(X, Q))


def random_hypothesis_instance(dim: int, grade: int, prefix: Sequence[int], rng,
                               lo: int = -5, hi: int = 5) -> SymArray:
    """A random array satisfying the hypothesis (random point of its solution space)."""
    slots = SymArray.slots(dim, grade)
    pos = {s: i for i, s in enumerate(slots)}
    rows = closedness_hypothesis_rows(dim, grade, prefix)
    M = ExactMatrix(len(rows), len(slots), {(r, pos[s]): v for r, row in enumerate(rows) for s, v in row.items()})
    K = kernel_basis(M)
    weights = [rng.randint(lo, hi) for _ in range(K.ncols)]
    vec: Dict[int, Fraction] = {}
    for (r, c), v in K.entries().items():
        vec[r] = vec.get(r, 0) + v * weights[c]
    return SymArray(dim, grade, {slots[i]: v for i, v in vec.items()})
