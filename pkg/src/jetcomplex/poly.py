"""Sparse multivariate polynomials over Q and graded-lex monomial bases."""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

Monomial = Tuple[int, ...]


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> Tuple[Monomial, ...]:
    """Exponent vectors of the given total degree, in lex-descending order.

    This is the degree-``degree`` block of graded lex with x_1 > x_2 > ...,
    e.g. for two variables and degree 2: x1^2, x1*x2, x2^2.
    """
    if degree < 0 or nvars < 0:
        return ()
    if nvars == 0:
        return ((),) if degree == 0 else ()
    out = []
    for e in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - e):
            out.append((e,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, degree: int) -> Dict[Monomial, int]:
    return {m: i for i, m in enumerate(monomials(nvars, degree))}


def unit(nvars: int, j: int) -> Monomial:
    return tuple(1 if i == j else 0 for i in range(nvars))


def mono_add(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Polynomial in ``nvars`` variables with Fraction coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[Mapping[Monomial, object]] = None):
        self.nvars = nvars
        clean: Dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            if len(m) != nvars:
                raise ValueError(f"monomial {m} does not have {nvars} exponents")
            c = Fraction(c)
            if c:
                clean[tuple(m)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Monomial, Fraction]) -> "Poly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    @classmethod
    def const(cls, nvars: int, c: object) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, j: int, coeff: object = 1) -> "Poly":
        return cls(nvars, {unit(nvars, j): coeff})

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw(nvars, {})

    @classmethod
    def random_homogeneous(cls, nvars: int, degree: int, rng: random.Random,
                           lo: int = -5, hi: int = 5, density: float = 1.0) -> "Poly":
        terms = {}
        for m in monomials(nvars, degree):
            if density >= 1.0 or rng.random() < density:
                terms[m] = rng.randint(lo, hi)
        return cls(nvars, terms)

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degrees(self) -> set:
        return {sum(m) for m in self.terms}

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max(self.degrees(), default=-1)

    def is_homogeneous(self, degree: Optional[int] = None) -> bool:
        degs = self.degrees()
        if not degs:
            return True
        if len(degs) != 1:
            return False
        return degree is None or degs == {degree}

    def coeff(self, m: Monomial) -> Fraction:
        return self.terms.get(tuple(m), Fraction(0))

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: "Poly") -> None:
        if self.nvars != other.nvars:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly._raw(self.nvars, out)

    def __neg__(self) -> "Poly":
        return Poly._raw(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c: object) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw(self.nvars, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_add(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Poly._raw(self.nvars, out)

    __rmul__ = __mul__

    def diff(self, j: int, times: int = 1) -> "Poly":
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            e = m[j]
            if e < times:
                continue
            f = 1
            for t in range(times):
                f *= e - t
            nm = m[:j] + (e - times,) + m[j + 1:]
            out[nm] = out.get(nm, 0) + c * f
        return Poly._raw(self.nvars, {m: c for m, c in out.items() if c})

    def diff_mono(self, d: Monomial) -> "Poly":
        out = self
        for j, e in enumerate(d):
            if e:
                out = out.diff(j, e)
        return out

    def evaluate(self, point: Sequence[object]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for x, e in zip(point, m):
                if e:
                    t *= Fraction(x) ** e
            total += t
        return total

    def substitute_linear(self, images: Sequence["Poly"]) -> "Poly":
        """Substitute variable j -> images[j] (polys in a common ring)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        target = images[0].nvars if images else 0
        total = Poly.zero(target)
        for m, c in self.terms.items():
            t = Poly.const(target, c)
            for j, e in enumerate(m):
                for _ in range(e):
                    t = t * images[j]
            total = total + t
        return total

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def to_str(self, names: Optional[Sequence[str]] = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"x{j + 1}" for j in range(self.nvars)]
        parts = []
        for m in sorted(self.terms, reverse=True, key=lambda m: (sum(m), m)):
            c = self.terms[m]
            factors = []
            for j, e in enumerate(m):
                if e == 1:
                    factors.append(names[j])
                elif e > 1:
                    factors.append(f"{names[j]}^{e}")
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Poly({self.to_str()})"


def homogeneous_coordinates(p: Poly, degree: int) -> Dict[int, Fraction]:
    """Sparse coordinates of a homogeneous polynomial in the monomial basis."""
    idx = monomial_index(p.nvars, degree)
    out = {}
    for m, c in p.terms.items():
        if sum(m) != degree:
            raise ValueError(f"term of degree {sum(m)} in a degree-{degree} coordinate request")
        out[idx[m]] = c
    return out


def from_coordinates(nvars: int, degree: int, coords: Mapping[int, object]) -> Poly:
    basis = monomials(nvars, degree)
    return Poly(nvars, {basis[i]: c for i, c in coords.items()})


def linear_form(coeffs: Sequence[object]) -> Poly:
    n = len(coeffs)
    return Poly(n, {unit(n, j): c for j, c in enumerate(coeffs)})


def iter_terms(polys: Iterable[Poly]) -> Iterator[Tuple[int, Monomial, Fraction]]:
    for k, p in enumerate(polys):
        for m, c in p.terms.items():
            yield k, m, c
