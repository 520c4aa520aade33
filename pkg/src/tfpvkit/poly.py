"""Sparse multivariate polynomials with exact rational coefficients.

Variables are plain strings. A monomial is a tuple of ``(name, exponent)``
pairs sorted by :func:`var_key`, so two equal polynomials always have
identical term dictionaries and print identically.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, Tuple, Union

Monomial = Tuple[Tuple[str, int], ...]
Number = Union[int, Fraction]

_SPLIT = re.compile(r"(\d+)")


def var_key(name: str):
    """Natural sort key: ``X2`` sorts before ``X10``."""
    return tuple(int(p) if p.isdigit() else p for p in _SPLIT.split(name))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items(), key=lambda t: var_key(t[0])))


class Poly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        self.terms: Dict[Monomial, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                if c:
                    self.terms[mono] = Fraction(c)

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): 1})

    @classmethod
    def const(cls, c: Number) -> "Poly":
        return cls({(): c})

    @staticmethod
    def lift(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Rational)):
            return Poly.const(Fraction(other))
        return NotImplemented

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = Poly.lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for mono, c in other.terms.items():
            v = out.get(mono, 0) + c
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = Poly.lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            if not other:
                return Poly()
            f = Fraction(other)
            return Poly({m: c * f for m, c in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomial")
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        other = Poly.lift(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    # inspection -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((), Fraction(0))

    def variables(self) -> Tuple[str, ...]:
        names = {v for m in self.terms for v, _ in m}
        return tuple(sorted(names, key=var_key))

    def degree_in(self, names: Iterable[str]) -> Tuple[int, int]:
        """Minimum and maximum total degree in ``names`` over all terms."""
        names = set(names)
        degs = [sum(e for v, e in m if v in names) for m in self.terms]
        if not degs:
            return (0, 0)
        return (min(degs), max(degs))

    def coefficients(self):
        return list(self.terms.values())

    def sorted_terms(self):
        def key(item):
            mono, _ = item
            deg = sum(e for _, e in mono)
            return (-deg, [(var_key(v), -e) for v, e in mono])

        return sorted(self.terms.items(), key=key)

    # transformation -------------------------------------------------------
    def diff(self, name: str) -> "Poly":
        out: Dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            exps = dict(mono)
            e = exps.get(name, 0)
            if not e:
                continue
            if e == 1:
                del exps[name]
            else:
                exps[name] = e - 1
            m = tuple(sorted(exps.items(), key=lambda t: var_key(t[0])))
            out[m] = out.get(m, 0) + c * e
        return Poly(out)

    def subs(self, mapping: Mapping[str, Union["Poly", Number]]) -> "Poly":
        """Substitute polynomials or numbers for variables."""
        if not mapping:
            return Poly(self.terms)
        cache: Dict[Tuple[str, int], Poly] = {}
        out = Poly()
        for mono, c in self.terms.items():
            term = Poly.const(c)
            keep = []
            for v, e in mono:
                if v in mapping:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = Poly.lift(mapping[v]) ** e
                    term = term * cache[key]
                else:
                    keep.append((v, e))
            if keep:
                term = term * Poly({tuple(keep): 1})
            out = out + term
        return out

    def evaluate(self, values: Mapping[str, Number]) -> Fraction:
        total = Fraction(0)
        for mono, c in self.terms.items():
            t = c
            for v, e in mono:
                try:
                    t *= Fraction(values[v]) ** e
                except KeyError:
                    raise KeyError(f"no value for variable {v!r}") from None
            total += t
        return total

    def rename(self, mapping: Mapping[str, str]) -> "Poly":
        return self.subs({old: Poly.var(new) for old, new in mapping.items()})

    def grade(self, name: str) -> Dict[int, "Poly"]:
        """Split by the exponent of ``name``; values no longer contain it."""
        parts: Dict[int, Dict[Monomial, Fraction]] = {}
        for mono, c in self.terms.items():
            e = 0
            rest = []
            for v, k in mono:
                if v == name:
                    e = k
                else:
                    rest.append((v, k))
            bucket = parts.setdefault(e, {})
            bucket[tuple(rest)] = bucket.get(tuple(rest), 0) + c
        return {e: Poly(t) for e, t in sorted(parts.items())}

    def divide_by_var(self, name: str, power: int = 1) -> "Poly":
        """Exact division by ``name**power``; every term must be divisible."""
        out = {}
        for mono, c in self.terms.items():
            exps = dict(mono)
            if exps.get(name, 0) < power:
                raise ValueError(f"term {self._fmt_mono(mono)} not divisible by {name}^{power}")
            exps[name] -= power
            if not exps[name]:
                del exps[name]
            out[tuple(sorted(exps.items(), key=lambda t: var_key(t[0])))] = c
        return Poly(out)

    # printing -------------------------------------------------------------
    @staticmethod
    def _fmt_mono(mono: Monomial) -> str:
        return "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for mono, c in self.sorted_terms():
            sign = "-" if c < 0 else "+"
            a = abs(c)
            body = self._fmt_mono(mono)
            if not body:
                text = str(a)
            elif a == 1:
                text = body
            else:
                text = f"{a}*{body}"
            pieces.append((sign, text))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in pieces[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self):
        return f"Poly({str(self)!r})"


def det(matrix) -> Union[Poly, Fraction]:
    """Determinant by memoised Laplace expansion.

    Works over any commutative ring whose elements support ``+``, ``-`` and
    ``*`` (used for small polynomial matrices where elimination would need
    polynomial division).
    """
    k = len(matrix)
    if k == 0:
        return Fraction(1)
    memo = {}

    def expand(i, cols):
        if i == k:
            return 1
        hit = memo.get((i, cols))
        if hit is not None:
            return hit
        total = 0
        for t, c in enumerate(cols):
            entry = matrix[i][c]
            if isinstance(entry, Poly) and entry.is_zero() or not isinstance(entry, Poly) and entry == 0:
                continue
            sub = expand(i + 1, cols[:t] + cols[t + 1 :])
            term = entry * sub
            total = total - term if t % 2 else total + term
        memo[(i, cols)] = total
        return total

    result = expand(0, tuple(range(k)))
    if any(isinstance(e, Poly) for row in matrix for e in row):
        return Poly.lift(result)
    return Fraction(result)
