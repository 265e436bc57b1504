"""Exact scalars: rationals and polynomials in commuting central symbols.

A monomial is a tuple of ``(symbol, exponent)`` pairs sorted by symbol name,
so monomials from different rings can be multiplied without conversion.
Optional reduction rules ``symbol^k -> polynomial`` are applied after every
product; they must be triangular (the right side of a rule only mentions
symbols that come earlier in the ring order).
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from .errors import NonTriangularRelations

Rational = Fraction
Monomial = Tuple[Tuple[str, int], ...]
Terms = Dict[Monomial, Fraction]

ONE: Monomial = ()


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for s, k in b:
        exps[s] = exps.get(s, 0) + k
    return tuple(sorted(exps.items()))


def mono_str(m: Monomial) -> str:
    return "*".join(s if k == 1 else f"{s}^{k}" for s, k in m)


def mono_degree(m: Monomial, symbol: str) -> int:
    for s, k in m:
        if s == symbol:
            return k
    return 0


def mono_without(m: Monomial, symbol: str) -> Monomial:
    return tuple((s, k) for s, k in m if s != symbol)


def add_into(acc: Terms, terms: Mapping, factor: Fraction = Fraction(1)) -> None:
    """In-place ``acc += factor * terms`` dropping zeros."""
    for key, c in terms.items():
        v = acc.get(key, 0) + factor * c
        if v:
            acc[key] = v
        else:
            acc.pop(key, None)


def rational_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class Relations:
    """Triangular univariate reduction rules ``symbol^degree -> rhs``.

    ``order`` is the ring order. A rule for ``s`` may only use symbols that
    precede ``s`` in ``order``; anything else raises NonTriangularRelations.
    """

    def __init__(self, order: Sequence[str], rules: Mapping[str, Tuple[int, "CentralPoly"]]):
        self.order: Tuple[str, ...] = tuple(order)
        if len(set(self.order)) != len(self.order):
            raise NonTriangularRelations("ring order lists a symbol twice")
        pos = {s: i for i, s in enumerate(self.order)}
        self.rules: Dict[str, Tuple[int, Terms]] = {}
        for sym, (deg, rhs) in rules.items():
            if sym not in pos:
                raise NonTriangularRelations(f"constrained symbol {sym} is not in the ring order")
            if deg < 1:
                raise NonTriangularRelations(f"rule degree for {sym} must be positive")
            rhs_terms = rhs.terms if isinstance(rhs, CentralPoly) else CentralPoly.const(rhs).terms
            for mono in rhs_terms:
                for s, _ in mono:
                    if s not in pos or pos[s] >= pos[sym]:
                        raise NonTriangularRelations(
                            f"rule for {sym} uses {s}, which is not earlier in the ring order"
                        )
            self.rules[sym] = (deg, dict(rhs_terms))
        self._cache: Dict[Monomial, Terms] = {}

    def __eq__(self, other):
        return (
            isinstance(other, Relations)
            and self.order == other.order
            and self.rules == other.rules
        )

    def __hash__(self):
        return hash((self.order, tuple(sorted((s, d) for s, (d, _) in self.rules.items()))))

    def __repr__(self):
        parts = [f"{s}^{d} -> {CentralPoly(t)}" for s, (d, t) in self.rules.items()]
        return f"Relations({list(self.order)}, [{', '.join(parts)}])"

    def is_reduced(self, mono: Monomial) -> bool:
        for s, k in mono:
            rule = self.rules.get(s)
            if rule is not None and k >= rule[0]:
                return False
        return True

    def reduce_monomial(self, mono: Monomial) -> Terms:
        if self.is_reduced(mono):
            return {mono: Fraction(1)}
        hit = self._cache.get(mono)
        if hit is not None:
            return hit
        for s, k in mono:
            rule = self.rules.get(s)
            if rule is not None and k >= rule[0]:
                deg, rhs = rule
                rest = tuple((t, e) if t != s else (t, e - deg) for t, e in mono)
                rest = tuple((t, e) for t, e in rest if e)
                out: Terms = {}
                for m, c in rhs.items():
                    add_into(out, self.reduce_monomial(mono_mul(rest, m)), c)
                break
        self._cache[mono] = out
        return out

    def reduce_terms(self, terms: Mapping[Monomial, Fraction]) -> Terms:
        out: Terms = {}
        for m, c in terms.items():
            if self.is_reduced(m):
                v = out.get(m, 0) + c
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
            else:
                add_into(out, self.reduce_monomial(m), c)
        return out

    def merge(self, other: Optional["Relations"]) -> "Relations":
        if other is None or other is self or other == self:
            return self
        order = list(self.order) + [s for s in other.order if s not in self.order]
        rules = {s: (d, CentralPoly(t)) for s, (d, t) in self.rules.items()}
        for s, (d, t) in other.rules.items():
            if s in rules and (rules[s][0], rules[s][1].terms) != (d, t):
                raise NonTriangularRelations(f"conflicting rules for {s}")
            rules[s] = (d, CentralPoly(t))
        return Relations(order, rules)


def merge_relations(a: Optional[Relations], b: Optional[Relations]) -> Optional[Relations]:
    if a is None:
        return b
    return a.merge(b)


Scalar = Union[int, Fraction, "CentralPoly"]


class CentralPoly:
    """Polynomial with Fraction coefficients in commuting symbols."""

    __slots__ = ("terms", "relations")

    def __init__(self, terms: Optional[Mapping[Monomial, Fraction]] = None,
                 relations: Optional[Relations] = None):
        raw = {m: as_fraction(c) for m, c in (terms or {}).items() if c}
        self.relations = relations
        self.terms: Terms = relations.reduce_terms(raw) if relations else raw

    @classmethod
    def const(cls, c, relations: Optional[Relations] = None) -> "CentralPoly":
        c = as_fraction(c)
        return cls({ONE: c} if c else {}, relations)

    @classmethod
    def symbol(cls, name: str, relations: Optional[Relations] = None) -> "CentralPoly":
        return cls({((name, 1),): Fraction(1)}, relations)

    @staticmethod
    def lift(x, relations: Optional[Relations] = None) -> "CentralPoly":
        if isinstance(x, CentralPoly):
            return x
        return CentralPoly.const(x, relations)

    @property
    def ring(self) -> Tuple[str, ...]:
        order = list(self.relations.order) if self.relations else []
        extra = sorted({s for m in self.terms for s, _ in m} - set(order))
        return tuple(order + extra)

    def symbols(self) -> set:
        return {s for m in self.terms for s, _ in m}

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(m == ONE for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.terms.get(ONE, Fraction(0))

    def degree(self, symbol: str) -> int:
        return max((mono_degree(m, symbol) for m in self.terms), default=0)

    def coefficient(self, symbol: str, k: int) -> "CentralPoly":
        """Part of the polynomial of degree exactly k in ``symbol`` with the symbol stripped."""
        out = {mono_without(m, symbol): c for m, c in self.terms.items() if mono_degree(m, symbol) == k}
        return CentralPoly(out, self.relations)

    def with_relations(self, relations: Optional[Relations]) -> "CentralPoly":
        return CentralPoly(self.terms, relations)

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> Optional["CentralPoly"]:
        if isinstance(other, CentralPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return CentralPoly.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        rel = merge_relations(self.relations, o.relations)
        acc = dict(self.terms)
        add_into(acc, o.terms)
        out = CentralPoly.__new__(CentralPoly)
        out.relations = rel
        out.terms = acc
        return out

    __radd__ = __add__

    def __neg__(self):
        out = CentralPoly.__new__(CentralPoly)
        out.relations = self.relations
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        rel = merge_relations(self.relations, o.relations)
        acc: Terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = mono_mul(m1, m2)
                v = acc.get(m, 0) + c1 * c2
                if v:
                    acc[m] = v
                else:
                    acc.pop(m, None)
        return CentralPoly(acc, rel)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / as_fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = CentralPoly.const(1, self.relations)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def subs(self, symbol: str, value) -> "CentralPoly":
        """Substitute a number or polynomial for ``symbol``."""
        value = CentralPoly.lift(value)
        rel = merge_relations(self.relations, value.relations)
        powers = {0: CentralPoly.const(1, rel)}
        out = CentralPoly({}, rel)
        for m, c in self.terms.items():
            k = mono_degree(m, symbol)
            if k not in powers:
                powers[k] = value ** k
            out = out + CentralPoly({mono_without(m, symbol): c}, rel) * powers[k]
        return out

    def evaluate(self, values: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for s, k in m:
                t *= as_fraction(values[s]) ** k
            total += t
        return total

    def sorted_terms(self) -> Iterable[Tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda mc: (sum(k for _, k in mc[0]), mc[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            out.append(format_term(c, mono_str(m), first=not out))
        return "".join(out)

    def __repr__(self):
        return f"CentralPoly({self})"


def format_term(c: Fraction, body: str, first: bool) -> str:
    """Render ``c*body`` with a leading sign suitable for joining."""
    sign = "-" if c < 0 else "+"
    a = -c if c < 0 else c
    if body:
        text = body if a == 1 else f"{rational_str(a)}*{body}"
    else:
        text = rational_str(a)
    if first:
        return ("-" if sign == "-" else "") + text
    return f" {sign} {text}"


def reduce(p: CentralPoly, relations: Optional[Relations] = None) -> CentralPoly:
    """Reduce ``p`` modulo its relations (or the given ones)."""
    rel = relations if relations is not None else p.relations
    if rel is None:
        return CentralPoly(p.terms)
    return CentralPoly(p.terms, rel)


def symbols(*names: str, relations: Optional[Relations] = None):
    out = tuple(CentralPoly.symbol(n, relations) for n in names)
    return out[0] if len(out) == 1 else out
