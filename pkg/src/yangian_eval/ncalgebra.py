"""Noncommutative algebras given by generators and quadratic rewrite rules.

An algebra is a list of generator families plus adjoined central symbols.
Generators of distinct families commute. Inside a family the relations are

* ``clifford``: c^a c^b + s c^b c^a = p^{ab} with s = eps (Clifford algebra
  for so(n), Weyl/oscillator algebra for sp(n)) and p = eps^{ab} by default;
* ``heisenberg-bosonic`` / ``heisenberg-fermionic``:
  x_a d_b - s d_b x_a = p_{ab}, x_a x_b = s x_b x_a, d_a d_b = s d_b d_a,
  with s = +1 and s = -1 respectively and p_{ab} = eps_{ba} by default;
* ``matrix-units``: e_ij e_kl = delta_jk e_il and sum_i e_ii = 1, a concrete
  copy of End(V) used for scalar-matrix representations;
* ``free``: no relations among the letters of the family.

Elements are kept in normal form: a word is normal when no adjacent pair can
be rewritten. Letters are ordered family by family; inside a family x's come
before d's and indices ascend.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .coefficients import (
    ONE,
    CentralPoly,
    Monomial,
    Relations,
    as_fraction,
    format_term,
    mono_degree,
    mono_mul,
    mono_str,
    mono_without,
)
from .errors import (
    AlgebraMismatch,
    DegreeCapExceeded,
    DuplicateSymbol,
    ExpressionSyntaxError,
    IndexOutOfRange,
    NonCentralSquare,
    UnknownSymbol,
)
from .metric import Metric, make_metric

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

CLIFFORD = "clifford"
BOSONIC = "heisenberg-bosonic"
FERMIONIC = "heisenberg-fermionic"
FREE = "free"
MATRIX_UNITS = "matrix-units"
FAMILY_KINDS = (CLIFFORD, BOSONIC, FERMIONIC, FREE, MATRIX_UNITS)

Word = Tuple[int, ...]
Key = Tuple[Word, Monomial]

PairingMatrix = Tuple[Tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class Family:
    """A block of generators sharing one relation class.

    ``names`` lists the letter names: one for clifford and matrix units, two
    (position, derivative) for Heisenberg pairs, any number for free families.
    ``pairing`` is the matrix on the right side of the defining relations and
    ``sign`` the exchange sign s. ``metric`` is used to move indices (c_a,
    x^a). ``shape`` is the number of indices a letter carries.
    """

    kind: str
    names: Tuple[str, ...]
    n: int
    pairing: Optional[PairingMatrix] = None
    sign: int = 0
    metric: Optional[Metric] = None
    shape: int = 1

    def pair(self, a: int, b: int) -> Fraction:
        return self.pairing[a - 1][b - 1]

    def letters(self) -> List[Tuple[str, Tuple[int, ...]]]:
        idx = list(iproduct(range(1, self.n + 1), repeat=self.shape))
        return [(name, i) for name in self.names for i in idx]

    def describe(self) -> str:
        base = f"{self.kind}({','.join(self.names)})"
        if self.metric is not None:
            base += f"[{self.metric}]"
        return base


def _as_pairing(rows) -> PairingMatrix:
    return tuple(tuple(Fraction(v) for v in r) for r in rows)


def clifford_family(metric: Metric, name: str = "c", pairing=None) -> Family:
    """c^a c^b + eps c^b c^a = eps^{ab}: Clifford for so(n), oscillators for sp(n)."""
    pairing = metric.upper if pairing is None else _as_pairing(pairing)
    return Family(CLIFFORD, (name,), metric.n, pairing, metric.eps, metric)


def heisenberg_family(metric: Metric, x: str = "x", d: str = "d", fermionic: Optional[bool] = None,
                      pairing=None) -> Family:
    """Canonical pairs x_a d_b - s d_b x_a = pairing_{ab}.

    Statistics default to bosonic for so(n) and fermionic for sp(n). The
    default pairing is eps_{ba}, the orientation for which the bilinears
    x_a d_b - eps x_b d_a obey the Lie relation with the same sign as the
    defining and spinor representations.
    """
    if fermionic is None:
        fermionic = metric.eps == -1
    if pairing is None:
        n = metric.n
        pairing = tuple(tuple(metric.lower[b][a] for b in range(n)) for a in range(n))
    return Family(FERMIONIC if fermionic else BOSONIC, (x, d), metric.n, _as_pairing(pairing),
                  -1 if fermionic else 1, metric)


def free_family(n: int, *names: str, shape: int = 2) -> Family:
    return Family(FREE, tuple(names), n, None, 0, None, shape)


def matrix_units_family(n: int, name: str = "e") -> Family:
    return Family(MATRIX_UNITS, (name,), n, None, 0, None, 2)


@dataclass(frozen=True)
class Generator:
    id: int
    family: int
    name: str
    index: Tuple[int, ...]

    def text(self, algebra: "AlgebraSpec") -> str:
        fam = algebra.families[self.family]
        if fam.kind == CLIFFORD:
            return f"{self.name}^{self.index[0]}"
        return self.name + "".join(f"_{i}" for i in self.index)


class AlgebraSpec:
    """Generators, rewrite rules and adjoined central symbols.

    ``relations`` holds scalar square rules for central symbols. ``nc_rules``
    holds rules whose right side is an algebra element (used when the square
    of an adjoined symbol is a central but non-scalar element); the element
    is multiplied from the right onto the complete coefficient.
    """

    def __init__(self, metric: Metric, families: Sequence[Family] = (), centrals: Sequence[str] = (),
                 relations: Optional[Relations] = None, nc_rules: Optional[Mapping] = None,
                 max_degree: int = 24):
        self.metric = metric
        self.families: Tuple[Family, ...] = tuple(families)
        self.centrals: Tuple[str, ...] = tuple(centrals)
        self.relations = relations
        self.nc_rules: Dict[str, Tuple[int, "NCElement"]] = dict(nc_rules or {})
        self.max_degree = max_degree
        seen = set(self.centrals)
        if len(seen) != len(self.centrals):
            raise DuplicateSymbol("central symbol declared twice")
        for fam in self.families:
            if fam.kind not in FAMILY_KINDS:
                raise ValueError(f"unknown family kind {fam.kind}")
            for name in fam.names:
                if name in seen:
                    raise DuplicateSymbol(f"name {name!r} used twice")
                seen.add(name)
        self.generators: List[Generator] = []
        self._lookup: Dict[Tuple[str, Tuple[int, ...]], int] = {}
        self._family_of: List[int] = []
        for f, fam in enumerate(self.families):
            for name, idx in fam.letters():
                g = Generator(len(self.generators), f, name, idx)
                self.generators.append(g)
                self._lookup[(name, idx)] = g.id
                self._family_of.append(f)
        self._has_units = any(f.kind == MATRIX_UNITS for f in self.families)
        self._rule_cache: Dict[Tuple[int, int], Optional[list]] = {}
        self._insert_cache: Dict[Tuple[Word, int], Dict[Word, Fraction]] = {}
        self._word_cache: Dict[Word, Dict[Word, Fraction]] = {}
        self._unit_diag: Optional[List[int]] = None
        if self._has_units:
            fam_idx = next(i for i, f in enumerate(self.families) if f.kind == MATRIX_UNITS)
            fam = self.families[fam_idx]
            self._unit_diag = [self._lookup[(fam.names[0], (i, i))] for i in range(1, fam.n + 1)]

    # construction helpers ---------------------------------------------
    def __repr__(self):
        fams = "; ".join(f.describe() for f in self.families) or "scalars"
        cen = f" centrals={list(self.centrals)}" if self.centrals else ""
        return f"AlgebraSpec({self.metric}: {fams}{cen})"

    def with_max_degree(self, cap: int) -> "AlgebraSpec":
        return AlgebraSpec(self.metric, self.families, self.centrals, self.relations, self.nc_rules, cap)

    def extended(self, families: Sequence[Family] = (), centrals: Sequence[str] = ()) -> "AlgebraSpec":
        """Algebra with extra families and central symbols appended; old words stay normal."""
        return AlgebraSpec(self.metric, self.families + tuple(families), self.centrals + tuple(centrals),
                           self.relations, self.nc_rules, self.max_degree)

    def letter_id(self, name: str, index: Tuple[int, ...]) -> int:
        try:
            return self._lookup[(name, tuple(index))]
        except KeyError:
            if any(name in f.names for f in self.families):
                raise IndexOutOfRange(f"{name} has no index {index}") from None
            raise UnknownSymbol(name) from None

    def family_of_name(self, name: str) -> Optional[Family]:
        for f in self.families:
            if name in f.names:
                return f
        return None

    def zero(self) -> "NCElement":
        return NCElement(self, {})

    def scalar(self, c) -> "NCElement":
        c = CentralPoly.lift(c)
        terms = {((), m): v for m, v in c.terms.items()}
        return NCElement(self, self._finalize(terms) if self._has_units else terms)

    def one(self) -> "NCElement":
        return self.scalar(1)

    def symbol(self, name: str) -> "NCElement":
        return self.scalar(CentralPoly.symbol(name))

    def letter(self, gid: int) -> "NCElement":
        t = {((gid,), ONE): Fraction(1)}
        return NCElement(self, self._finalize(t) if self._has_units else t)

    def gen(self, name: str, *index: int, upper: bool = False) -> "NCElement":
        """A generator, optionally with its index moved by the family's pairing.

        Clifford letters are natural with an upper index (c^a); Heisenberg
        letters with a lower index (x_a, d_a). The other placement is the
        metric-contracted combination.
        """
        fam = self.family_of_name(name)
        if fam is None:
            raise UnknownSymbol(name)
        index = tuple(index)
        if len(index) != fam.shape:
            raise IndexOutOfRange(f"{name} takes {fam.shape} index(es)")
        for i in index:
            if not 1 <= i <= fam.n:
                raise IndexOutOfRange(f"index {i} of {name} outside 1..{fam.n}")
        natural_upper = fam.kind == CLIFFORD
        if fam.kind in (FREE, MATRIX_UNITS) or upper == natural_upper:
            return self.letter(self.letter_id(name, index))
        a = index[0]
        met = fam.metric or self.metric
        row = met.up_row(a) if upper else met.low_row(a)
        out = self.zero()
        for b, v in row:
            out = out + self.letter(self.letter_id(name, (b,))) * v
        return out

    # rewriting ----------------------------------------------------------
    def rule(self, a: int, b: int) -> Optional[list]:
        """Rewrite for the adjacent pair (a, b): None if the pair is normal,
        else a list of (replacement word, coefficient)."""
        key = (a, b)
        if key in self._rule_cache:
            return self._rule_cache[key]
        r = self._compute_rule(a, b)
        self._rule_cache[key] = r
        return r

    def _compute_rule(self, a: int, b: int) -> Optional[list]:
        fa, fb = self._family_of[a], self._family_of[b]
        if fa != fb:
            return [((b, a), Fraction(1))] if fa > fb else None
        fam = self.families[fa]
        ga, gb = self.generators[a], self.generators[b]
        if fam.kind == FREE:
            return None
        if fam.kind == MATRIX_UNITS:
            (i, j), (k, l) = ga.index, gb.index
            if j != k:
                return []
            return [((self._lookup[(ga.name, (i, l))],), Fraction(1))]
        s = fam.sign
        if fam.kind == CLIFFORD:
            if a < b or (a == b and s == -1):
                return None
            i, j = ga.index[0], gb.index[0]
            if a == b:
                v = fam.pair(i, i) / 2
                return [((), v)] if v else []
            out = [((b, a), Fraction(-s))]
            v = fam.pair(i, j)
            if v:
                out.append(((), v))
            return out
        # Heisenberg pairs
        xa, xb = ga.name == fam.names[0], gb.name == fam.names[0]
        i, j = ga.index[0], gb.index[0]
        if xa == xb:
            if a < b:
                return None
            if a == b:
                return None if s == 1 else []
            return [((b, a), Fraction(s))]
        if xa:  # x before d is already normal
            return None
        # d_i x_j = s (x_j d_i - eps_{j i})
        out = [((b, a), Fraction(s))]
        v = fam.pair(j, i)
        if v:
            out.append(((), -s * v))
        return out

    def _insert(self, word: Word, letter: int) -> Dict[Word, Fraction]:
        """Normal form of (normal word) * letter."""
        if not word:
            return {(letter,): Fraction(1)}
        key = (word, letter)
        hit = self._insert_cache.get(key)
        if hit is not None:
            return hit
        r = self.rule(word[-1], letter)
        if r is None:
            out = {word + (letter,): Fraction(1)}
        else:
            out = {}
            head = word[:-1]
            for repl, c in r:
                part = {head: Fraction(1)}
                for x in repl:
                    part = self._mul_word_letter(part, x)
                for w, v in part.items():
                    t = out.get(w, 0) + c * v
                    if t:
                        out[w] = t
                    else:
                        out.pop(w, None)
        self._insert_cache[key] = out
        return out

    def _mul_word_letter(self, terms: Mapping[Word, Fraction], letter: int) -> Dict[Word, Fraction]:
        out: Dict[Word, Fraction] = {}
        for w, c in terms.items():
            for w2, v in self._insert(w, letter).items():
                t = out.get(w2, 0) + c * v
                if t:
                    out[w2] = t
                else:
                    out.pop(w2, None)
        return out

    def word_product(self, w1: Word, w2: Word) -> Dict[Word, Fraction]:
        """Normal form of the product of two normal words."""
        if not w2:
            return {w1: Fraction(1)}
        if not w1:
            return {w2: Fraction(1)}
        if len(w1) + len(w2) > self.max_degree:
            raise DegreeCapExceeded(f"word length {len(w1) + len(w2)} exceeds cap {self.max_degree}")
        key = w1 + (-1,) + w2
        hit = self._word_cache.get(key)
        if hit is not None:
            return hit
        part: Dict[Word, Fraction] = {w1: Fraction(1)}
        for x in w2:
            part = self._mul_word_letter(part, x)
        self._word_cache[key] = part
        return part

    def normalize_word(self, word: Word, strategy: str = "insertion") -> Dict[Word, Fraction]:
        """Normal form of an arbitrary word.

        ``insertion`` multiplies letters in one at a time (cached);
        ``leftmost``/``rightmost`` rewrite the leftmost/rightmost reducible
        pair repeatedly. All three must agree (confluence).
        """
        if len(word) > self.max_degree:
            raise DegreeCapExceeded(f"word length {len(word)} exceeds cap {self.max_degree}")
        if strategy == "insertion":
            part: Dict[Word, Fraction] = {(): Fraction(1)}
            for x in word:
                part = self._mul_word_letter(part, x)
            return part
        if strategy not in ("leftmost", "rightmost"):
            raise ValueError(f"unknown strategy {strategy}")
        pending: Dict[Word, Fraction] = {tuple(word): Fraction(1)}
        done: Dict[Word, Fraction] = {}
        while pending:
            w, c = pending.popitem()
            positions = range(len(w) - 1) if strategy == "leftmost" else range(len(w) - 2, -1, -1)
            for i in positions:
                r = self.rule(w[i], w[i + 1])
                if r is not None:
                    break
            else:
                t = done.get(w, 0) + c
                if t:
                    done[w] = t
                else:
                    done.pop(w, None)
                continue
            for repl, v in r:
                nw = w[:i] + repl + w[i + 2:]
                t = pending.get(nw, 0) + c * v
                if t:
                    pending[nw] = t
                else:
                    pending.pop(nw, None)
        return done

    def is_normal_word(self, word: Word) -> bool:
        return all(self.rule(word[i], word[i + 1]) is None for i in range(len(word) - 1))

    def _finalize(self, terms: Dict[Key, Fraction]) -> Dict[Key, Fraction]:
        """Replace words without a matrix unit by sum_i word*e_ii (unit = sum e_ii)."""
        if not self._has_units:
            return terms
        fam_units = {g for g in self._unit_diag}
        unit_family = self._family_of[self._unit_diag[0]]
        out: Dict[Key, Fraction] = {}
        for (w, m), c in terms.items():
            if any(self._family_of[x] == unit_family for x in w):
                t = out.get((w, m), 0) + c
                if t:
                    out[(w, m)] = t
                else:
                    out.pop((w, m), None)
                continue
            for e in fam_units:
                for w2, v in self.word_product(w, (e,)).items():
                    k = (w2, m)
                    t = out.get(k, 0) + c * v
                    if t:
                        out[k] = t
                    else:
                        out.pop(k, None)
        return out

    def from_raw(self, raw: Iterable[Tuple[Word, Monomial, Fraction]], strategy: str = "insertion") -> "NCElement":
        """Normal form of a raw sum of (word, monomial, coefficient) triples."""
        acc: Dict[Key, Fraction] = {}
        for word, mono, c in raw:
            for w, v in self.normalize_word(tuple(word), strategy).items():
                _acc_add(acc, (w, mono), as_fraction(c) * v)
        return NCElement(self, self._reduce_keys(self._finalize(acc)))

    def _reduce_keys(self, terms: Dict[Key, Fraction]) -> Dict[Key, Fraction]:
        rel = self.relations
        if rel is not None and any(not rel.is_reduced(m) for _, m in terms):
            out: Dict[Key, Fraction] = {}
            for (w, m), c in terms.items():
                if rel.is_reduced(m):
                    _acc_add(out, (w, m), c)
                else:
                    for m2, v in rel.reduce_monomial(m).items():
                        _acc_add(out, (w, m2), c * v)
            terms = out
        if self.nc_rules:
            terms = self._apply_nc_rules(terms)
        return terms

    def _apply_nc_rules(self, terms: Dict[Key, Fraction]) -> Dict[Key, Fraction]:
        while True:
            hits = {}
            for (w, m), c in terms.items():
                for s, (deg, _) in self.nc_rules.items():
                    if mono_degree(m, s) >= deg:
                        hits[(w, m)] = (c, s)
                        break
            if not hits:
                return terms
            for key in hits:
                terms.pop(key)
            # group by the symbol and lowered monomial so the replacement sits
            # to the right of each complete coefficient
            for (w, m), (c, s) in hits.items():
                deg, value = self.nc_rules[s]
                k = mono_degree(m, s)
                rest = mono_without(m, s)
                if k - deg:
                    rest = mono_mul(rest, ((s, k - deg),))
                for (w2, m2), v in value._t.items():
                    for w3, u in self.word_product(w, w2).items():
                        _acc_add(terms, (w3, mono_mul(rest, m2)), c * v * u)
            if self.relations is not None:
                terms = {**terms}
                terms = AlgebraSpec._reduce_scalar(self.relations, terms)

    @staticmethod
    def _reduce_scalar(rel: Relations, terms: Dict[Key, Fraction]) -> Dict[Key, Fraction]:
        out: Dict[Key, Fraction] = {}
        for (w, m), c in terms.items():
            for m2, v in rel.reduce_monomial(m).items():
                _acc_add(out, (w, m2), c * v)
        return out

    def generator_elements(self) -> List["NCElement"]:
        return [self.letter(g.id) for g in self.generators]


def _acc_add(acc: Dict, key, value) -> None:
    t = acc.get(key, 0) + value
    if t:
        acc[key] = t
    else:
        acc.pop(key, None)


_TRIVIAL: Dict[Tuple, AlgebraSpec] = {}


def scalar_algebra(metric: Optional[Metric] = None) -> AlgebraSpec:
    metric = metric or make_metric("so", 2)
    key = (metric.kind, metric.n)
    if key not in _TRIVIAL:
        _TRIVIAL[key] = AlgebraSpec(metric)
    return _TRIVIAL[key]


class NCElement:
    """Immutable normal-ordered element; ``_t`` maps (word, monomial) to a rational."""

    __slots__ = ("algebra", "_t")

    def __init__(self, algebra: AlgebraSpec, terms: Dict[Key, Fraction]):
        self.algebra = algebra
        self._t = terms

    # views --------------------------------------------------------------
    @property
    def terms(self) -> Dict[Word, CentralPoly]:
        """Map normal word -> CentralPoly coefficient."""
        grouped: Dict[Word, Dict[Monomial, Fraction]] = {}
        for (w, m), c in self._t.items():
            grouped.setdefault(w, {})[m] = c
        return {w: CentralPoly(t, self.algebra.relations) for w, t in grouped.items()}

    def words(self) -> List[Word]:
        return sorted({w for w, _ in self._t})

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def scalar_part(self) -> Optional[CentralPoly]:
        """The element as a CentralPoly if it has no generator words, else None."""
        alg = self.algebra
        if alg._has_units:
            # scalars look like c * sum_i e_ii
            diag = alg._unit_diag
            first = {m: c for (w, m), c in self._t.items() if w == (diag[0],)}
            expect = {((e,), m): c for e in diag for m, c in first.items()}
            return CentralPoly(first, alg.relations) if expect == self._t else None
        if all(not w for w, _ in self._t):
            return CentralPoly({m: c for (_, m), c in self._t.items()}, alg.relations)
        return None

    def degree(self) -> int:
        return max((len(w) for w, _ in self._t), default=0)

    # arithmetic ---------------------------------------------------------
    def _other(self, other) -> Optional["NCElement"]:
        if isinstance(other, NCElement):
            if other.algebra is self.algebra:
                return other
            if not other.algebra.generators:
                return self.algebra.scalar(CentralPoly({m: c for (_, m), c in other._t.items()}))
            if not self.algebra.generators:
                return None
            raise AlgebraMismatch(f"{self.algebra} vs {other.algebra}")
        if isinstance(other, (int, Fraction, CentralPoly)):
            return self.algebra.scalar(other)
        return None

    def __add__(self, other):
        if isinstance(other, NCElement) and other.algebra is not self.algebra and not self.algebra.generators:
            return other.__radd__(self)
        o = self._other(other)
        if o is None:
            return NotImplemented
        acc = dict(self._t)
        for k, c in o._t.items():
            _acc_add(acc, k, c)
        return NCElement(self.algebra, acc)

    def __radd__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        return self.__add__(other)

    def __neg__(self):
        return NCElement(self.algebra, {k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        o = other if isinstance(other, NCElement) else self._other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "NCElement":
        if isinstance(c, CentralPoly):
            if c.is_constant():
                c = c.constant_value()
            else:
                return self * self.algebra.scalar(c)
        c = as_fraction(c)
        if not c:
            return self.algebra.zero()
        return NCElement(self.algebra, {k: v * c for k, v in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, CentralPoly):
            return self.scale(other) if other.is_constant() else self._mul(self.algebra.scalar(other))
        if isinstance(other, NCElement):
            if other.algebra is not self.algebra:
                if not self.algebra.generators:
                    return other.__rmul__(self)
                o = self._other(other)
                return self._mul(o)
            return self._mul(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, CentralPoly):
            return self.scale(other) if other.is_constant() else self.algebra.scalar(other)._mul(self)
        if isinstance(other, NCElement):
            o = self._other(other)
            return o._mul(self)
        return NotImplemented

    def _mul(self, other: "NCElement") -> "NCElement":
        alg = self.algebra
        acc: Dict[Key, Fraction] = {}
        rel = alg.relations
        needs_reduce = False
        for (w1, m1), c1 in self._t.items():
            for (w2, m2), c2 in other._t.items():
                c = c1 * c2
                m = mono_mul(m1, m2)
                if rel is not None and not rel.is_reduced(m):
                    needs_reduce = True
                if not w2:
                    _acc_add(acc, (w1, m), c)
                    continue
                if not w1:
                    _acc_add(acc, (w2, m), c)
                    continue
                for w, v in alg.word_product(w1, w2).items():
                    _acc_add(acc, (w, m), c * v)
        if needs_reduce or alg.nc_rules:
            acc = alg._reduce_keys(acc)
        return NCElement(alg, acc)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = self.algebra.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, NCElement):
            if other.algebra is not self.algebra:
                try:
                    other = self._other(other)
                except AlgebraMismatch:
                    return False
            return self._t == other._t
        if isinstance(other, (int, Fraction, CentralPoly)):
            return self._t == self.algebra.scalar(other)._t
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    # substitution -------------------------------------------------------
    def coefficient(self, symbol: str, k: int) -> "NCElement":
        """Part of degree exactly k in a central symbol, with the symbol stripped."""
        return NCElement(self.algebra, {(w, mono_without(m, symbol)): c for (w, m), c in self._t.items()
                                        if mono_degree(m, symbol) == k})

    def central_symbols(self) -> set:
        return {s for _, m in self._t for s, _ in m}

    def subs(self, symbol: str, value) -> "NCElement":
        """Replace a central symbol by a scalar, polynomial or (central) element.

        An element value is multiplied onto each complete coefficient, which is
        consistent whenever the value commutes with the coefficients.
        """
        top = max((mono_degree(m, symbol) for _, m in self._t), default=0)
        if top == 0:
            return self
        if isinstance(value, NCElement):
            val = value if value.algebra is self.algebra else self._other(value)
        else:
            val = self.algebra.scalar(value)
        out = self.algebra.zero()
        power = self.algebra.one()
        for k in range(top + 1):
            part = self.coefficient(symbol, k)
            if part:
                out = out + part * power
            power = power * val
        return out

    def lift(self, algebra: AlgebraSpec) -> "NCElement":
        """The same element inside a larger algebra that contains all its letters."""
        if algebra is self.algebra:
            return self
        src = self.algebra
        mapping = {g.id: algebra.letter_id(g.name, g.index) for g in src.generators}
        raw = [(tuple(mapping[x] for x in w), m, c) for (w, m), c in self._t.items()]
        return algebra.from_raw(raw)

    # printing -----------------------------------------------------------
    def sorted_items(self):
        return sorted(self._t.items(), key=lambda kv: (len(kv[0][0]), kv[0][0], sum(k for _, k in kv[0][1]), kv[0][1]))

    def __str__(self):
        if not self._t:
            return "0"
        gens = self.algebra.generators
        parts = []
        for (w, m), c in self.sorted_items():
            body = [mono_str(m)] if m else []
            body += [gens[x].text(self.algebra) for x in w]
            parts.append(format_term(c, "*".join(body), first=not parts))
        return "".join(parts)

    def __repr__(self):
        return f"NCElement({self})"


def commutator(a, b):
    return a * b - b * a


def anticommutator(a, b):
    return a * b + b * a


def normal_form(e, strategy: str = "insertion") -> NCElement:
    """Re-derive the normal form of an element from its raw terms."""
    alg = e.algebra
    return alg.from_raw(((w, m, c) for (w, m), c in e._t.items()), strategy)


def is_central(e: NCElement, against: Optional[Sequence[NCElement]] = None):
    """(True, None) if e commutes with every generator (or every element of
    ``against``), else (False, first non-commuting element)."""
    alg = e.algebra
    probes = list(against) if against is not None else alg.generator_elements()
    for x in probes:
        if e * x - x * e:
            return False, x
    return True, None


def adjoin_central(algebra: AlgebraSpec, name: str, square, against: Optional[Sequence[NCElement]] = None) -> AlgebraSpec:
    """New algebra with a central symbol ``name`` whose square rewrites to ``square``.

    A scalar square becomes a polynomial reduction rule. A non-scalar square
    must be central (with respect to ``against`` if given) and becomes an
    element-valued rule.
    """
    taken = set(algebra.centrals) | {s for f in algebra.families for s in f.names}
    if algebra.relations is not None:
        taken |= set(algebra.relations.order)
    if name in taken:
        raise DuplicateSymbol(name)
    if isinstance(square, NCElement):
        if square.algebra is not algebra and square.algebra.generators:
            raise AlgebraMismatch("square lives in another algebra")
        ok, witness = is_central(square if square.algebra is algebra else algebra.scalar(square.scalar_part()), against)
        if not ok:
            raise NonCentralSquare(f"{square} does not commute with {witness}")
        scalar = square.scalar_part()
    else:
        scalar = CentralPoly.lift(square)
    centrals = algebra.centrals + (name,)
    if scalar is not None:
        prev = list(algebra.relations.order) if algebra.relations else []
        order = [s for s in prev] + [s for s in sorted(scalar.symbols()) if s not in prev] + [name]
        rules = {s: (d, CentralPoly(t)) for s, (d, t) in (algebra.relations.rules.items() if algebra.relations else [])}
        rules[name] = (2, scalar)
        return AlgebraSpec(algebra.metric, algebra.families, centrals, Relations(order, rules),
                           algebra.nc_rules, algebra.max_degree)
    new = AlgebraSpec(algebra.metric, algebra.families, centrals, algebra.relations, algebra.nc_rules,
                      algebra.max_degree)
    value = square.lift(new) if square.algebra is not new else square
    new.nc_rules[name] = (2, value)
    return new


# parsing ------------------------------------------------------------------
_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*^()_]))")


class _Parser:
    def __init__(self, text: str, algebra: AlgebraSpec):
        self.text = text
        self.alg = algebra
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", self._byte(pos))
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.end = len(text)
        self.i = 0

    def _byte(self, pos: int) -> int:
        return len(self.text[:pos].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def fail(self, message: str):
        tok = self.peek()
        pos = tok[2] if tok else self.end
        raise ExpressionSyntaxError(message, self._byte(pos))

    def take(self, value: Optional[str] = None, kind: Optional[str] = None):
        tok = self.peek()
        if tok is None or (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            self.fail(f"expected {value or kind}")
        self.i += 1
        return tok

    def parse(self) -> NCElement:
        if not self.tokens:
            self.fail("empty expression")
        e = self.expr()
        if self.peek() is not None:
            self.fail("unexpected token")
        return e

    def expr(self) -> NCElement:
        sign = 1
        tok = self.peek()
        if tok and tok[1] in "+-" and tok[0] == "op":
            self.i += 1
            sign = -1 if tok[1] == "-" else 1
        out = self.term() * sign
        while True:
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] in "+-":
                self.i += 1
                t = self.term()
                out = out + t if tok[1] == "+" else out - t
            else:
                return out

    def term(self) -> NCElement:
        out = self.factor()
        while True:
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] == "*":
                self.i += 1
                out = out * self.factor()
            else:
                return out

    def factor(self) -> NCElement:
        base = self.atom()
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == "^":
            self.i += 1
            k = self.take(kind="num")
            if "/" in k[1]:
                self.i -= 1
                self.fail("exponent must be a non-negative integer")
            base = base ** int(k[1])
        return base

    def index(self) -> int:
        tok = self.take(kind="num")
        if "/" in tok[1]:
            self.i -= 1
            self.fail("index must be an integer")
        return int(tok[1])

    def atom(self) -> NCElement:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input")
        kind, val, pos = tok
        if kind == "num":
            self.i += 1
            return self.alg.scalar(Fraction(val))
        if kind == "op" and val == "(":
            self.i += 1
            e = self.expr()
            self.take(")")
            return e
        if kind == "name":
            self.i += 1
            fam = self.alg.family_of_name(val)
            if fam is None:
                known = set(self.alg.centrals)
                if self.alg.relations is not None:
                    known |= set(self.alg.relations.order)
                if val not in known:
                    raise UnknownSymbol(f"{val!r} at offset {self._byte(pos)}")
                return self.alg.symbol(val)
            nxt = self.peek()
            if nxt is None or nxt[0] != "op" or nxt[1] not in "_^":
                self.fail(f"generator {val} needs an index")
            self.i += 1
            upper = nxt[1] == "^"
            idx = [self.index()]
            while len(idx) < fam.shape:
                self.take("_")
                idx.append(self.index())
            if upper and fam.shape != 1:
                raise ExpressionSyntaxError(f"{val} has no upper-index form", self._byte(nxt[2]))
            return self.alg.gen(val, *idx, upper=upper)
        self.fail("unexpected token")


def parse(text: str, algebra: AlgebraSpec) -> NCElement:
    return _Parser(text, algebra).parse()


def to_text(e: NCElement) -> str:
    return str(e)
