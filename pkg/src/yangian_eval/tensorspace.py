"""Operators on tensor powers of the defining space V.

Entries may be exact scalars (CentralPoly), algebra elements (NCElement) or
any other ring element supporting ``+``, ``*`` and truthiness. In a product
``X * Y`` the entries of X always stand to the left of those of Y.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct
from typing import Callable, Dict, Iterable, Iterator, Optional, Sequence, Tuple

from .coefficients import CentralPoly, mono_degree
from .errors import DimensionMismatch, SlotCollision, SlotOutOfRange
from .metric import Metric
from .ncalgebra import NCElement, _acc_add
from .results import CheckResult, result_from

Index = Tuple[int, ...]
Rows = Dict[Index, Dict[Index, object]]


def _is_zero(x) -> bool:
    return not x


def sum_entries(items: Sequence):
    """Sum a list of ring elements, merging NCElement term maps in one pass."""
    items = [x for x in items if x]
    if not items:
        return 0
    if len(items) == 1:
        return items[0]
    if all(isinstance(x, NCElement) for x in items):
        alg = items[0].algebra
        if all(x.algebra is alg for x in items):
            acc: Dict = {}
            for x in items:
                for k, c in x._t.items():
                    _acc_add(acc, k, c)
            return NCElement(alg, acc)
    total = items[0]
    for x in items[1:]:
        total = total + x
    return total


class TensorOperator:
    """Sparse matrix on V^{(x) arity}; rows[r][c] holds the entry (r, c)."""

    __slots__ = ("metric", "arity", "rows")

    def __init__(self, metric: Metric, arity: int, rows: Optional[Rows] = None):
        self.metric = metric
        self.arity = arity
        self.rows: Rows = {}
        for r, cols in (rows or {}).items():
            kept = {c: v for c, v in cols.items() if v}
            if kept:
                self.rows[r] = kept

    @classmethod
    def from_entries(cls, metric: Metric, arity: int, entries: Iterable[Tuple[Tuple[Index, Index], object]]) -> "TensorOperator":
        acc: Dict[Index, Dict[Index, list]] = {}
        n = metric.n
        for (r, c), v in entries:
            r, c = tuple(r), tuple(c)
            if len(r) != arity or len(c) != arity:
                raise DimensionMismatch("index tuple length differs from arity")
            if any(not 1 <= i <= n for i in r + c):
                raise DimensionMismatch(f"index outside 1..{n}")
            acc.setdefault(r, {}).setdefault(c, []).append(v)
        return cls(metric, arity, {r: {c: sum_entries(vs) for c, vs in cols.items()} for r, cols in acc.items()})

    @property
    def n(self) -> int:
        return self.metric.n

    def entries(self) -> Iterator[Tuple[Tuple[Index, Index], object]]:
        for r in sorted(self.rows):
            cols = self.rows[r]
            for c in sorted(cols):
                yield (r, c), cols[c]

    def get(self, r: Index, c: Index):
        return self.rows.get(tuple(r), {}).get(tuple(c), 0)

    def nnz(self) -> int:
        return sum(len(c) for c in self.rows.values())

    def is_zero(self) -> bool:
        return not self.rows

    def __bool__(self):
        return bool(self.rows)

    def first_nonzero(self):
        for key, v in self.entries():
            return key, v
        return None

    def _check(self, other: "TensorOperator") -> None:
        if other.arity != self.arity or other.metric.n != self.metric.n:
            raise DimensionMismatch("operators act on different spaces")

    def map(self, f: Callable) -> "TensorOperator":
        return TensorOperator(self.metric, self.arity,
                              {r: {c: f(v) for c, v in cols.items()} for r, cols in self.rows.items()})

    def __add__(self, other):
        if not isinstance(other, TensorOperator):
            return NotImplemented
        self._check(other)
        rows: Dict[Index, Dict[Index, list]] = {}
        for op in (self, other):
            for r, cols in op.rows.items():
                dst = rows.setdefault(r, {})
                for c, v in cols.items():
                    dst.setdefault(c, []).append(v)
        return TensorOperator(self.metric, self.arity,
                              {r: {c: sum_entries(vs) for c, vs in cols.items()} for r, cols in rows.items()})

    def __neg__(self):
        return self.map(lambda v: -v)

    def __sub__(self, other):
        if not isinstance(other, TensorOperator):
            return NotImplemented
        return self + (-other)

    def scale(self, s) -> "TensorOperator":
        """Multiply each entry by a scalar or (central) element from the left."""
        if isinstance(s, (int, Fraction)):
            return self.map(lambda v: v * s)
        return self.map(lambda v: s * v)

    def __mul__(self, other):
        """Operator product, or entrywise multiplication by a ring element on the right."""
        if isinstance(other, TensorOperator):
            return self.matmul(other)
        return self.map(lambda v: v * other)

    def __rmul__(self, other):
        return self.map(lambda v: other * v)

    def matmul(self, other: "TensorOperator") -> "TensorOperator":
        self._check(other)
        out: Dict[Index, Dict[Index, object]] = {}
        orows = other.rows
        for r, cols in self.rows.items():
            acc: Dict[Index, list] = {}
            for m, x in cols.items():
                row = orows.get(m)
                if not row:
                    continue
                for c, y in row.items():
                    acc.setdefault(c, []).append(x * y)
            if acc:
                out[r] = {c: sum_entries(vs) for c, vs in acc.items()}
        return TensorOperator(self.metric, self.arity, out)

    __matmul__ = matmul

    def __pow__(self, k: int):
        out = identity(self.metric, self.arity)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, TensorOperator):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def subs(self, symbol: str, value) -> "TensorOperator":
        return self.map(lambda v: v.subs(symbol, value) if hasattr(v, "subs") else v)

    def coefficient(self, symbol: str, k: int) -> "TensorOperator":
        return self.map(lambda v: v.coefficient(symbol, k) if hasattr(v, "coefficient") else (v if k == 0 else 0))

    def __repr__(self):
        return f"TensorOperator(arity={self.arity}, n={self.n}, nnz={self.nnz()})"


def entry_degree(x, symbol: str) -> int:
    """Degree of a ring element in a central symbol (0 for plain numbers)."""
    if isinstance(x, CentralPoly):
        monos = x.terms
    elif isinstance(x, NCElement):
        monos = [m for _, m in x._t]
    elif hasattr(x, "blocks"):
        monos = x.blocks
    else:
        return 0
    return max((mono_degree(m, symbol) for m in monos), default=0)


class SpectralOperator(TensorOperator):
    """A TensorOperator whose entries are polynomials in spectral symbols.

    Equality is coefficient-wise, so an identity holds for all values of the
    spectral parameters exactly when the difference has no stored entries.
    """

    __slots__ = ()

    @classmethod
    def wrap(cls, op: TensorOperator) -> "SpectralOperator":
        return cls(op.metric, op.arity, op.rows)

    def degree(self, symbol: str) -> int:
        return max((entry_degree(v, symbol) for _, v in self.entries()), default=0)

    def at(self, symbol: str, value) -> "SpectralOperator":
        """Substitute a number or polynomial for a spectral symbol."""
        return SpectralOperator.wrap(self.subs(symbol, value))

    def shifted(self, symbol: str, delta) -> "SpectralOperator":
        """The operator at ``symbol + delta``."""
        return self.at(symbol, CentralPoly.symbol(symbol) + CentralPoly.lift(delta))


def commutator(a: TensorOperator, b: TensorOperator) -> TensorOperator:
    return a * b - b * a


def anticommutator(a: TensorOperator, b: TensorOperator) -> TensorOperator:
    return a * b + b * a


def _const(v) -> CentralPoly:
    return CentralPoly.const(v)


def identity(metric: Metric, arity: int = 2) -> TensorOperator:
    n = metric.n
    one = _const(1)
    return TensorOperator(metric, arity, {r: {r: one} for r in iproduct(range(1, n + 1), repeat=arity)})


def make_ipk(metric: Metric) -> Tuple[TensorOperator, TensorOperator, TensorOperator]:
    """I, P (flip) and K (K^{a1a2}_{b1b2} = eps^{a1a2} eps_{b1b2}) on V (x) V."""
    n = metric.n
    one = _const(1)
    rng = range(1, n + 1)
    I = identity(metric, 2)
    P = TensorOperator(metric, 2, {(a, b): {(b, a): one} for a in rng for b in rng})
    K = TensorOperator.from_entries(metric, 2, [
        (((a1, a2), (b1, b2)), _const(metric.up(a1, a2) * metric.low(b1, b2)))
        for a1 in rng for a2 in rng if metric.up(a1, a2)
        for b1 in rng for b2 in rng if metric.low(b1, b2)
    ])
    return I, P, K


def make_r(metric: Metric, u=None, beta=None) -> SpectralOperator:
    """R(u) = u(u+beta) I + (u+beta) P - eps u K with u a symbol or polynomial."""
    u = CentralPoly.symbol("u") if u is None else CentralPoly.lift(u)
    beta = metric.beta if beta is None else Fraction(beta)
    I, P, K = make_ipk(metric)
    return SpectralOperator.wrap(I * (u * (u + beta)) + P * (u + beta) + K * (u * (-metric.eps)))


def embed(op: TensorOperator, slots: Sequence[int], arity: int) -> TensorOperator:
    """Place ``op`` on the given tensor slots (1-based) of V^{(x) arity}."""
    slots = tuple(slots)
    if len(set(slots)) != len(slots):
        raise SlotCollision(f"repeated slot in {slots}")
    if len(slots) != op.arity:
        raise DimensionMismatch(f"operator has arity {op.arity}, got {len(slots)} slots")
    if any(not 1 <= s <= arity for s in slots):
        raise SlotOutOfRange(f"slots {slots} outside 1..{arity}")
    others = [s for s in range(1, arity + 1) if s not in slots]
    n = op.n
    rows: Rows = {}
    for free in iproduct(range(1, n + 1), repeat=len(others)):
        for r, cols in op.rows.items():
            full_r = [0] * arity
            for s, i in zip(slots, r):
                full_r[s - 1] = i
            for s, i in zip(others, free):
                full_r[s - 1] = i
            dst = rows.setdefault(tuple(full_r), {})
            for c, v in cols.items():
                full_c = list(full_r)
                for s, i in zip(slots, c):
                    full_c[s - 1] = i
                dst[tuple(full_c)] = v
    return TensorOperator(op.metric, arity, rows)


def sym_split(C: TensorOperator) -> Tuple[TensorOperator, TensorOperator]:
    """(C_s, C_a) = (C + PCP)/2, (C - PCP)/2."""
    if C.arity != 2:
        raise DimensionMismatch("sym_split needs an operator on V (x) V")
    _, P, _ = make_ipk(C.metric)
    PCP = P * C * P
    half = Fraction(1, 2)
    return (C + PCP) * half, (C - PCP) * half


def one_sided(M: Sequence[Sequence], metric: Metric, slot: int, arity: int = 2) -> TensorOperator:
    """Matrix with algebra-valued entries M[a][b] (= M^a_b) acting on one slot."""
    n = metric.n
    if len(M) != n or any(len(row) != n for row in M):
        raise DimensionMismatch(f"expected an {n}x{n} matrix")
    base = TensorOperator(metric, 1, {(a,): {(b,): M[a - 1][b - 1] for b in range(1, n + 1)}
                                      for a in range(1, n + 1)})
    return embed(base, (slot,), arity)


def verify_ybe(metric: Metric, beta=None) -> CheckResult:
    """R12(u) R13(u+v) R23(v) - R23(v) R13(u+v) R12(u), identically in u, v."""
    u, v = CentralPoly.symbol("u"), CentralPoly.symbol("v")
    R12 = embed(make_r(metric, u, beta), (1, 2), 3)
    R13 = embed(make_r(metric, u + v, beta), (1, 3), 3)
    R23 = embed(make_r(metric, v, beta), (2, 3), 3)
    diff = R12 * R13 * R23 - R23 * R13 * R12
    return result_from("YBE", diff)
