"""Invariant bilinear forms for so(n) and sp(n) and the constants eps, beta."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .errors import DimensionMismatch, OddSymplecticDimension

ORTHOGONAL = "orthogonal"
SYMPLECTIC = "symplectic"

_KIND_ALIASES = {"so": ORTHOGONAL, "orthogonal": ORTHOGONAL, "sp": SYMPLECTIC, "symplectic": SYMPLECTIC}

Matrix = Tuple[Tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class Metric:
    kind: str
    n: int
    eps: int
    lower: Matrix
    upper: Matrix
    beta: Fraction

    @property
    def short(self) -> str:
        return "so" if self.kind == ORTHOGONAL else "sp"

    def __str__(self):
        return f"{self.short}({self.n})"

    def low(self, a: int, b: int) -> Fraction:
        """eps_{ab} with 1-based indices."""
        return self.lower[a - 1][b - 1]

    def up(self, a: int, b: int) -> Fraction:
        """eps^{ab} with 1-based indices."""
        return self.upper[a - 1][b - 1]

    def low_row(self, a: int) -> List[Tuple[int, Fraction]]:
        """Nonzero entries eps_{a b} as (b, value), 1-based."""
        return [(b + 1, v) for b, v in enumerate(self.lower[a - 1]) if v]

    def up_row(self, a: int) -> List[Tuple[int, Fraction]]:
        return [(b + 1, v) for b, v in enumerate(self.upper[a - 1]) if v]

    def up_col(self, b: int) -> List[Tuple[int, Fraction]]:
        return [(a + 1, row[b - 1]) for a, row in enumerate(self.upper) if row[b - 1]]


def normalize_kind(kind: str) -> str:
    try:
        return _KIND_ALIASES[kind]
    except KeyError:
        raise ValueError(f"unknown algebra kind {kind!r}") from None


def make_metric(kind: str, n: int) -> Metric:
    kind = normalize_kind(kind)
    if not isinstance(n, int) or n < 2:
        raise ValueError("dimension must be an integer n >= 2")
    zero, one = Fraction(0), Fraction(1)
    if kind == ORTHOGONAL:
        ident = tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))
        return Metric(kind, n, 1, ident, ident, Fraction(n, 2) - 1)
    if n % 2:
        raise OddSymplecticDimension(f"sp({n}) needs an even dimension")
    m = n // 2
    j = [[zero] * n for _ in range(n)]
    for i in range(m):
        j[i][i + m] = one
        j[i + m][i] = -one
    lower = tuple(tuple(r) for r in j)
    upper = tuple(tuple(-v for v in r) for r in j)
    return Metric(kind, n, -1, lower, upper, Fraction(n, 2) + 1)


def _check_square(M: Sequence[Sequence], n: int) -> None:
    if len(M) != n or any(len(row) != n for row in M):
        raise DimensionMismatch(f"expected a {n}x{n} matrix")


def lower_index(M: Sequence[Sequence], metric: Metric) -> List[list]:
    """M_{ab} = eps_{ac} M^c_b."""
    n = metric.n
    _check_square(M, n)
    out = []
    for a in range(1, n + 1):
        row = []
        for b in range(n):
            acc = 0
            for c, v in metric.low_row(a):
                acc = acc + v * M[c - 1][b]
            row.append(acc)
        out.append(row)
    return out


def raise_index(M: Sequence[Sequence], metric: Metric) -> List[list]:
    """M^a_b = eps^{ac} M_{cb}; inverse of lower_index."""
    n = metric.n
    _check_square(M, n)
    out = []
    for a in range(1, n + 1):
        row = []
        for b in range(n):
            acc = 0
            for c, v in metric.up_row(a):
                acc = acc + v * M[c - 1][b]
            row.append(acc)
        out.append(row)
    return out
