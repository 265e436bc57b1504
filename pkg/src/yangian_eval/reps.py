"""Concrete generator matrices G^a_b and their graded decomposition.

Builders:

* ``fundamental_rep``: End(V)-valued entries in a matrix-units algebra;
* ``spinor_rep``: G^a_b = (eps/2) delta^a_b - c^a c_b with Clifford (so) or
  oscillator (sp) letters;
* ``js_rep``: G_ab = x_a d_b - eps x_b d_a (lowered) with bosonic (so) or
  fermionic (sp) canonical pairs;
* ``r_as_quadratic``: the R-matrix itself written as u^2 + uG + H;
* ``load_rep``: a plain-text file (see ``load_rep``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

from .coefficients import CentralPoly
from .errors import DimensionMismatch, ExpressionSyntaxError, UnknownAlgebraSpec
from .fock import FockBackend, MatrixPoly, fock_backend
from .metric import Metric, lower_index, make_metric, raise_index
from .ncalgebra import (
    BOSONIC,
    CLIFFORD,
    FERMIONIC,
    FREE,
    MATRIX_UNITS,
    AlgebraSpec,
    NCElement,
    clifford_family,
    free_family,
    heisenberg_family,
    matrix_units_family,
    parse,
)
from .tensorspace import TensorOperator, one_sided


def one_like(x):
    """Multiplicative unit of the ring an entry lives in."""
    if isinstance(x, NCElement):
        return x.algebra.one()
    if isinstance(x, MatrixPoly):
        return x.identity()
    return CentralPoly.const(1)


def zero_like(x):
    return one_like(x) * 0


class GeneratorMatrix:
    """An n x n matrix of algebra elements, entries[a-1][b-1] = M^a_b."""

    def __init__(self, metric: Metric, entries: Sequence[Sequence], label: str = ""):
        n = metric.n
        if len(entries) != n or any(len(row) != n for row in entries):
            raise DimensionMismatch(f"expected an {n}x{n} matrix of generators")
        self.metric = metric
        self.entries: List[list] = [list(row) for row in entries]
        self.label = label
        sample = next((x for row in self.entries for x in row if isinstance(x, (NCElement, MatrixPoly))), None)
        self._sample = sample
        self.entries = [[self._coerce(x) for x in row] for row in self.entries]

    def _coerce(self, x):
        s = self._sample
        if s is None:
            return CentralPoly.lift(x) if not isinstance(x, CentralPoly) else x
        if isinstance(s, NCElement):
            if isinstance(x, NCElement):
                return x if x.algebra is s.algebra else s.algebra.zero() + x
            return s.algebra.scalar(x)
        if isinstance(x, MatrixPoly):
            return x
        return one_like(s) * x if isinstance(x, (int, Fraction)) else one_like(s) * CentralPoly.lift(x)

    @property
    def n(self) -> int:
        return self.metric.n

    @property
    def algebra(self) -> Optional[AlgebraSpec]:
        return self._sample.algebra if isinstance(self._sample, NCElement) else None

    def one(self):
        return one_like(self._sample)

    def zero(self):
        return zero_like(self._sample)

    def __getitem__(self, ab: Tuple[int, int]):
        a, b = ab
        return self.entries[a - 1][b - 1]

    def lowered(self) -> List[list]:
        """M_{ab} = eps_{ac} M^c_b."""
        return [[x for x in row] for row in lower_index(self.entries, self.metric)]

    @classmethod
    def from_lowered(cls, metric: Metric, lowered: Sequence[Sequence], label: str = "") -> "GeneratorMatrix":
        return cls(metric, raise_index(lowered, metric), label)

    def like(self, entries, label: Optional[str] = None) -> "GeneratorMatrix":
        out = GeneratorMatrix.__new__(GeneratorMatrix)
        out.metric = self.metric
        out.label = self.label if label is None else label
        out._sample = self._sample
        out.entries = [[out._coerce(x) for x in row] for row in entries]
        if out._sample is None:
            out._sample = next((x for row in out.entries for x in row if isinstance(x, (NCElement, MatrixPoly))), None)
        return out

    def map(self, f: Callable) -> "GeneratorMatrix":
        """Apply ``f`` entrywise; the result may live in a different ring."""
        out = GeneratorMatrix(self.metric, [[f(x) for x in row] for row in self.entries], self.label)
        if out._sample is None:
            return self.like(out.entries)
        return out

    def identity(self, scale=1) -> "GeneratorMatrix":
        one = self.one()
        n = self.n
        return self.like([[one * scale if a == b else self.zero() for b in range(n)] for a in range(n)])

    def __add__(self, other):
        if isinstance(other, GeneratorMatrix):
            return self.like([[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])
        return self + self.identity(other)

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda x: -x)

    def __sub__(self, other):
        if isinstance(other, GeneratorMatrix):
            return self + (-other)
        return self + self.identity(-other if not isinstance(other, CentralPoly) else other * -1)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GeneratorMatrix):
            n = self.n
            rows = []
            for a in range(n):
                row = []
                for b in range(n):
                    acc = self.zero()
                    for c in range(n):
                        x, y = self.entries[a][c], other.entries[c][b]
                        if x and y:
                            acc = acc + x * y
                    row.append(acc)
                rows.append(row)
            return self.like(rows)
        return self.map(lambda x: x * other)

    def __rmul__(self, other):
        return self.map(lambda x: other * x)

    def __pow__(self, k: int):
        out = self.identity()
        for _ in range(k):
            out = out * self
        return out

    def trace(self):
        acc = self.zero()
        for a in range(self.n):
            acc = acc + self.entries[a][a]
        return acc

    def is_zero(self) -> bool:
        return not any(x for row in self.entries for x in row)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, GeneratorMatrix):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def first_nonzero(self):
        for a, row in enumerate(self.entries, 1):
            for b, x in enumerate(row, 1):
                if x:
                    return (a, b), x
        return None

    def subs(self, symbol: str, value) -> "GeneratorMatrix":
        return self.map(lambda x: x.subs(symbol, value))

    def slot(self, slot: int, arity: int = 2) -> TensorOperator:
        """The matrix acting on one tensor slot, e.g. G_1 or G_2."""
        return one_sided(self.entries, self.metric, slot, arity)

    def __repr__(self):
        return f"GeneratorMatrix({self.label or '?'}, {self.metric})"

    def pretty(self) -> str:
        return "\n".join(f"[{a}][{b}] = {self.entries[a - 1][b - 1]}"
                         for a in range(1, self.n + 1) for b in range(1, self.n + 1))


@dataclass
class GradedDecomposition:
    trace_part: object
    antisym: GeneratorMatrix
    sym_traceless: GeneratorMatrix

    def reassemble(self) -> GeneratorMatrix:
        return self.antisym + self.sym_traceless + self.antisym.identity() * self.trace_part


def graded_split(M: GeneratorMatrix) -> GradedDecomposition:
    """M = t I + A + S with A_ab = -eps A_ba, S_ab = eps S_ba (lowered) and tr S = 0."""
    metric = M.metric
    n, eps = metric.n, metric.eps
    t = M.trace() * Fraction(1, n)
    low = M.lowered()
    X = [[low[a][b] - t * metric.lower[a][b] if metric.lower[a][b] else low[a][b] for b in range(n)]
         for a in range(n)]
    half = Fraction(1, 2)
    A = [[(X[a][b] - X[b][a] * eps) * half for b in range(n)] for a in range(n)]
    S = [[(X[a][b] + X[b][a] * eps) * half for b in range(n)] for a in range(n)]
    return GradedDecomposition(t, M.like(raise_index(A, metric), M.label + ":antisym"),
                               M.like(raise_index(S, metric), M.label + ":sym"))


def on_fock(*mats: Optional[GeneratorMatrix], backend: Optional[FockBackend] = None) -> List[Optional[GeneratorMatrix]]:
    """The same matrices with entries replaced by exact Fock matrices.

    All matrices must share one algebra; raises UnsupportedFamily when some
    family has no finite realization."""
    algebra = next((m.algebra for m in mats if m is not None and m.algebra is not None), None)
    if algebra is None:
        raise ValueError("no symbolic entries to realize")
    backend = backend or fock_backend(algebra)
    one = backend.evaluate(algebra.one())
    out = []
    for M in mats:
        if M is None:
            out.append(None)
            continue
        conv = lambda x: backend.evaluate(x) if isinstance(x, NCElement) else one * CentralPoly.lift(x)
        out.append(M.map(conv))
    return out


def casimir_m2(G: GeneratorMatrix):
    """(1/n) sum_{a,b} G^a_b G^b_a."""
    n = G.n
    acc = G.zero()
    for a in range(n):
        for b in range(n):
            x, y = G.entries[a][b], G.entries[b][a]
            if x and y:
                acc = acc + x * y
    return acc * Fraction(1, n)


# builders -------------------------------------------------------------
def _as_metric(metric) -> Metric:
    if isinstance(metric, Metric):
        return metric
    kind, n = metric
    return make_metric(kind, n)


def units_algebra(metric: Metric, name: str = "e") -> AlgebraSpec:
    return AlgebraSpec(metric, [matrix_units_family(metric.n, name)])


def fundamental_rep(metric: Metric, algebra: Optional[AlgebraSpec] = None, name: str = "e") -> GeneratorMatrix:
    """Defining representation: G^a_b = e_ba - eps sum_{cd} eps^{ac} eps_{bd} e_cd.

    In lowered indices (G_ab)_{cd} = eps_{ac} eps_{bd} - eps ... reduces to
    the graded antisymmetrized matrix unit, with the orientation fixed so
    that the Lie relation holds with the sign used throughout the package.
    """
    metric = _as_metric(metric)
    alg = algebra or units_algebra(metric, name)
    n, eps = metric.n, metric.eps
    rows = []
    for a in range(1, n + 1):
        row = []
        for b in range(1, n + 1):
            acc = alg.gen(name, b, a)
            for c, vc in metric.up_row(a):
                for d, vd in metric.low_row(b):
                    acc = acc - alg.gen(name, c, d) * (eps * vc * vd)
            row.append(acc)
        rows.append(row)
    return GeneratorMatrix(metric, rows, f"fundamental {metric}")


def oscillator_algebra(metric: Metric, name: str = "c") -> AlgebraSpec:
    return AlgebraSpec(metric, [clifford_family(metric, name)])


def spinor_rep(metric: Metric, algebra: Optional[AlgebraSpec] = None, name: str = "c") -> GeneratorMatrix:
    """G^a_b = (eps/2) delta^a_b - c^a c_b."""
    metric = _as_metric(metric)
    alg = algebra or oscillator_algebra(metric, name)
    n, eps = metric.n, metric.eps
    half = Fraction(eps, 2)
    rows = [[(alg.scalar(half) if a == b else alg.zero()) - alg.gen(name, a, upper=True) * alg.gen(name, b)
             for b in range(1, n + 1)] for a in range(1, n + 1)]
    return GeneratorMatrix(metric, rows, f"spinor {metric}")


def heisenberg_algebra(metric: Metric, x: str = "x", d: str = "d", fermionic: Optional[bool] = None) -> AlgebraSpec:
    return AlgebraSpec(metric, [heisenberg_family(metric, x, d, fermionic)])


def js_rep(metric: Metric, algebra: Optional[AlgebraSpec] = None, x: str = "x", d: str = "d") -> GeneratorMatrix:
    """Lowered G_ab = x_a d_b - eps x_b d_a; bosonic pairs for so, fermionic for sp."""
    metric = _as_metric(metric)
    alg = algebra or heisenberg_algebra(metric, x, d)
    n, eps = metric.n, metric.eps
    low = [[alg.gen(x, a) * alg.gen(d, b) - alg.gen(x, b) * alg.gen(d, a) * eps for b in range(1, n + 1)]
           for a in range(1, n + 1)]
    return GeneratorMatrix.from_lowered(metric, low, f"js {metric}")


def r_as_quadratic(metric: Metric, name: str = "e") -> Tuple[GeneratorMatrix, GeneratorMatrix]:
    """(G, H) with u^2 + uG + H equal to R(u), quantum space = second tensor slot.

    G = beta + P - eps K and H = beta P, read as End(V)-valued matrices.
    """
    metric = _as_metric(metric)
    alg = units_algebra(metric, name)
    beta = metric.beta
    Gbar = fundamental_rep(metric, alg, name)
    n = metric.n
    # P contributes e_ba to entry (a, b)
    P = [[alg.gen(name, b, a) for b in range(1, n + 1)] for a in range(1, n + 1)]
    G = Gbar + Gbar.identity(beta)
    H = Gbar.like(P, f"r-quadratic H {metric}") * beta
    G.label = f"r-quadratic G {metric}"
    return G, H


# rep files --------------------------------------------------------------
_FAMILY_RE = re.compile(r"^\s*([a-z-]+)\s*\(\s*([A-Za-z0-9_,\s]*)\)\s*$")
_ENTRY_RE = re.compile(r"^\s*([A-Za-z]+)\s*\[\s*(\d+)\s*\]\s*\[\s*(\d+)\s*\]\s*=(.*)$")


def parse_families(text: str, metric: Metric):
    fams = []
    for part in text.split(";"):
        if not part.strip():
            continue
        m = _FAMILY_RE.match(part)
        if not m:
            raise UnknownAlgebraSpec(f"cannot read family {part.strip()!r}")
        kind = m.group(1)
        names = [s.strip() for s in m.group(2).split(",") if s.strip()]
        if kind == CLIFFORD and len(names) == 1:
            fams.append(clifford_family(metric, names[0]))
        elif kind in (BOSONIC, FERMIONIC, "heisenberg") and len(names) == 2:
            ferm = None if kind == "heisenberg" else kind == FERMIONIC
            fams.append(heisenberg_family(metric, names[0], names[1], ferm))
        elif kind == MATRIX_UNITS and len(names) == 1:
            fams.append(matrix_units_family(metric.n, names[0]))
        elif kind == FREE and names:
            fams.append(free_family(metric.n, *names))
        else:
            raise UnknownAlgebraSpec(f"unknown family {kind}({', '.join(names)})")
    if not fams:
        raise UnknownAlgebraSpec("no generator families declared")
    return fams


def loads_rep(text: str, label: str = "file"):
    """Parse the rep text format; returns (G, H) with H None when absent.

    Header lines ``algebra: so|sp``, ``n: <int>``, ``families: <spec>`` then
    ``G[a][b] = <expr>`` for every a, b and optionally an ``H`` block. Blank
    lines and lines starting with ``#`` are ignored.
    """
    header = {}
    grids = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        em = _ENTRY_RE.match(line)
        if em:
            grids.setdefault(em.group(1), []).append((int(em.group(2)), int(em.group(3)), em.group(4).strip(), lineno))
            continue
        if ":" in line:
            key, _, value = line.partition(":")
            header[key.strip().lower()] = value.strip()
            continue
        raise ExpressionSyntaxError(f"line {lineno}: cannot read {line!r}", 0)
    for key in ("algebra", "n", "families"):
        if key not in header:
            raise UnknownAlgebraSpec(f"missing header {key!r}")
    try:
        n = int(header["n"])
        metric = make_metric(header["algebra"], n)
    except ValueError as exc:
        raise UnknownAlgebraSpec(str(exc)) from None
    alg = AlgebraSpec(metric, parse_families(header["families"], metric))
    if "G" not in grids:
        raise DimensionMismatch("no G entries")
    extra = set(grids) - {"G", "H"}
    if extra:
        raise UnknownAlgebraSpec(f"unknown matrix names {sorted(extra)}")
    out = []
    for name in ("G", "H"):
        if name not in grids:
            out.append(None)
            continue
        cells = grids[name]
        rows_seen = {a for a, _, _, _ in cells}
        cols_seen = {b for _, b, _, _ in cells}
        if rows_seen != set(range(1, n + 1)) or cols_seen != set(range(1, n + 1)) or len(cells) != n * n:
            raise DimensionMismatch(f"{name} needs exactly {n}x{n} entries, got rows {sorted(rows_seen)} "
                                    f"and columns {sorted(cols_seen)}")
        grid = [[None] * n for _ in range(n)]
        for a, b, expr, lineno in cells:
            if grid[a - 1][b - 1] is not None:
                raise DimensionMismatch(f"{name}[{a}][{b}] given twice")
            grid[a - 1][b - 1] = parse(expr, alg)
        out.append(GeneratorMatrix(metric, grid, f"{label}:{name}"))
    return out[0], out[1]


def load_rep(path: Union[str, Path]):
    p = Path(path)
    return loads_rep(p.read_text(), p.name)


def dumps_rep(G: GeneratorMatrix, H: Optional[GeneratorMatrix] = None) -> str:
    """Inverse of ``loads_rep`` for matrices over a named algebra."""
    alg = G.algebra
    metric = G.metric
    fams = "; ".join(_family_spec(f) for f in alg.families)
    lines = [f"algebra: {metric.short}", f"n: {metric.n}", f"families: {fams}"]
    for name, M in (("G", G), ("H", H)):
        if M is None:
            continue
        for a in range(1, metric.n + 1):
            for b in range(1, metric.n + 1):
                lines.append(f"{name}[{a}][{b}] = {M[a, b]}")
    return "\n".join(lines) + "\n"


def _family_spec(fam) -> str:
    return f"{fam.kind}({', '.join(fam.names)})"
