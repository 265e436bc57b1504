"""Exact finite matrix realizations of the generator families.

Matrices are QMat values: integer numpy arrays over a common denominator. A ``MatrixPoly`` is a matrix
whose entries are polynomials in central symbols, stored as a map from
monomial to matrix; it supports the same ring operations as NCElement so the
checker can run on either.

Realizations:

* heisenberg-fermionic with any pairing p: x_a = f_a^dagger,
  d_b = sum_c p_{cb} f_c on the 2^n-dimensional Fock space (Jordan-Wigner);
* clifford with the identity pairing, n = 2m even: c^{2j-1} = (f_j + f_j^dagger/2) (x) 1,
  c^{2j} = (f_j - f_j^dagger/2) (x) J with J = [[0,-1],[1,0]]. The extra 2x2
  factor realizes the imaginary unit over the rationals (real Clifford
  algebras of positive signature have no rational irreducible module of
  dimension 2^m in general);
* matrix units: the ordinary n x n matrix units.

Commuting families are combined with Kronecker products.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from .coefficients import ONE, CentralPoly, Monomial, Relations, mono_degree, mono_mul, mono_without
from .errors import UnsupportedFamily
from .ncalgebra import BOSONIC, CLIFFORD, FERMIONIC, FREE, MATRIX_UNITS, AlgebraSpec, NCElement

F0, F1 = Fraction(0), Fraction(1)
_INT64_SAFE = 1 << 62


def _max_abs(a: np.ndarray) -> int:
    return int(np.max(np.abs(a))) if a.size else 0


def _compact(a: np.ndarray) -> np.ndarray:
    """int64 when every entry fits, Python ints otherwise."""
    if a.dtype == object and _max_abs(a) < _INT64_SAFE:
        return a.astype(np.int64)
    return a


def _wide(a: np.ndarray) -> np.ndarray:
    return a.astype(object) if a.dtype != object else a


class QMat:
    """Exact rational square matrix stored as integer numerators over one
    positive denominator; arithmetic runs in int64 while the entries are
    small and falls back to Python integers when they are not."""

    __slots__ = ("num", "den")

    def __init__(self, num: np.ndarray, den: int = 1):
        num = _compact(np.asarray(num))
        if den < 0:
            num, den = -num, -den
        if den != 1:
            g = den
            for x in np.unique(num):
                g = gcd(g, int(x))
                if g == 1:
                    break
            if g > 1:
                num = num // g
                den //= g
        self.num = num
        self.den = den

    @classmethod
    def from_rationals(cls, rows) -> "QMat":
        rows = [[Fraction(x) for x in row] for row in rows]
        den = 1
        for row in rows:
            for x in row:
                den = den * x.denominator // gcd(den, x.denominator)
        return cls(np.array([[int(x * den) for x in row] for row in rows], dtype=object), den)

    @property
    def shape(self):
        return self.num.shape

    @property
    def T(self) -> "QMat":
        return QMat(self.num.T.copy(), self.den)

    def __getitem__(self, ij) -> Fraction:
        return Fraction(int(self.num[ij]), self.den)

    def is_zero(self) -> bool:
        return not self.num.any()

    def _aligned(self, other: "QMat"):
        den = self.den * other.den // gcd(self.den, other.den)
        a, b = self.num, other.num
        fa, fb = den // self.den, den // other.den
        if max(_max_abs(a) * fa, _max_abs(b) * fb) >= _INT64_SAFE // 2:
            a, b = _wide(a), _wide(b)
        return a * fa, b * fb, den

    def __add__(self, other: "QMat") -> "QMat":
        a, b, den = self._aligned(other)
        return QMat(a + b, den)

    def __sub__(self, other: "QMat") -> "QMat":
        a, b, den = self._aligned(other)
        return QMat(a - b, den)

    def __neg__(self) -> "QMat":
        return QMat(-self.num, self.den)

    def __mul__(self, c) -> "QMat":
        c = Fraction(c)
        num = self.num
        if _max_abs(num) * abs(c.numerator) >= _INT64_SAFE:
            num = _wide(num)
        return QMat(num * c.numerator, self.den * c.denominator)

    __rmul__ = __mul__

    def dot(self, other: "QMat") -> "QMat":
        a, b = self.num, other.num
        if _max_abs(a) * _max_abs(b) * a.shape[1] >= _INT64_SAFE:
            a, b = _wide(a), _wide(b)
        return QMat(a.dot(b), self.den * other.den)

    def __eq__(self, other):
        if not isinstance(other, QMat):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def to_rationals(self) -> List[List[Fraction]]:
        return [[Fraction(int(x), self.den) for x in row] for row in self.num]

    def __repr__(self):
        return f"QMat({self.to_rationals()})"


def zeros(d: int) -> QMat:
    return QMat(np.zeros((d, d), dtype=np.int64))


def eye(d: int) -> QMat:
    return QMat(np.eye(d, dtype=np.int64))


def is_zero_matrix(a: QMat) -> bool:
    return a.is_zero()


def matmul(a: QMat, b: QMat) -> QMat:
    return a.dot(b)


def kron(a: QMat, b: QMat) -> QMat:
    return QMat(np.kron(a.num, b.num), a.den * b.den)


def fermion_operators(m: int) -> List[QMat]:
    """Annihilators f_1..f_m on 2^m states; bit j-1 of the state is mode j's occupation."""
    d = 1 << m
    out = []
    for j in range(m):
        f = np.zeros((d, d), dtype=np.int64)
        bit = 1 << j
        for k in range(d):
            if k & bit:
                f[k ^ bit, k] = -1 if bin(k & (bit - 1)).count("1") % 2 else 1
        out.append(QMat(f))
    return out


class MatrixContext:
    """Reduction rules for central symbols multiplying matrices."""

    def __init__(self, relations: Optional[Relations] = None, rules: Optional[Mapping] = None):
        self.relations = relations
        self.rules: Dict[str, Tuple[int, "MatrixPoly"]] = dict(rules or {})

    def adjoin(self, name: str, square) -> "MatrixContext":
        rules = dict(self.rules)
        rules[name] = (2, square)
        return MatrixContext(self.relations, rules)


_PLAIN = MatrixContext()


class MatrixPoly:
    """Map monomial -> exact square matrix; zero blocks are dropped."""

    __slots__ = ("dim", "blocks", "ctx")

    def __init__(self, dim: int, blocks: Mapping[Monomial, QMat], ctx: Optional[MatrixContext] = None):
        self.dim = dim
        self.ctx = ctx or _PLAIN
        self.blocks: Dict[Monomial, QMat] = {m: b for m, b in blocks.items() if not is_zero_matrix(b)}

    @classmethod
    def constant(cls, matrix: QMat, ctx: Optional[MatrixContext] = None) -> "MatrixPoly":
        return cls(matrix.shape[0], {ONE: matrix}, ctx)

    def with_context(self, ctx: MatrixContext) -> "MatrixPoly":
        return MatrixPoly(self.dim, self.blocks, ctx)

    def identity(self) -> "MatrixPoly":
        return MatrixPoly(self.dim, {ONE: eye(self.dim)}, self.ctx)

    def symbol(self, name: str) -> "MatrixPoly":
        return MatrixPoly(self.dim, {((name, 1),): eye(self.dim)}, self.ctx)

    def _scalar(self, c) -> "MatrixPoly":
        c = CentralPoly.lift(c)
        return MatrixPoly(self.dim, {m: eye(self.dim) * v for m, v in c.terms.items()}, self.ctx)

    def __bool__(self):
        return bool(self.blocks)

    def is_zero(self) -> bool:
        return not self.blocks

    def _coerce(self, other) -> Optional["MatrixPoly"]:
        if isinstance(other, MatrixPoly):
            return other
        if isinstance(other, (int, Fraction, CentralPoly)):
            return self._scalar(other)
        if isinstance(other, NCElement) and not other.algebra.generators:
            sp = other.scalar_part()
            return self._scalar(sp)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        blocks = dict(self.blocks)
        for m, b in o.blocks.items():
            blocks[m] = blocks[m] + b if m in blocks else b
        return MatrixPoly(self.dim, blocks, self._ctx(o))

    __radd__ = __add__

    def _ctx(self, o: "MatrixPoly") -> MatrixContext:
        return self.ctx if self.ctx is not _PLAIN else o.ctx

    def __neg__(self):
        return MatrixPoly(self.dim, {m: -b for m, b in self.blocks.items()}, self.ctx)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return MatrixPoly(self.dim, {m: b * c for m, b in self.blocks.items()}, self.ctx)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._mul(o)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o._mul(self)

    def _mul(self, o: "MatrixPoly") -> "MatrixPoly":
        ctx = self._ctx(o)
        acc: Dict[Monomial, QMat] = {}
        for m1, b1 in self.blocks.items():
            for m2, b2 in o.blocks.items():
                m = mono_mul(m1, m2)
                p = matmul(b1, b2)
                acc[m] = acc[m] + p if m in acc else p
        return MatrixPoly(self.dim, acc, ctx)._reduced()

    def _reduced(self) -> "MatrixPoly":
        ctx = self.ctx
        if ctx.relations is None and not ctx.rules:
            return self
        blocks = self.blocks
        changed = True
        while changed:
            changed = False
            out: Dict[Monomial, QMat] = {}
            for m, b in blocks.items():
                if ctx.relations is not None and not ctx.relations.is_reduced(m):
                    for m2, v in ctx.relations.reduce_monomial(m).items():
                        out[m2] = out[m2] + b * v if m2 in out else b * v
                    changed = True
                    continue
                hit = None
                for s, (deg, _) in ctx.rules.items():
                    if mono_degree(m, s) >= deg:
                        hit = s
                        break
                if hit is None:
                    out[m] = out[m] + b if m in out else b
                    continue
                changed = True
                deg, value = ctx.rules[hit]
                k = mono_degree(m, hit)
                rest = mono_without(m, hit)
                if k - deg:
                    rest = mono_mul(rest, ((hit, k - deg),))
                for m2, vb in value.blocks.items():
                    key = mono_mul(rest, m2)
                    p = matmul(b, vb)
                    out[key] = out[key] + p if key in out else p
            blocks = {m: b for m, b in out.items() if not is_zero_matrix(b)}
        return MatrixPoly(self.dim, blocks, ctx)

    def __pow__(self, k: int):
        out = self.identity()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return not (self - o)

    __hash__ = None

    def coefficient(self, symbol: str, k: int) -> "MatrixPoly":
        return MatrixPoly(self.dim, {mono_without(m, symbol): b for m, b in self.blocks.items()
                                     if mono_degree(m, symbol) == k}, self.ctx)

    def subs(self, symbol: str, value) -> "MatrixPoly":
        top = max((mono_degree(m, symbol) for m in self.blocks), default=0)
        if top == 0:
            return self
        val = value if isinstance(value, MatrixPoly) else self._scalar(value)
        out = MatrixPoly(self.dim, {}, self.ctx)
        power = self.identity()
        for k in range(top + 1):
            part = self.coefficient(symbol, k)
            if part:
                out = out + part * power
            power = power * val
        return out

    def scalar_part(self) -> Optional[CentralPoly]:
        """The value as a CentralPoly if every block is a multiple of the identity."""
        terms = {}
        for m, b in self.blocks.items():
            c = b.num[0, 0]
            if (b.num != np.eye(self.dim, dtype=b.num.dtype) * c).any():
                return None
            terms[m] = Fraction(int(c), b.den)
        return CentralPoly(terms)

    def __str__(self):
        parts = []
        for m in sorted(self.blocks):
            b = self.blocks[m]
            nz = [(i, j, b[i, j]) for i in range(self.dim) for j in range(self.dim) if b[i, j] != 0]
            label = "*".join(f"{s}^{k}" if k > 1 else s for s, k in m) or "1"
            parts.append(f"{label}: " + ", ".join(f"[{i},{j}]={v}" for i, j, v in nz[:6])
                         + (" ..." if len(nz) > 6 else ""))
        return "Matrix{" + "; ".join(parts) + "}" if parts else "0"

    __repr__ = __str__


class FockBackend:
    """Matrices for every generator of an algebra."""

    def __init__(self, algebra: AlgebraSpec, dimension: int, matrices: Dict[int, QMat]):
        self.algebra = algebra
        self.dimension = dimension
        self.matrices = matrices
        self._context: Optional[MatrixContext] = None

    def context(self) -> MatrixContext:
        """Reduction rules of the algebra's central symbols, carried over to matrices."""
        if self._context is None:
            ctx = MatrixContext(self.algebra.relations)
            for name, (deg, value) in self.algebra.nc_rules.items():
                ctx = MatrixContext(ctx.relations, {**ctx.rules, name: (deg, self.evaluate(value, ctx))})
            self._context = ctx if ctx.relations is not None or ctx.rules else _PLAIN
        return self._context

    def evaluate(self, e: NCElement, ctx: Optional[MatrixContext] = None) -> MatrixPoly:
        if ctx is None:
            ctx = self.context()
        if e.algebra is not self.algebra:
            e = e.lift(self.algebra) if e.algebra.generators else self.algebra.scalar(e.scalar_part())
        blocks: Dict[Monomial, QMat] = {}
        d = self.dimension
        cache: Dict[Tuple[int, ...], QMat] = {}
        for (w, m), c in e._t.items():
            mat = cache.get(w)
            if mat is None:
                mat = eye(d)
                for x in w:
                    mat = matmul(mat, self.matrices[x])
                cache[w] = mat
            blocks[m] = blocks[m] + mat * c if m in blocks else mat * c
        return MatrixPoly(d, blocks, ctx)

    def matrix(self, e: NCElement) -> QMat:
        """Matrix of an element whose coefficients are plain rationals."""
        mp = self.evaluate(e)
        if any(m != ONE for m in mp.blocks):
            raise ValueError("element has symbolic coefficients; use evaluate()")
        return mp.blocks.get(ONE, zeros(self.dimension))


def _family_matrices(fam) -> Tuple[int, List[QMat]]:
    if fam.kind == FERMIONIC:
        n = fam.n
        f = fermion_operators(n)
        xs = [fi.T for fi in f]
        ds = []
        for b in range(1, n + 1):
            acc = zeros(1 << n)
            for c in range(1, n + 1):
                v = fam.pair(c, b)
                if v:
                    acc = acc + f[c - 1] * v
            ds.append(acc)
        return 1 << n, xs + ds
    if fam.kind == CLIFFORD:
        n = fam.n
        ident = all(fam.pair(a, b) == (1 if a == b else 0) for a in range(1, n + 1) for b in range(1, n + 1))
        if fam.sign != 1 or not ident:
            raise UnsupportedFamily("only Clifford families with the identity pairing have a Fock realization")
        if n % 2:
            raise UnsupportedFamily("odd-dimensional Clifford families are handled symbolically only")
        m = n // 2
        f = fermion_operators(m)
        i2 = eye(2)
        j2 = QMat(np.array([[0, -1], [1, 0]], dtype=np.int64))
        half = Fraction(1, 2)
        out = []
        for j in range(m):
            fd = f[j].T
            out.append(kron(f[j] + fd * half, i2))
            out.append(kron(f[j] - fd * half, j2))
        return 2 << m, out
    if fam.kind == MATRIX_UNITS:
        n = fam.n
        out = []
        for i in range(n):
            for j in range(n):
                e = np.zeros((n, n), dtype=np.int64)
                e[i, j] = 1
                out.append(QMat(e))
        return n, out
    if fam.kind == BOSONIC:
        raise UnsupportedFamily("bosonic Heisenberg pairs need an infinite-dimensional space")
    if fam.kind == FREE:
        raise UnsupportedFamily("free families have no finite faithful realization")
    raise UnsupportedFamily(fam.kind)


def fock_backend(spec: AlgebraSpec) -> FockBackend:
    blocks = [_family_matrices(f) for f in spec.families]
    dims = [d for d, _ in blocks]
    total = 1
    for d in dims:
        total *= d
    matrices: Dict[int, QMat] = {}
    gid = 0
    for k, (d, mats) in enumerate(blocks):
        left = 1
        for dd in dims[:k]:
            left *= dd
        right = total // (left * d)
        for mat in mats:
            full = mat
            if left > 1:
                full = kron(eye(left), full)
            if right > 1:
                full = kron(full, eye(right))
            matrices[gid] = full
            gid += 1
    return FockBackend(spec, total, matrices)


def supports(spec: AlgebraSpec) -> bool:
    try:
        for f in spec.families:
            _family_matrices(f)
    except UnsupportedFamily:
        return False
    return True
