"""Constraint checks for linear and quadratic L-operators.

Every check returns a CheckResult (or a ConstraintReport collecting several)
computed from exact normal forms; nothing is short-circuited, so a report
lists every failing identity with its first nonzero entry.

Entries of the generator matrices may be NCElements (symbolic backend) or
MatrixPolys (Fock matrix backend); the checks only use ring operations.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .coefficients import CentralPoly, merge_relations
from .errors import (
    AlgebraMismatch,
    DimensionMismatch,
    LieViolation,
    NonCentralCasimir,
    UnsupportedFamily,
    UnsupportedOrder,
    W12Nonzero,
)
from .fock import MatrixPoly
from .metric import Metric
from .ncalgebra import (
    AlgebraSpec,
    NCElement,
    adjoin_central,
    anticommutator,
    clifford_family,
    commutator,
    free_family,
    is_central,
)
from .reps import GeneratorMatrix, casimir_m2, graded_split, one_like
from .results import NONZERO, ZERO, CheckResult, ConstraintReport, EvaluationData, result_from
from .tensorspace import SpectralOperator, TensorOperator, entry_degree, make_ipk, make_r, sum_entries, sym_split

HALF = Fraction(1, 2)


# ring plumbing -----------------------------------------------------------
class Ops:
    """I, P, K and P - eps K on V (x) V with entries in the ring of ``sample``."""

    def __init__(self, metric: Metric, sample):
        one = one_like(sample)
        self.metric = metric
        self.one = one
        I, P, K = make_ipk(metric)
        self.I = I.map(lambda c: one * c)
        self.P = P.map(lambda c: one * c)
        self.K = K.map(lambda c: one * c)
        self.PK = self.P - self.K * metric.eps


def _ops(G: GeneratorMatrix) -> Ops:
    return Ops(G.metric, G._sample)


def _sq(X: TensorOperator) -> TensorOperator:
    return X * X


def _probe_elements(*mats: GeneratorMatrix) -> List:
    """Entries used as the 'other side' in centrality tests."""
    out = []
    for M in mats:
        if M is None:
            continue
        for row in M.entries:
            out.extend(x for x in row if x)
    return out


def _commutes_with(x, probes) -> Tuple[bool, Optional[object]]:
    if isinstance(x, NCElement):
        return is_central(x, probes)
    for p in probes:
        if x * p - p * x:
            return False, p
    return True, None


def _as_scalar(x):
    """A scalar value of a ring element (CentralPoly) or None."""
    if isinstance(x, (NCElement, MatrixPoly)):
        return x.scalar_part()
    return CentralPoly.lift(x)


def _display(x):
    s = _as_scalar(x)
    return s if s is not None else x


def _trace_const(M: GeneratorMatrix):
    return M.trace() * Fraction(1, M.n)


def proportional_part(M: GeneratorMatrix, id: str, notes=None) -> Tuple[object, CheckResult]:
    """Return (t, result) with t = tr(M)/n and result testing M - t I = 0."""
    t = _trace_const(M)
    diff = M - M.identity() * t
    return t, result_from(id, diff, notes)


# Lie relation, linear evaluation ----------------------------------------
def lie_difference(Gbar: GeneratorMatrix) -> TensorOperator:
    """[Gbar_1 + P - eps K, Gbar_2]."""
    ops = _ops(Gbar)
    G1, G2 = Gbar.slot(1), Gbar.slot(2)
    return commutator(G1 + ops.PK, G2)


def check_lie(Gbar: GeneratorMatrix) -> CheckResult:
    return result_from("LIE", lie_difference(Gbar))


def linear_constraints(G: GeneratorMatrix) -> Dict[str, TensorOperator]:
    """The three raw constraints of the linear ansatz L(u) = u + G."""
    m = G.metric
    eps, beta = m.eps, m.beta
    ops = _ops(G)
    K, P = ops.K, ops.P
    G1, G2 = G.slot(1), G.slot(2)
    c11 = commutator(K, G1 + G2) * eps
    c12 = commutator(G1, G2) + (G1 - G2) * P - commutator(K, G2) * eps
    Gm = G1 - ops.I * beta
    c13 = (K * Gm * G2 - G2 * Gm * K) * eps
    return {"C.1.1": c11, "C.1.2": c12, "C.1.3": c13}


def check_linear(G: GeneratorMatrix) -> ConstraintReport:
    rep = ConstraintReport()
    for cid, diff in linear_constraints(G).items():
        rep.add(result_from(cid, diff))
    dec = graded_split(G)
    g, Gbar = dec.trace_part, dec.antisym
    rep.add(result_from("G.SYM_TRACELESS", dec.sym_traceless))
    probes = _probe_elements(G)
    ok, w = _commutes_with(g, probes)
    rep.add(CheckResult("G.TRACE_CENTRAL", ZERO if ok else NONZERO, None if ok else ((), g * w - w * g)))
    beta = G.metric.beta
    S = Gbar * Gbar + Gbar * beta
    m2 = casimir_m2(Gbar)
    c13, res = proportional_part(S, "C163")
    rep.add(res)
    rep.centrals = EvaluationData(g=_display(g), m2=_display(m2), c13=_display(c13))
    return rep


# W12, chi, spin conditions -----------------------------------------------
def w12_closed(Gbar: GeneratorMatrix) -> TensorOperator:
    """-(Gbar_2 + eps)((P - eps K) Gbar_2 - eps Gbar_1)."""
    eps = Gbar.metric.eps
    ops = _ops(Gbar)
    G1, G2 = Gbar.slot(1), Gbar.slot(2)
    return -((G2 + ops.I * eps) * (ops.PK * G2 - G1 * eps))


def _graded_sign(perm: Sequence[int], eps: int) -> int:
    if eps == -1:
        return 1
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


_PERMS4 = list(permutations(range(4)))
_PERMS3 = list(permutations(range(3)))


def graded_antisymmetrize(f: Callable[[Tuple[int, ...]], object], idx: Tuple[int, ...], eps: int, zero):
    """(1/k!) sum_sigma sgn_eps(sigma) f(idx o sigma): antisymmetric for eps=+1, symmetric for eps=-1."""
    perms = _PERMS4 if len(idx) == 4 else _PERMS3 if len(idx) == 3 else list(permutations(range(len(idx))))
    acc = zero
    for p in perms:
        v = f(tuple(idx[i] for i in p))
        if v:
            acc = acc + v * _graded_sign(p, eps)
    return acc * Fraction(1, len(perms))


def w12_index(Gbar: GeneratorMatrix, scale=None) -> TensorOperator:
    """W as an operator whose lowered entries are scale * G_[a1 b1 G_a2 b2).

    The lowered entry W_{a1 b1, a2 b2} sits at row (a1, a2), column (b1, b2)
    after raising a1 and a2 with the metric. With the default scale 3 eps
    (the bracket normalized by 1/4!) it coincides with ``w12_closed``.
    """
    m = Gbar.metric
    n, eps = m.n, m.eps
    scale = 3 * eps if scale is None else scale
    low = Gbar.lowered()
    zero = Gbar.zero()

    def prod(t):
        a, b, c, d = t
        x, y = low[a - 1][b - 1], low[c - 1][d - 1]
        return x * y if x and y else zero

    lowered: Dict[Tuple[int, int, int, int], object] = {}
    for a1 in range(1, n + 1):
        for b1 in range(1, n + 1):
            for a2 in range(1, n + 1):
                for b2 in range(1, n + 1):
                    key = (a1, b1, a2, b2)
                    v = graded_antisymmetrize(prod, key, eps, zero)
                    if v:
                        lowered[key] = v * scale
    entries = []
    for (a1, b1, a2, b2), v in lowered.items():
        for c1, u1 in m.up_row(a1):
            for c2, u2 in m.up_row(a2):
                entries.append((((c1, c2), (b1, b2)), v * (u1 * u2)))
    return TensorOperator.from_entries(m, 2, entries)


def compute_w12(Gbar: GeneratorMatrix) -> Tuple[TensorOperator, ConstraintReport]:
    """Closed form of W12 plus a report comparing it with the index form and
    checking W K = K W = 0 and W P = P W = -eps W."""
    m = Gbar.metric
    eps = m.eps
    ops = _ops(Gbar)
    W = w12_closed(Gbar)
    rep = ConstraintReport()
    rep.add(result_from("W12", W))
    Wi = w12_index(Gbar)
    rep.add(result_from("W12.INDEX_FORM", W - Wi))
    rep.add(result_from("W12.KW", ops.K * W))
    rep.add(result_from("W12.WK", W * ops.K))
    rep.add(result_from("W12.PW", ops.P * W + W * eps))
    rep.add(result_from("W12.WP", W * ops.P + W * eps))
    return W, rep


def char_poly(order: int, metric: Metric, m2="m2"):
    """Coefficients of the admissible characteristic polynomial.

    order 2: (A, B) of Gbar^2 + A Gbar + B; order 3: (D, E, F) of
    Gbar^3 + D Gbar^2 + E Gbar + F. ``m2`` may be a symbol name or a value.
    """
    mm = CentralPoly.symbol(m2) if isinstance(m2, str) else m2
    eps, beta = metric.eps, metric.beta
    if order == 2:
        return (CentralPoly.const(beta), -mm)
    if order == 3:
        return (CentralPoly.const(eps + 2 * beta), (mm * Fraction(-1, 2) + 2 * beta) * eps, mm * Fraction(-1, 2))
    raise UnsupportedOrder(f"characteristic polynomials are available for orders 2 and 3, not {order}")


def matrix_poly(Gbar: GeneratorMatrix, coeffs: Sequence) -> GeneratorMatrix:
    """Gbar^k + c_1 Gbar^{k-1} + ... + c_k with ring-valued c_i."""
    out = Gbar.identity()
    for c in coeffs:
        out = out * Gbar + Gbar.identity() * c
    return out


def chi_eval(Gbar: GeneratorMatrix, m2) -> GeneratorMatrix:
    """chi(Gbar) = Gbar^3 + (2 beta + eps) Gbar^2 + eps(2 beta - m2/2) Gbar - m2/2."""
    m = Gbar.metric
    eps, beta = m.eps, m.beta
    one = Gbar.one()
    m2 = one * m2 if not isinstance(m2, (NCElement, MatrixPoly)) else m2
    D = one * (2 * beta + eps)
    E = (one * (2 * beta) - m2 * HALF) * eps
    F = m2 * (-HALF)
    return matrix_poly(Gbar, (D, E, F))


def chi_contractions(Gbar: GeneratorMatrix, m2) -> ConstraintReport:
    """K G_2 W = -2 eps K chi_2 and its mirror W G_1 K = -2 eps chi_1 K."""
    eps = Gbar.metric.eps
    ops = _ops(Gbar)
    W = w12_closed(Gbar)
    chi = chi_eval(Gbar, m2)
    G1, G2 = Gbar.slot(1), Gbar.slot(2)
    rep = ConstraintReport()
    rep.add(result_from("KGW", ops.K * G2 * W + ops.K * chi.slot(2) * (2 * eps)))
    rep.add(result_from("WGK", W * G1 * ops.K + chi.slot(1) * ops.K * (2 * eps)))
    return rep


def k_contractions(Gbar: GeneratorMatrix) -> ConstraintReport:
    """Identities for K times powers of a Lie-algebra Gbar, with M = tr Gbar^2.

    K.ANTISYM   K G_2 = -K G_1
    K.SQUARE    K S_1 = K S_2 and S_1 K = S_2 K for S = Gbar^2 + beta Gbar
    K.CUBIC     K (G_2^3 + (beta + n/2) G_2^2 - M/2) = -K (G_1^3 + (beta + n/2) G_1^2 - M/2)
    K.QUARTIC   K (G_1^4 - G_2^4 + (eps + 3 beta)(G_1^3 - G_2^3) - (beta^2 (eps + 2 beta) + M/2)(G_1 - G_2)) = 0
    """
    m = Gbar.metric
    n, eps, beta = m.n, m.eps, m.beta
    K = _ops(Gbar).K
    M = trace_square(Gbar)
    G1, G2 = Gbar.slot(1), Gbar.slot(2)
    S = Gbar * Gbar + Gbar * beta
    G2m = Gbar * Gbar
    G3 = G2m * Gbar
    G4 = G3 * Gbar
    T = G3 + G2m * (beta + Fraction(n, 2)) - Gbar.identity() * (M * HALF)
    quartic = ((G4.slot(1) - G4.slot(2)) + (G3.slot(1) - G3.slot(2)) * (eps + 3 * beta)
               - (G1 - G2) * (Gbar.one() * (beta * beta * (eps + 2 * beta)) + M * HALF))
    rep = ConstraintReport()
    rep.add(result_from("K.ANTISYM", K * G2 + K * G1))
    rep.add(result_from("K.SQUARE", (K * S.slot(1) - K * S.slot(2)) + (S.slot(1) * K - S.slot(2) * K)))
    rep.add(result_from("K.CUBIC", K * T.slot(2) + K * T.slot(1)))
    rep.add(result_from("K.QUARTIC", K * quartic))
    return rep


class IndexTable(dict):
    """Map index tuple -> ring element with CheckResult-compatible access."""

    def first_nonzero(self):
        for k in sorted(self):
            if self[k]:
                return k, self[k]
        return None


def _composite_clifford(Gbar: GeneratorMatrix):
    """(lowered Gbar entries, upper c^a list, unit) in a ring where a fresh
    Clifford/oscillator family commutes with the entries of Gbar."""
    m = Gbar.metric
    sample = Gbar._sample
    if isinstance(sample, MatrixPoly):
        from .fock import _family_matrices, eye, kron
        fam = clifford_family(m, "s")
        dim_c, mats = _family_matrices(fam)
        d = sample.dim
        lift = lambda x: MatrixPoly(d * dim_c, {k: kron(b, eye(dim_c)) for k, b in x.blocks.items()}, x.ctx)
        low = [[lift(x) for x in row] for row in Gbar.lowered()]
        ctx = sample.ctx
        cs = [MatrixPoly(d * dim_c, {(): kron(eye(d), c)}, ctx) for c in mats]
        return low, cs, cs[0].identity()
    alg = Gbar.algebra
    taken = {s for f in alg.families for s in f.names} | set(alg.centrals)
    name = next(s for s in ("s", "sg", "gam", "spin") if s not in taken)
    comp = alg.extended([clifford_family(m, name)])
    low = [[x.lift(comp) if x.algebra.generators else comp.zero() + x for x in row] for row in Gbar.lowered()]
    cs = [comp.gen(name, a, upper=True) for a in range(1, m.n + 1)]
    return low, cs, comp.one()


def check_spin_conditions(Gbar: GeneratorMatrix, m2=None, require_lie: bool = True) -> ConstraintReport:
    """The four equivalent forms of the spinorial condition on Gbar.

    SPIN.1: {G_{a1[a2}, G_{b1 b2)}} = 0
    SPIN.2: {G_{a1a2},G_{b1b2}} + {G_{a1b1},G_{b2a2}} + {G_{a1b2},G_{a2b1}} = 0
    SPIN.3: W12 = 0
    SPIN.4: Ghat^2 + beta Ghat = (eps/8) n m2 with Ghat = 1/2 c^[a c^b) G_ab, where
            c^[a c^b) = (c^a c^b - eps c^b c^a)/2 for a fresh commuting Clifford
            (so) or oscillator (sp) family
    """
    if require_lie and not check_lie(Gbar).ok:
        raise LieViolation("the spin conditions presuppose the Lie relation")
    m = Gbar.metric
    n, eps, beta = m.n, m.eps, m.beta
    low = Gbar.lowered()
    zero = Gbar.zero()
    rng = range(1, n + 1)
    rep = ConstraintReport()

    t1, t2 = IndexTable(), IndexTable()
    for a1 in rng:
        for a2 in rng:
            for b1 in rng:
                for b2 in rng:
                    def f(t, a1=a1):
                        x, y = low[a1 - 1][t[0] - 1], low[t[1] - 1][t[2] - 1]
                        return x * y + y * x if x and y else zero
                    v = graded_antisymmetrize(f, (a2, b1, b2), eps, zero)
                    if v:
                        t1[(a1, a2, b1, b2)] = v
                    G = lambda i, j: low[i - 1][j - 1]
                    v2 = sum((anticommutator(G(p, q), G(r, s)) for p, q, r, s in
                              ((a1, a2, b1, b2), (a1, b1, b2, a2), (a1, b2, a2, b1))), zero)
                    if v2:
                        t2[(a1, a2, b1, b2)] = v2
    rep.add(result_from("SPIN.1", t1))
    rep.add(result_from("SPIN.2", t2))
    rep.add(result_from("SPIN.3", w12_closed(Gbar)))

    try:
        clow, cs, one = _composite_clifford(Gbar)
    except Exception as exc:  # infinite-dimensional family on the matrix backend
        rep.flags.append(f"SPIN.4 skipped: {exc}")
    else:
        ghat = one * 0
        for a in rng:
            for b in rng:
                x = clow[a - 1][b - 1]
                if not x:
                    continue
                cab = (cs[a - 1] * cs[b - 1] - cs[b - 1] * cs[a - 1] * eps) * HALF
                ghat = ghat + cab * x
        ghat = ghat * HALF
        trace_sq = casimir_m2(Gbar) * n
        if isinstance(trace_sq, NCElement):
            trace_sq = trace_sq.lift(ghat.algebra) if trace_sq.algebra.generators else one * trace_sq.scalar_part()
        elif isinstance(trace_sq, MatrixPoly):
            from .fock import eye, kron
            dim_c = ghat.dim // trace_sq.dim
            trace_sq = MatrixPoly(ghat.dim, {k: kron(b, eye(dim_c)) for k, b in trace_sq.blocks.items()}, trace_sq.ctx)
        c = trace_sq * Fraction(eps, 8)
        rep.add(result_from("SPIN.4", ghat * ghat + ghat * beta - c))
    verdicts = {r.status for r in rep.results}
    rep.flags.append("forms agree" if len(verdicts) == 1 else "forms DISAGREE")
    return rep


# quadratic evaluation ------------------------------------------------------
def trace_square(Gbar: GeneratorMatrix):
    """tr(Gbar^2) = n m2, the Casimir normalization entering chi and the
    quadratic-evaluation relations."""
    return casimir_m2(Gbar) * Gbar.n


def quadratic_constraints(G: GeneratorMatrix, H: GeneratorMatrix) -> Dict[str, TensorOperator]:
    """The eight constraints of L(u) = u^2 + uG + H in their displayed forms."""
    m = G.metric
    eps, beta = m.eps, m.beta
    ops = _ops(G)
    PK, P = ops.PK, ops.P
    G1, G2, H1, H2 = G.slot(1), G.slot(2), H.slot(1), H.slot(2)
    c4 = commutator(G1, H2) - commutator(G2, H1) - commutator(PK, H1 - H2)
    return {
        "C.2.1": commutator(PK, G1 + G2),
        "C.2.2": commutator(G1, G2) - commutator(PK, G1 - G2) * HALF,
        "C.2.3": commutator(PK, H1 + H2 - (G1 * G1 + G2 * G2) * HALF),
        "C.2.4": c4,
        "C.2.5": P * c4 * P,
        "C.2.6": commutator(PK, anticommutator(H1, G2) + anticommutator(G1, H2)),
        "C.2.7": commutator(H1, H2) + commutator(PK, anticommutator(G1, H2) - anticommutator(G2, H1)) * Fraction(1, 4),
        "C.2.8": commutator(PK, anticommutator(H1, H2) - (H1 + H2) * (beta * eps)),
    }


def _central_result(id: str, x, probes) -> CheckResult:
    ok, w = _commutes_with(x, probes)
    return CheckResult(id, ZERO if ok else NONZERO, None if ok else ((), x * w - w * x))


def quadratic_structure(G: GeneratorMatrix, H: GeneratorMatrix):
    """Trace/graded decomposition of (G, H): returns a dict with g, Gbar, h,
    Hbar, the graded-symmetric square S = Gbar^2 + beta Gbar and M = tr Gbar^2."""
    beta = G.metric.beta
    dg = graded_split(G)
    Gbar = dg.antisym
    S = Gbar * Gbar + Gbar * beta
    dh = graded_split(H - S * HALF)
    return {"g": dg.trace_part, "Gbar": Gbar, "Gsym": dg.sym_traceless, "S": S,
            "h": dh.trace_part, "Hbar": dh.antisym, "Hsym": dh.sym_traceless,
            "M": trace_square(Gbar), "m2": casimir_m2(Gbar)}


def product_relations(st: dict, metric: Metric, with_g_terms: bool = False) -> Tuple[List[CheckResult], dict]:
    """Relations for the products of Gbar, Hbar: anticommutator, commutator
    (via W12 and chi) and square. Returns results and the trace constants."""
    eps, beta = metric.eps, metric.beta
    g, h, Gbar, Hbar, S, M = st["g"], st["h"], st["Gbar"], st["Hbar"], st["S"], st["M"]
    out = []
    A = Hbar * Gbar + Gbar * Hbar + Hbar * (2 * beta) - S * g
    c26, r = proportional_part(A, "P5.ANTICOMMUTATOR")
    out.append(r)

    ops = _ops(Gbar)
    PK = ops.PK
    G1, G2, H1, H2 = Gbar.slot(1), Gbar.slot(2), Hbar.slot(1), Hbar.slot(2)
    chi = chi_eval(Gbar, M)
    alpha = h * 4 + Gbar.one() * (beta * beta + 1 - 2 * eps * beta) + M * Fraction(eps, 2)
    W = w12_closed(Gbar)
    eighth = Fraction(1, 8)
    C7 = (commutator(H1, H2) + commutator(W, G1 - G2) * eighth
          + commutator(PK, chi.slot(1) - chi.slot(2) - (H1 - H2) * (g * 4)) * eighth
          + commutator(PK, G1 - G2) * (alpha * eighth))
    out.append(result_from("P5.COMMUTATOR", C7))

    G2m = Gbar * Gbar
    G3 = G2m * Gbar
    G4 = G3 * Gbar
    rhs = (G4 * Fraction(1, 4) - Hbar * (g * beta) + G3 * beta
           + G2m * (h + Fraction(5, 4) * beta * beta) + Gbar * (h * (2 * beta) + Fraction(1, 2) * beta ** 3))
    if with_g_terms:
        rhs = rhs + G2m * (g * (beta / 2)) + Gbar * (g * (beta * beta / 2))
    Q = Hbar * Hbar - rhs
    c28, r = proportional_part(Q, "P5.SQUARE")
    out.append(r)
    return out, {"c26": c26, "c28": c28, "alpha": alpha}


def check_quadratic(G: GeneratorMatrix, H: GeneratorMatrix) -> ConstraintReport:
    """Eight displayed constraints, the decomposition structure and the
    product relations for L(u) = u^2 + uG + H."""
    metric = G.metric
    rep = ConstraintReport()
    raw = quadratic_constraints(G, H)
    for cid, diff in raw.items():
        rep.add(result_from(cid, diff))
    st = quadratic_structure(G, H)
    rep.add(result_from("Q.G_SYM_TRACELESS", st["Gsym"]))
    rep.add(result_from("Q.H_SYM_TRACELESS", st["Hsym"]))
    probes = _probe_elements(G, H)
    rep.add(_central_result("Q.CENTRAL.g", st["g"], probes))
    rep.add(_central_result("Q.CENTRAL.h", st["h"], probes))
    rep.add(result_from("Q.ADJOINT", commutator(st["Gbar"].slot(1) + _ops(G).PK, st["Hbar"].slot(2))))
    prods, consts = product_relations(st, metric)
    for r in prods:
        rep.add(r)
    rep.add(_central_result("Q.CENTRAL.c26", consts["c26"], probes))
    rep.add(_central_result("Q.CENTRAL.c28", consts["c28"], probes))
    K = _ops(G).K
    C8 = (st["Hbar"] * st["Hbar"] * -1 + st["Gbar"] ** 4 * Fraction(1, 4) + st["Gbar"] ** 3 * metric.beta
          + st["Gbar"] ** 2 * (st["h"] + Fraction(5, 4) * metric.beta ** 2))
    rep.add(result_from("Q.C8_STANDARD_FORM", commutator(K, C8.slot(1) + C8.slot(2))))
    if all(rep.by_id(f"C.2.{k}").ok for k in range(1, 9)):
        bad = [r.id for r in prods if not r.ok]
        if bad:
            rep.flags.append("internal: product relations fail although the eight constraints hold: " + ", ".join(bad))
    for name in ("h", "c26", "c28"):
        val = st.get(name, consts.get(name))
        if isinstance(val, (NCElement, MatrixPoly)) and val.scalar_part() is None:
            rep.flags.append(f"{name} is central but not a scalar")
    rep.centrals = EvaluationData(g=_display(st["g"]), h=_display(st["h"]), m2=_display(st["m2"]),
                                  alpha=_display(consts["alpha"]), c26=_display(consts["c26"]),
                                  c28=_display(consts["c28"]))
    return rep


# Lie algebra resolution of the quadratic evaluation -------------------------
CORRECTED = "corrected"
LITERAL = "literal"


def _fresh_name(G: GeneratorMatrix, base: str) -> str:
    alg = G.algebra
    taken = set()
    if alg is not None:
        taken = {s for f in alg.families for s in f.names} | set(alg.centrals)
        if alg.relations is not None:
            taken |= set(alg.relations.order)
    name, k = base, 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def adjoin_square_root(Gbar: GeneratorMatrix, name: str, square) -> Tuple[GeneratorMatrix, object, Callable]:
    """Adjoin a central symbol whose square is ``square``; returns the matrix
    moved into the new ring, the symbol, and a function moving other entries."""
    probes = _probe_elements(Gbar)
    sample = Gbar._sample
    if isinstance(sample, MatrixPoly):
        ctx = sample.ctx.adjoin(name, square if isinstance(square, MatrixPoly) else sample.identity() * square)
        move = lambda x: x.with_context(ctx) if isinstance(x, MatrixPoly) else x
        sym = MatrixPoly(sample.dim, {((name, 1),): sample.identity().blocks[()]}, ctx)
    else:
        alg2 = adjoin_central(Gbar.algebra, name, square, against=probes)
        move = lambda x: x.lift(alg2) if isinstance(x, NCElement) else alg2.scalar(x)
        sym = alg2.symbol(name)
    return Gbar.map(move), sym, move


class Resolution:
    """The quadratic L-operator built from a Lie algebra matrix Gbar."""

    def __init__(self, **fields):
        self.__dict__.update(fields)

    def lax(self) -> GeneratorMatrix:
        return lax_operator(self.G, self.H)


def resolve_quadratic(Gbar: GeneratorMatrix, central_relations: str = CORRECTED, symbol: str = "g") -> Resolution:
    """Steps shared by the resolution check: W12 = 0, central m2, adjoined g,
    h from the chosen central relations, and G, H.

    ``central_relations`` chooses h: "corrected" uses
    4h = g^2 - (beta - eps)^2 - eps tr(Gbar^2)/2, the value forced by the
    eight constraints; "literal" uses 4h = 2 beta^2 - 1 + 2 beta eps - m2/8
    with the (1/n) Casimir throughout. ``symbol`` names the adjoined g (a
    fresh variant is used if it is taken).
    """
    if central_relations not in (CORRECTED, LITERAL):
        raise ValueError(f"central_relations must be {CORRECTED!r} or {LITERAL!r}")
    m = Gbar.metric
    n, eps, beta = m.n, m.eps, m.beta
    pre = []
    wres = result_from("LR.W12", w12_closed(Gbar))
    if not wres.ok:
        raise W12Nonzero(f"W12 has a nonzero entry {wres.witness[0]}: {wres.witness[1]}")
    pre.append(wres)
    m2 = casimir_m2(Gbar)
    ok, w = _commutes_with(m2, _probe_elements(Gbar))
    if not ok:
        raise NonCentralCasimir(f"m2 does not commute with {w}")
    pre.append(CheckResult("LR.M2_CENTRAL", ZERO))
    flags = []
    if m2.scalar_part() is None:
        flags.append("m2 is central on the generators but not a scalar")

    gname = _fresh_name(Gbar, symbol)
    gsq = m2 * Fraction(-1, 8) - beta * beta
    Gb, g, move = adjoin_square_root(Gbar, gname, gsq)
    m2 = move(m2)
    gsq = move(gsq)
    M = m2 * n
    one = Gb.one()
    if central_relations == CORRECTED:
        h = (gsq - (beta - eps) ** 2 - M * Fraction(eps, 2)) * Fraction(1, 4)
        casimir = M
    else:
        h = (one * (2 * beta * beta - 1 + 2 * beta * eps) - m2 * Fraction(1, 8)) * Fraction(1, 4)
        casimir = m2
    G = Gb + Gb.identity() * g
    H = Gb * Gb * HALF + Gb * ((g + beta) * HALF) + Gb.identity() * h
    G.label, H.label = f"{Gbar.label} resolved G", f"{Gbar.label} resolved H"
    return Resolution(G=G, H=H, Gbar=Gb, g=g, gname=gname, gsq=gsq, h=h, m2=m2, casimir=casimir,
                      mode=central_relations, pre=pre, flags=flags)


def check_lie_resolution(Gbar: GeneratorMatrix, central_relations: str = CORRECTED) -> ConstraintReport:
    """Build L(u) = u^2 + u(g + Gbar) + h + (Gbar^2 + (beta + g) Gbar)/2 with a
    formal central g (g^2 = -beta^2 - m2/8) and verify every quadratic
    constraint together with the derived constants.

    With "literal" central relations the companion relation is
    alpha' = alpha + 3 g^2; with "corrected" ones it is alpha' = alpha - g^2.
    """
    res = resolve_quadratic(Gbar, central_relations)
    m = Gbar.metric
    eps, beta = m.eps, m.beta
    rep = ConstraintReport()
    for r in res.pre:
        rep.add(r)
    rep.flags.extend(res.flags)
    G, H, Gb, gsq, h, m2, casimir, gname = res.G, res.H, res.Gbar, res.gsq, res.h, res.m2, res.casimir, res.gname
    one = Gb.one()
    q = check_quadratic(G, H)
    rep.extend(q)
    st = quadratic_structure(G, H)
    _, pc = product_relations(st, m)
    c26, c28, alpha = pc["c26"], pc["c28"], pc["alpha"]
    if central_relations == LITERAL:
        alpha = h * 4 + one * (beta * beta + 1 - 2 * eps * beta) + m2 * Fraction(eps, 2)
        alpha_prime = alpha + gsq * 3
    else:
        alpha_prime = alpha - gsq
    rep.add(result_from("LR.C26", c26))
    rep.add(result_from("LR.C28", c28 * 4 - casimir * (Fraction(eps, 2) - beta)))
    rep.add(result_from("LR.ALPHA_PRIME", alpha_prime))
    chi = chi_eval(Gb, casimir)
    rep.add(result_from("LR.CHI", chi))
    Y = h * 4 - gsq
    G2m = Gb * Gb
    quartic = (G2m * G2m + G2m * Gb * (4 * beta) + G2m * (Y + 5 * beta * beta)
               + Gb * ((Y + beta * beta) * (2 * beta)) + Gb.identity() * (c28 * 4))
    factored = (Gb + Gb.identity(2 * beta - eps)) * chi
    rep.add(result_from("LR.R8", quartic - factored))
    rep.centrals = EvaluationData(g=gname, h=_display(h), m2=_display(m2), alpha=_display(alpha),
                                  c26=_display(c26), c28=_display(c28), a=f"{gname}/2")
    rep.flags.append(f"central relations: {central_relations}")
    return rep


# spectral L-operators ------------------------------------------------------
U, V, DELTA = "u", "v", "delta"


def _spectral(x, name: str):
    if isinstance(x, MatrixPoly):
        return x.symbol(name)
    if isinstance(x, NCElement):
        return x.algebra.symbol(name)
    return CentralPoly.symbol(name)


def lax_operator(G: GeneratorMatrix, H: Optional[GeneratorMatrix] = None, u: str = U) -> GeneratorMatrix:
    """L(u) = u I + G, or u^2 I + u G + H when H is given."""
    s = _spectral(G._sample, u)
    if H is None:
        L = G + G.identity() * s
    else:
        L = G.identity() * (s * s) + G * s + H
    L.label = f"L({u}) from {G.label or 'G'}"
    return L


def lax_degree(L: GeneratorMatrix, u: str = U) -> int:
    return max((entry_degree(x, u) for row in L.entries for x in row), default=0)


def _lift_scalar_op(op: TensorOperator, sample) -> TensorOperator:
    one = one_like(sample)
    return op.map(lambda c: one * c)


def rll_difference(L: GeneratorMatrix, u: str = U, v: str = V) -> SpectralOperator:
    """R12(u-v) L1(u) L2(v) - L2(v) L1(u) R12(u-v) on V (x) V."""
    m = L.metric
    if lax_degree(L, v):
        raise ValueError(f"L already depends on the symbol {v!r}")
    us, vs = CentralPoly.symbol(u), CentralPoly.symbol(v)
    R = _lift_scalar_op(make_r(m, us - vs), L._sample)
    L1 = L.slot(1)
    L2 = L.subs(u, vs).slot(2)
    return SpectralOperator.wrap(R * L1 * L2 - L2 * L1 * R)


def verify_rll(L: GeneratorMatrix, metric: Optional[Metric] = None) -> CheckResult:
    """RLL relation identically in u and v."""
    if metric is not None and metric.n != L.metric.n:
        raise ValueError("metric does not match the L-operator")
    return result_from("RLL", rll_difference(L))


class CenterFunction:
    """C_ab(u) = L_ca(u - beta) L^c_b(u) with its scalar part c(u)."""

    def __init__(self, lowered: List[list], c, report: ConstraintReport):
        self.lowered = lowered
        self.c = c
        self.report = report

    @property
    def proportional(self) -> bool:
        return self.report.by_id("CENTER.PROPORTIONAL").ok


def center_function(L: GeneratorMatrix, metric: Optional[Metric] = None, u: str = U) -> CenterFunction:
    m = metric or L.metric
    n, eps, beta = m.n, m.eps, m.beta
    us = CentralPoly.symbol(u)
    Lb = L.subs(u, us - beta)
    rng = range(1, n + 1)
    lowered = [[sum_entries([Lb[d, a] * L[c, b] * m.low(c, d) for c in rng for d in rng if m.low(c, d)]) or L.zero()
                for b in rng] for a in rng]
    norm = Fraction(1, eps * n)
    c = sum_entries([lowered[a - 1][b - 1] * m.up(a, b) for a in rng for b in rng if m.up(a, b)]) or L.zero()
    c = c * norm
    diff = TensorOperator(m, 1, {(a,): {(b,): lowered[a - 1][b - 1] - c * m.low(a, b) for b in rng} for a in rng})
    rep = ConstraintReport()
    prop = result_from("CENTER.PROPORTIONAL", diff)
    rep.add(prop)
    probes = [x.subs(u, CentralPoly.symbol(V)) for row in L.entries for x in row]
    ok, w = _commutes_with(c, probes)
    rep.add(CheckResult("CENTER.CENTRAL", ZERO if ok else NONZERO,
                        None if ok else ((), c * w - w * c)))
    rep.centrals = EvaluationData()
    return CenterFunction(lowered, c if prop.ok else None, rep)


def center_closed_form(metric: Metric, order: int, u=None, g=0, h=0, c13=0, c26=0, c28=0):
    """The scalar c(u) predicted for a linear (order 1) or quadratic (order 2)
    evaluation from its central constants."""
    eps, beta = metric.eps, metric.beta
    u = CentralPoly.symbol(U) if u is None else u
    if order == 1:
        return ((u + g) * (u + g - beta) - c13) * eps
    if order == 2:
        w = u - beta
        return ((u * u + u * g + h) * (w * w + w * g + h) - u * c26 + beta * c26 - c28) * eps
    raise UnsupportedOrder(f"no closed form for order {order}")


def _merged_algebra(a: AlgebraSpec, b: AlgebraSpec) -> AlgebraSpec:
    if a is b:
        return a
    extra = [f for f in b.families if f not in a.families]
    clash = {s for f in a.families for s in f.names} & {s for f in extra for s in f.names}
    if clash:
        raise AlgebraMismatch(f"families share the letter names {sorted(clash)}")
    ruled_a = set(a.nc_rules) | (set(a.relations.rules) if a.relations else set())
    ruled_b = set(b.nc_rules) | (set(b.relations.rules) if b.relations else set())
    shared = sorted(ruled_a & ruled_b)
    if shared and (a.relations != b.relations or any(s in a.nc_rules or s in b.nc_rules for s in shared)):
        raise AlgebraMismatch(f"both factors define rules for the central symbols {shared}; rename one")
    if b.relations is None and not b.nc_rules:
        return a.extended(extra, [c for c in b.centrals if c not in a.centrals])
    centrals = a.centrals + tuple(c for c in b.centrals if c not in a.centrals)
    merged = AlgebraSpec(a.metric, a.families + tuple(extra), centrals, merge_relations(a.relations, b.relations),
                         None, a.max_degree)
    for spec in (a, b):
        for name, (deg, value) in spec.nc_rules.items():
            merged.nc_rules[name] = (deg, value.lift(merged))
    return merged


def fuse(L1: GeneratorMatrix, L2: GeneratorMatrix, delta: str = DELTA, u: str = U) -> GeneratorMatrix:
    """L1(u) L2(u + delta) for factors acting on independent quantum spaces."""
    if L1.metric.n != L2.metric.n:
        raise DimensionMismatch("factors act on different auxiliary spaces")
    a1, a2 = L1.algebra, L2.algebra
    if isinstance(L1._sample, MatrixPoly) or isinstance(L2._sample, MatrixPoly):
        raise UnsupportedFamily("fuse symbolic factors; evaluate the product with a Fock backend afterwards")
    if a1 is not None and a2 is not None:
        alg = _merged_algebra(a1, a2)
        L1 = L1.map(lambda x: x.lift(alg))
        L2 = L2.map(lambda x: x.lift(alg))
    shifted = L2.subs(u, CentralPoly.symbol(u) + CentralPoly.symbol(delta))
    if a1 is None and a2 is not None:
        L1 = L1.map(a2.scalar)
    out = L1 * shifted
    out.label = f"{L1.label or 'L1'} * {L2.label or 'L2'}({u}+{delta})"
    return out


# decomposition of the quadratic RLL relation ---------------------------------
def _prefactors(metric: Metric, convention: str) -> Dict[int, CentralPoly]:
    u, v = CentralPoly.symbol(U), CentralPoly.symbol(V)
    b = metric.beta
    w = u + v
    if convention == LITERAL:
        return {1: u * v * v * w, 2: (u + b) * u * v * w, 3: -(u * v * w), 4: -((u + b) * u * w),
                5: -((u + b) * v * w), 6: u * v, 7: -(u * (u + b)), 8: -u}
    return {1: -(u * v * v * w), 2: (u + b) * u * v * w, 3: -(u * v * w), 4: (u + b) * u * w,
            5: (u + b) * u * v, 6: -(u * v), 7: u * (u + b), 8: -u}


def raw_expressions(G: GeneratorMatrix, H: GeneratorMatrix) -> Dict[int, TensorOperator]:
    """The eight bracket expressions multiplying the spectral prefactors."""
    m = G.metric
    eps, b = m.eps, m.beta
    ops = _ops(G)
    I, P, K = ops.I, ops.P, ops.K
    G1, G2, H1, H2 = G.slot(1), G.slot(2), H.slot(1), H.slot(2)
    Gm, Gp = G1 - I * b, G2 + I * b
    Hs = H1 - G1 * b + I * (b * b)
    return {
        1: commutator(K, G1 + G2) * eps,
        2: commutator(G1, G2) + (G1 - G2) * P - commutator(K, G2) * eps,
        3: (K * (H1 + H2 + Gm * G2) - (H1 + H2 + G2 * Gm) * K) * eps,
        4: commutator(G1, H2) + (H1 - H2) * P - commutator(K, H2) * eps,
        5: commutator(H1, G2) + (H1 - H2) * P + commutator(K, H1) * eps,
        6: (K * (H1 * Gp + Gm * H2) - (H2 * Gm + Gp * H1) * K) * eps,
        7: commutator(H1, H2) + (G2 * H1 - H2 * G1) * P - K * Gm * H2 * eps + H2 * Gm * K * eps,
        8: (K * Hs * H2 - H2 * Hs * K) * eps,
    }


def rll2_left_side(G: GeneratorMatrix, H: GeneratorMatrix, flipped: bool = False) -> SpectralOperator:
    """R(u) L1(u+v) L2(v) - L2(v) L1(u+v) R(u) for L(x) = x^2 + xG + H.

    ``flipped`` puts -G into the second product, as in the displayed form of
    this difference; that variant is not the RLL relation."""
    m = G.metric
    sample = G._sample
    one = one_like(sample)
    u, v = CentralPoly.symbol(U), CentralPoly.symbol(V)
    w = u + v
    ops = _ops(G)
    I = ops.I
    R = _lift_scalar_op(make_r(m, u), sample)
    G1, G2, H1, H2 = G.slot(1), G.slot(2), H.slot(1), H.slot(2)
    L1 = I * (one * (w * w)) + G1 * (one * w) + H1
    L2 = I * (one * (v * v)) + G2 * (one * v) + H2
    if flipped:
        L1b = I * (one * (w * w)) - G1 * (one * w) + H1
        L2b = I * (one * (v * v)) - G2 * (one * v) + H2
    else:
        L1b, L2b = L1, L2
    return SpectralOperator.wrap(R * L1 * L2 - L2b * L1b * R)


# (identity id, level of the constraint it belongs to)
TABLE_IDS = (
    ("c21.a", 1), ("c21.s", 1), ("c22.s", 2), ("c22.a", 2),
    ("acr23.1", 3), ("acr23.2", 3), ("acl23.1", 3), ("acl23.2", 3), ("sc23", 3),
    ("sc24", 4), ("ac24", 4), ("ac26.L", 6), ("ac26.R", 6), ("sc26", 6),
    ("sc27", 7), ("ac27", 7), ("ac28", 8), ("sc28", 8),
)
FREE, OPPOSITE, MODULO, UNRESOLVED = "free", "opposite sign", "modulo earlier constraints", "not established"


def reduction_table(G: GeneratorMatrix, H: GeneratorMatrix, C: Dict[int, TensorOperator]):
    """Both sides of every reduction identity, keyed by id."""
    m = G.metric
    eps, b, n = m.eps, m.beta, m.n
    ops = _ops(G)
    I, P, K, PK = ops.I, ops.P, ops.K, ops.PK
    G1, G2, H1, H2 = G.slot(1), G.slot(2), H.slot(1), H.slot(2)
    S = {k: sym_split(c) for k, c in C.items()}
    s = lambda k: S[k][0]
    a = lambda k: S[k][1]
    L = I - P * eps
    q = Fraction(1, 4)
    GG = commutator(G1, G2)
    return {
        "c21.a": (a(1), I * 0),
        "c21.s": (s(1), commutator(PK, G1 + G2)),
        "c22.s": (s(2), s(1)),
        "c22.a": (a(2), GG - commutator(PK, G1 - G2) * HALF),
        "acr23.1": (L * C[3], (GG - (G1 - G2) * b) * K),
        "acr23.2": ((GG - (G1 - G2) * b) * K, a(2) * K),
        "acl23.1": (C[3] * L, K * (GG + (G1 - G2) * b)),
        "acl23.2": (K * (GG + (G1 - G2) * b), K * a(2)),
        "sc23": (s(3), commutator(PK, H1 + H2 - (G1 * G1 + G2 * G2) * HALF) + anticommutator(C[1], G1 + G2)),
        "sc24": (s(4), commutator(G1, H2 - G2 * G2 * HALF) + commutator(G2, H1 - G1 * G1 * HALF) - s(3)
                 - anticommutator(G1 - G2, s(2)) * HALF),
        "ac24": (a(4), commutator(G1, H2) - commutator(G2, H1) - commutator(PK, H1 - H2)),
        "ac26.L": (C[6] * L, K * a(4)),
        "ac26.R": (L * C[6], a(4) * K),
        "sc26": ((I + P * eps) * C[6] * (I + P * eps) * HALF, commutator(PK, anticommutator(H1, G2) + anticommutator(G1, H2))),
        "sc27": (s(7), s(4) * P - anticommutator(K, s(4)) * (eps * HALF) - s(6) * (eps * HALF)),
        "ac27": (a(7), commutator(H1, H2) + commutator(PK, anticommutator(G1, H2) - anticommutator(G2, H1)) * q
                 - anticommutator(K, a(4)) * (eps * q)),
        "ac28": (C[8] * L, K * (a(7) + a(4) * Fraction(eps - n, 4)) * eps),
        "sc28": (s(8), commutator(K, anticommutator(H1, H2) - (H1 + H2) * (b * eps)) - anticommutator(K, s(4)) * (b * HALF)
                 + s(6) * (b * eps * HALF)),
    }


def _coordinates(X: TensorOperator) -> Dict[tuple, Fraction]:
    out = {}
    for (r, c), e in X.entries():
        for key, val in e._t.items():
            out[(r, c) + key] = val
    return out


def in_span(target: TensorOperator, spanning: Sequence[TensorOperator]) -> bool:
    """Exact test whether ``target`` is a rational combination of ``spanning``."""
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    t = _coordinates(target)
    if not t:
        return True
    cols = [_coordinates(x) for x in spanning]
    covered = set().union(*cols) if cols else set()
    if any(k not in covered for k in t):
        return False
    keys = {k: i for i, k in enumerate(sorted(covered, key=repr))}
    rows: Dict[int, Dict[int, object]] = {}
    for j, col in enumerate(cols):
        for k, val in col.items():
            rows.setdefault(keys[k], {})[j] = QQ(val.numerator, val.denominator)
    shape = (len(keys), len(cols))
    base = DomainMatrix(rows, shape, QQ).rank()
    aug = {i: dict(r) for i, r in rows.items()}
    for k, val in t.items():
        aug.setdefault(keys[k], {})[len(cols)] = QQ(val.numerator, val.denominator)
    return DomainMatrix(aug, (shape[0], shape[1] + 1), QQ).rank() == base


def classify_table(G: GeneratorMatrix, H: GeneratorMatrix, C: Dict[int, TensorOperator]) -> Dict[str, str]:
    """Per identity: free, opposite sign, modulo earlier constraints (a
    certificate with multipliers I, P, K, G1, G2 on both sides of the parts of
    lower-index constraints was found) or not established."""
    ops = _ops(G)
    mult = [ops.I, ops.P, ops.K, G.slot(1), G.slot(2)]
    parts = {k: sym_split(c) for k, c in C.items()}
    table = reduction_table(G, H, C)
    out = {}
    for key, level in TABLE_IDS:
        lhs, rhs = table[key]
        D = lhs - rhs
        if D.is_zero():
            out[key] = FREE
        elif (lhs + rhs).is_zero():
            out[key] = OPPOSITE
        else:
            earlier = [x for l in range(1, level) for x in parts[l] if x]
            gens = [A * X * B for X in earlier for A in mult for B in mult]
            out[key] = MODULO if gens and in_span(D, gens) else UNRESOLVED
    return out


class Decomposition:
    def __init__(self, expressions, prefactors, report, table):
        self.expressions = expressions
        self.prefactors = prefactors
        self.report = report
        self.table = table


def decompose_rll(G: GeneratorMatrix, H: GeneratorMatrix, convention: str = CORRECTED,
                  classify: bool = True) -> Decomposition:
    """Split the quadratic RLL difference into the eight raw expressions and
    check that the prefactored sum reproduces it exactly.

    "corrected" uses the prefactors obtained by expanding the relation; "literal"
    uses the displayed ones, which cannot reproduce it for any choice of signs.
    The reduction identities are classified on the raw expressions."""
    if convention not in (CORRECTED, LITERAL):
        raise ValueError(f"convention must be {CORRECTED!r} or {LITERAL!r}")
    m = G.metric
    C = raw_expressions(G, H)
    pref = _prefactors(m, convention)
    one = one_like(G._sample)
    lhs = rll2_left_side(G, H)
    total = None
    for k in range(1, 9):
        term = C[k] * (one * pref[k])
        total = term if total is None else total + term
    rep = ConstraintReport()
    rep.add(result_from("DECOMP.RECONSTRUCTION", lhs - total, notes={"prefactors": convention}))
    rep.add(result_from("DECOMP.RLL2_DISPLAYED_FORM", rll2_left_side(G, H, flipped=True) - lhs,
                        notes={"compares": "displayed second product with -G against the RLL difference"}))
    derived, shown = _prefactors(m, CORRECTED), _prefactors(m, LITERAL)
    for k in range(1, 9):
        if derived[k] == shown[k]:
            continue
        kind = "opposite sign" if derived[k] == -shown[k] else "different polynomial"
        rep.flags.append(f"expression {k}: displayed prefactor {shown[k]}, expansion gives {derived[k]} ({kind})")
    table = {}
    if classify:
        if all(isinstance(x, NCElement) for row in G.entries + H.entries for x in row):
            table = classify_table(G, H, C)
        else:
            rep.flags.append("reduction table classified only for symbolic entries")
    return Decomposition(C, pref, rep, table)


def free_pair(metric: Metric, g: str = "G", h: str = "H") -> Tuple[GeneratorMatrix, GeneratorMatrix]:
    """Generic G, H whose entries are free letters."""
    n = metric.n
    alg = AlgebraSpec(metric, [free_family(n, g, h)])
    rng = range(1, n + 1)
    G = GeneratorMatrix(metric, [[alg.gen(g, a, b) for b in rng] for a in rng], f"free {g}")
    H = GeneratorMatrix(metric, [[alg.gen(h, a, b) for b in rng] for a in rng], f"free {h}")
    return G, H
