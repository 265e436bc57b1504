from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from yangian_eval.checker import check_lie, check_linear, lax_operator
from yangian_eval.coefficients import CentralPoly
from yangian_eval.errors import DimensionMismatch, UnsupportedFamily
from yangian_eval.fock import fock_backend
from yangian_eval.metric import make_metric
from yangian_eval.ncalgebra import AlgebraSpec, heisenberg_family
from yangian_eval.reps import (
    GeneratorMatrix,
    casimir_m2,
    dumps_rep,
    fundamental_rep,
    graded_split,
    heisenberg_algebra,
    js_rep,
    loads_rep,
    on_fock,
    oscillator_algebra,
    r_as_quadratic,
    spinor_rep,
)
from yangian_eval.tensorspace import make_r

SO = lambda n: make_metric("so", n)  # noqa: E731
SP = lambda n: make_metric("sp", n)  # noqa: E731
SUPPORTED = [SO(n) for n in range(2, 7)] + [SP(n) for n in (2, 4, 6)]


def scalar_values(M: GeneratorMatrix):
    """Entries of a matrix of matrix units as explicit n x n rational arrays."""
    backend = fock_backend(M.algebra)
    return [[backend.matrix(x).to_rationals() if x else None for x in row] for row in M.entries]


class TestFundamental:
    def test_so2_single_generator(self):
        G = fundamental_rep(SO(2))
        low = G.lowered()
        assert low[0][0].is_zero() and low[1][1].is_zero()
        assert low[0][1] == -low[1][0]
        alg = G.algebra
        e = lambda a, b: alg.gen("e", a, b)  # noqa: E731
        assert low[0][1] == e(2, 1) - e(1, 2)

    def test_so3_casimir_by_matrix_trace(self):
        # brute force: (1/n) sum_ab G^a_b G^b_a with each entry an explicit 3x3 matrix
        G = fundamental_rep(SO(3))
        mats = scalar_values(G)
        total = np.zeros((3, 3), dtype=object)
        for a in range(3):
            for b in range(3):
                if mats[a][b] is not None and mats[b][a] is not None:
                    total = total + np.array(mats[a][b], dtype=object).dot(np.array(mats[b][a], dtype=object))
        total = total / 3
        m2 = casimir_m2(G)
        assert m2.scalar_part() is not None
        value = m2.scalar_part().constant_value()
        assert all(total[i][j] == (value if i == j else 0) for i in range(3) for j in range(3))
        assert value == Fraction(4, 3)

    @pytest.mark.parametrize("metric", SUPPORTED, ids=str)
    def test_graded_antisymmetric(self, metric):
        d = graded_split(fundamental_rep(metric))
        assert not d.trace_part
        assert d.sym_traceless.is_zero()


class TestSpinor:
    @pytest.mark.parametrize("metric,value", [(SO(4), Fraction(3, 4)), (SP(2), Fraction(-3, 4)),
                                              (SO(6), Fraction(5, 4)), (SP(4), Fraction(-5, 4))], ids=str)
    def test_square_relation(self, metric, value):
        G = spinor_rep(metric)
        assert value == Fraction(metric.eps, 4) * (metric.n - metric.eps)
        assert G * G + G * metric.beta == G.identity(value)

    def test_so2_diagonal_entry(self):
        alg = oscillator_algebra(SO(2))
        G = spinor_rep(SO(2), alg)
        assert G[1, 1] == alg.scalar(Fraction(1, 2)) - alg.gen("c", 1, upper=True) * alg.gen("c", 1)

    @pytest.mark.parametrize("metric", SUPPORTED, ids=str)
    def test_graded_antisymmetric(self, metric):
        d = graded_split(spinor_rep(metric))
        assert not d.trace_part
        assert d.sym_traceless.is_zero()


class TestJordanSchwinger:
    def test_sp2_lowered_diagonal(self):
        alg = heisenberg_algebra(SP(2))
        G = js_rep(SP(2), alg)
        assert G.lowered()[0][0] == alg.gen("x", 1) * alg.gen("d", 1) * 2

    @pytest.mark.parametrize("metric", [SO(3), SO(4), SP(2), SP(4)], ids=str)
    def test_graded_antisymmetric(self, metric):
        d = graded_split(js_rep(metric))
        assert not d.trace_part
        assert d.sym_traceless.is_zero()


@pytest.mark.parametrize("builder", [fundamental_rep, spinor_rep, js_rep], ids=lambda f: f.__name__)
@pytest.mark.parametrize("metric", [SO(n) for n in range(2, 6)] + [SP(2), SP(4)], ids=str)
def test_lie_relations(builder, metric):
    assert check_lie(builder(metric)).ok


class TestRAsQuadratic:
    @pytest.mark.parametrize("metric", [SO(3), SP(2), SO(4)], ids=str)
    def test_reassembles_r(self, metric):
        G, H = r_as_quadratic(metric)
        L = lax_operator(G, H)
        R = make_r(metric)
        backend = fock_backend(G.algebra)
        n = metric.n
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                # entry (a, b) of L acts on the second slot: R^{a c}_{b d}
                mat = backend.evaluate(L[a, b])
                for c in range(1, n + 1):
                    for d in range(1, n + 1):
                        want = R.get((a, c), (b, d))
                        got = CentralPoly({m: blk[c - 1, d - 1] for m, blk in mat.blocks.items()
                                           if blk[c - 1, d - 1]})
                        assert got == want

    def test_sp2_trace_part(self):
        # sum_a G^a_a = n beta + tr_1 P - eps tr_1 K = n beta + 1 - eps * eps
        metric = SP(2)
        G, _ = r_as_quadratic(metric)
        t = graded_split(G).trace_part
        assert t.scalar_part() == CentralPoly.const(metric.beta)


class TestGradedSplit:
    def test_identity(self):
        G = spinor_rep(SO(3))
        d = graded_split(G.identity())
        assert d.trace_part == G.one()
        assert d.antisym.is_zero() and d.sym_traceless.is_zero()

    def test_spinor_is_antisymmetric(self):
        G = spinor_rep(SO(4))
        d = graded_split(G)
        assert not d.trace_part and d.antisym == G and d.sym_traceless.is_zero()

    def test_single_unit(self):
        m = SO(2)
        x = CentralPoly.symbol("x")
        M = GeneratorMatrix.from_lowered(m, [[0, x], [0, 0]])
        d = graded_split(M)
        half = x * Fraction(1, 2)
        assert d.trace_part == 0
        assert d.antisym.lowered() == [[0, half], [-half, 0]]
        assert d.sym_traceless.lowered() == [[0, half], [half, 0]]

    @given(st.sampled_from([SO(2), SO(3), SP(2), SP(4)]), st.data())
    def test_reassembly(self, metric, data):
        n, eps = metric.n, metric.eps
        entries = data.draw(st.lists(st.lists(st.fractions(-5, 5, max_denominator=4), min_size=n, max_size=n),
                                     min_size=n, max_size=n))
        sym = [[CentralPoly.symbol(f"s{a}{b}") * entries[a][b] for b in range(n)] for a in range(n)]
        M = GeneratorMatrix(metric, sym)
        d = graded_split(M)
        assert d.reassemble() == M
        A, S = d.antisym.lowered(), d.sym_traceless.lowered()
        for a in range(n):
            for b in range(n):
                assert A[a][b] == A[b][a] * -eps
                assert S[a][b] == S[b][a] * eps
        assert not d.sym_traceless.trace()


class TestCasimir:
    def test_spinor_so4(self):
        m2 = casimir_m2(spinor_rep(SO(4)))
        assert m2.scalar_part() == CentralPoly.const(Fraction(3, 4))

    def test_zero_matrix(self):
        G = spinor_rep(SO(3))
        assert not casimir_m2(G.identity(0))

    def test_js_sp2_matches_fock_trace(self):
        G = js_rep(SP(2))
        (Gm,) = on_fock(G)
        m2 = casimir_m2(G)
        assert fock_backend(G.algebra).evaluate(m2) == casimir_m2(Gm)


class TestRepFiles:
    def test_spinor_so2_round_trip(self):
        text = ("algebra: so\nn: 2\nfamilies: clifford(c)\n"
                "G[1][1] = 1/2 - c^1*c_1\nG[1][2] = -c^1*c_2\n"
                "G[2][1] = -c^2*c_1\nG[2][2] = 1/2 - c^2*c_2\n")
        G, H = loads_rep(text)
        assert H is None
        ref = spinor_rep(SO(2))
        assert [[str(x) for x in row] for row in G.entries] == [[str(x) for x in row] for row in ref.entries]

    def test_wrong_grid(self):
        text = "algebra: so\nn: 2\nfamilies: clifford(c)\n" + "".join(
            f"G[{a}][{b}] = 0\n" for a in (1, 2) for b in (1, 2, 3))
        with pytest.raises(DimensionMismatch):
            loads_rep(text)

    def test_js_sp2_round_trip(self):
        G = js_rep(SP(2))
        G2, _ = loads_rep(dumps_rep(G))
        assert [[str(x) for x in row] for row in G2.entries] == [[str(x) for x in row] for row in G.entries]

    def test_quadratic_round_trip(self):
        G, H = r_as_quadratic(SO(3))
        G2, H2 = loads_rep(dumps_rep(G, H))
        assert str(G2[1, 2]) == str(G[1, 2]) and str(H2[3, 1]) == str(H[3, 1])


class TestFock:
    def test_clifford_so2_relations(self):
        alg = oscillator_algebra(SO(2))
        backend = fock_backend(alg)
        c = [backend.matrix(alg.gen("c", a, upper=True)) for a in (1, 2)]
        for a in range(2):
            for b in range(2):
                anti = c[a].dot(c[b]) + c[b].dot(c[a])
                assert anti.to_rationals() == [[Fraction(1 if a == b else 0) if i == j else 0
                                                for j in range(backend.dimension)] for i in range(backend.dimension)]

    def test_fermionic_number_operator(self):
        m = SO(2)
        alg = AlgebraSpec(m, [heisenberg_family(m, fermionic=True)])
        backend = fock_backend(alg)
        N = backend.matrix(alg.gen("x", 1) * alg.gen("d", 1)).to_rationals()
        assert [N[i][i] for i in range(4)] == [0, 1, 0, 1]
        assert all(N[i][j] == 0 for i in range(4) for j in range(4) if i != j)

    def test_bosonic_unsupported(self):
        with pytest.raises(UnsupportedFamily):
            fock_backend(heisenberg_algebra(SO(3)))

    def test_odd_clifford_unsupported(self):
        with pytest.raises(UnsupportedFamily):
            fock_backend(oscillator_algebra(SO(3)))

    @pytest.mark.parametrize("metric", [SO(2), SO(4), SO(6)], ids=str)
    def test_spinor_linear_checks_agree(self, metric):
        G = spinor_rep(metric)
        (Gm,) = on_fock(G)
        sym, mat = check_linear(G), check_linear(Gm)
        assert [(r.id, r.status) for r in sym.results] == [(r.id, r.status) for r in mat.results]
