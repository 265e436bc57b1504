from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yangian_eval import checker as ck
from yangian_eval.coefficients import CentralPoly
from yangian_eval.errors import LieViolation, UnsupportedOrder, W12Nonzero
from yangian_eval.metric import make_metric
from yangian_eval.reps import (
    GeneratorMatrix,
    casimir_m2,
    fundamental_rep,
    js_rep,
    on_fock,
    r_as_quadratic,
    spinor_rep,
)
from yangian_eval.tensorspace import verify_ybe

SO = lambda n: make_metric("so", n)  # noqa: E731
SP = lambda n: make_metric("sp", n)  # noqa: E731
SMALL = [SO(2), SO(3), SO(4), SP(2), SP(4)]
BUILDERS = {"spinor": spinor_rep, "js": js_rep, "fundamental": fundamental_rep}


def ids(metrics):
    return [str(m) for m in metrics]


def perturbed(G: GeneratorMatrix, a: int, b: int, amount) -> GeneratorMatrix:
    rows = [list(r) for r in G.entries]
    rows[a - 1][b - 1] = rows[a - 1][b - 1] + amount
    return GeneratorMatrix(G.metric, rows, "perturbed")


# Lie relation --------------------------------------------------------------
class TestLie:
    def test_spinor_so4(self):
        assert ck.check_lie(spinor_rep(SO(4))).ok

    def test_js_sp2(self):
        assert ck.check_lie(js_rep(SP(2))).ok

    def test_perturbation_gives_witness(self):
        r = ck.check_lie(perturbed(spinor_rep(SO(4)), 1, 2, 1))
        assert not r.ok
        idx, entry = r.witness
        assert len(idx) == 2 and entry

    @given(a=st.integers(1, 3), b=st.integers(1, 3),
           amount=st.fractions(min_value=-5, max_value=5, max_denominator=7).filter(bool))
    @settings(max_examples=25)
    def test_any_scalar_perturbation_of_offdiagonal_or_diagonal_breaks_lie(self, a, b, amount):
        # adding a multiple of a matrix unit to one entry cannot commute with the adjoint action
        r = ck.check_lie(perturbed(js_rep(SO(3)), a, b, amount))
        assert not r.ok


# linear evaluation -------------------------------------------------------
class TestLinear:
    @pytest.mark.parametrize("m", [SO(4), SO(6), SP(2), SP(4)], ids=ids([SO(4), SO(6), SP(2), SP(4)]))
    def test_spinor_all_zero_with_casimir(self, m):
        rep = ck.check_linear(spinor_rep(m))
        assert rep.all_zero, rep.nonzero_ids()
        eps, n = m.eps, m.n
        assert rep.centrals.c13 == Fraction(eps, 4) * (n - eps)
        assert rep.centrals.g == 0

    def test_spinor_sp2_value(self):
        assert ck.check_linear(spinor_rep(SP(2))).centrals.c13 == Fraction(-3, 4)

    def test_fundamental_so3_fails_only_c13(self):
        rep = ck.check_linear(fundamental_rep(SO(3)))
        assert rep.by_id("C.1.1").ok and rep.by_id("C.1.2").ok
        c13 = rep.by_id("C.1.3")
        assert not c13.ok and c13.witness[1]

    def test_fundamental_sp4_fails_c13(self):
        assert not ck.check_linear(fundamental_rep(SP(4))).by_id("C.1.3").ok

    def test_fundamental_sp2_is_a_linear_evaluation(self):
        # sp(2) = sl(2): every representation evaluates linearly
        rep = ck.check_linear(fundamental_rep(SP(2)))
        assert rep.all_zero
        assert ck.verify_rll(ck.lax_operator(fundamental_rep(SP(2)))).ok

    def test_js_sp4_fails_c13_on_both_backends(self):
        G = js_rep(SP(4))
        sym = ck.check_linear(G)
        (Gm,) = on_fock(G)
        mat = ck.check_linear(Gm)
        assert not sym.by_id("C.1.3").ok
        assert sym.nonzero_ids() == mat.nonzero_ids()

    def test_js_sp2_casimir_is_central_not_scalar(self):
        rep = ck.check_linear(js_rep(SP(2)))
        assert rep.all_zero
        assert not isinstance(rep.centrals.m2, (int, Fraction, CentralPoly))

    def test_no_short_circuit(self):
        rep = ck.check_linear(fundamental_rep(SO(3)))
        assert [r.id for r in rep.results] == ["C.1.1", "C.1.2", "C.1.3", "G.SYM_TRACELESS", "G.TRACE_CENTRAL", "C163"]

    def test_trace_shift_is_central(self):
        G = spinor_rep(SO(4))
        rep = ck.check_linear(G + G.identity(Fraction(2, 3)))
        assert rep.all_zero
        assert rep.centrals.g == Fraction(2, 3)


# W12, chi, spin conditions -------------------------------------------------
class TestW12:
    def test_js_so3_zero(self):
        W, rep = ck.compute_w12(js_rep(SO(3)))
        assert W.is_zero() and rep.all_zero

    def test_spinor_so4_witness(self):
        W, rep = ck.compute_w12(spinor_rep(SO(4)))
        w = rep.by_id("W12")
        assert not w.ok
        assert w.witness[0] == ((1, 2), (3, 4))
        # index form, annihilation by K and the P-eigenvalue still hold
        assert [i for i in rep.nonzero_ids()] == ["W12"]

    def test_zero_matrix(self):
        G = spinor_rep(SO(4))
        W, rep = ck.compute_w12(G * 0)
        assert W.is_zero() and rep.all_zero

    @pytest.mark.parametrize("kind", ["spinor", "js", "fundamental"])
    @pytest.mark.parametrize("m", SMALL, ids=ids(SMALL))
    def test_index_form_agrees(self, kind, m):
        _, rep = ck.compute_w12(BUILDERS[kind](m))
        assert rep.by_id("W12.INDEX_FORM").ok
        for rid in ("W12.KW", "W12.WK", "W12.PW", "W12.WP"):
            assert rep.by_id(rid).ok, rid


class TestChi:
    @pytest.mark.parametrize("m", [SP(2), SO(4), SO(3), SP(4)], ids=ids([SP(2), SO(4), SO(3), SP(4)]))
    def test_js_chi_vanishes(self, m):
        G = js_rep(m)
        assert ck.chi_eval(G, ck.trace_square(G)).is_zero()

    def test_zero(self):
        G = spinor_rep(SO(3)) * 0
        assert ck.chi_eval(G, 0).is_zero()

    @pytest.mark.parametrize("m", [SP(2), SO(3), SO(4)], ids=ids([SP(2), SO(3), SO(4)]))
    def test_contractions(self, m):
        G = js_rep(m)
        assert ck.chi_contractions(G, ck.trace_square(G)).all_zero

    def test_contractions_on_spinor_tie_w12_to_chi(self):
        # W12 != 0 here, so both sides are nonzero but still equal
        G = spinor_rep(SO(4))
        assert ck.chi_contractions(G, ck.trace_square(G)).all_zero


class TestCharPoly:
    def test_cubic_so4(self):
        D, E, F = ck.char_poly(3, SO(4))
        m2 = CentralPoly.symbol("m2")
        assert D == 3 and E == 2 - m2 * Fraction(1, 2) and F == m2 * Fraction(-1, 2)

    def test_quadratic_sp2(self):
        A, B = ck.char_poly(2, SP(2))
        assert A == 2 and B == -CentralPoly.symbol("m2")

    def test_order_four(self):
        with pytest.raises(UnsupportedOrder):
            ck.char_poly(4, SO(4))

    def test_general_formula(self, any_metric):
        eps, beta = any_metric.eps, any_metric.beta
        mm = Fraction(7, 3)
        D, E, F = ck.char_poly(3, any_metric, mm)
        assert (D, E, F) == (eps + 2 * beta, eps * (2 * beta - mm / 2), -mm / 2)
        assert ck.char_poly(2, any_metric, mm) == (beta, -mm)

    def test_quadratic_form_on_spinor(self):
        # order 2 polynomial with m2 = c13 annihilates the spinor matrix
        m = SO(4)
        G = spinor_rep(m)
        coeffs = ck.char_poly(2, m, Fraction(3, 4))
        assert ck.matrix_poly(G, coeffs).is_zero()


class TestSpin:
    def test_js_sp2(self):
        rep = ck.check_spin_conditions(js_rep(SP(2)))
        assert rep.all_zero and "forms agree" in rep.flags

    def test_spinor_so4(self):
        rep = ck.check_spin_conditions(spinor_rep(SO(4)))
        assert set(rep.nonzero_ids()) == {"SPIN.1", "SPIN.2", "SPIN.3", "SPIN.4"}

    def test_fundamental_so4_uniform(self):
        rep = ck.check_spin_conditions(fundamental_rep(SO(4)))
        assert len({r.status for r in rep.results}) == 1

    def test_lie_violation(self):
        with pytest.raises(LieViolation):
            ck.check_spin_conditions(perturbed(spinor_rep(SO(4)), 1, 1, 1))

    @pytest.mark.parametrize("kind", ["spinor", "js", "fundamental"])
    @pytest.mark.parametrize("m", SMALL, ids=ids(SMALL))
    def test_forms_agree(self, kind, m):
        rep = ck.check_spin_conditions(BUILDERS[kind](m))
        assert "forms agree" in rep.flags, rep.nonzero_ids()


@pytest.mark.parametrize("kind", ["spinor", "js", "fundamental"])
@pytest.mark.parametrize("m", SMALL, ids=ids(SMALL))
def test_k_contractions(kind, m):
    rep = ck.k_contractions(BUILDERS[kind](m))
    assert rep.all_zero, rep.nonzero_ids()


def test_k_contractions_detect_broken_lie():
    rep = ck.k_contractions(perturbed(js_rep(SO(3)), 1, 2, 1))
    assert not rep.all_zero


# quadratic evaluation ------------------------------------------------------
class TestQuadratic:
    @pytest.mark.parametrize("m", [SO(3), SO(4), SP(2), SP(4)], ids=ids([SO(3), SO(4), SP(2), SP(4)]))
    def test_r_as_quadratic_matches_ybe(self, m):
        rep = ck.check_quadratic(*r_as_quadratic(m))
        assert rep.all_zero, rep.nonzero_ids()
        assert rep.all_zero == verify_ybe(m).ok

    def test_r_as_quadratic_constants(self):
        c = ck.check_quadratic(*r_as_quadratic(SO(3))).centrals
        assert (c.g, c.h, c.c26, c.c28) == (Fraction(1, 2), Fraction(-1, 2), 0, 0)

    def test_js_sp2_resolution(self):
        res = ck.resolve_quadratic(js_rep(SP(2)))
        rep = ck.check_quadratic(res.G, res.H)
        assert all(rep.by_id(f"C.2.{k}").ok for k in range(1, 9))

    def test_spinor_with_zero_h_is_a_product(self):
        # L(u) = u (u + Gbar) is a scalar multiple of a linear evaluation
        G = spinor_rep(SO(4))
        rep = ck.check_quadratic(G, G * 0)
        assert rep.all_zero
        assert ck.verify_rll(ck.lax_operator(G, G * 0)).ok

    def test_fundamental_with_zero_h(self):
        G = fundamental_rep(SO(3))
        rep = ck.check_quadratic(G, G * 0)
        bad = rep.nonzero_ids()
        assert "C.2.3" in bad and "Q.H_SYM_TRACELESS" in bad
        assert all(rep.by_id(i).witness is not None for i in bad)

    @pytest.mark.parametrize("case", ["r-so3", "r-sp2", "r-sp4", "spinor-zeroH", "literal-sp2", "literal-so3",
                                      "literal-sp4"])
    def test_c8_standard_form_tracks_c28(self, case):
        kind, _, name = case.partition("-")
        if kind == "r":
            G, H = r_as_quadratic(make_metric(name[:2], int(name[2:])))
        elif kind == "spinor":
            G = spinor_rep(SO(4))
            H = G * 0
        else:
            res = ck.resolve_quadratic(js_rep(make_metric(name[:2], int(name[2:]))), ck.LITERAL)
            G, H = res.G, res.H
        rep = ck.check_quadratic(G, H)
        assert rep.by_id("Q.H_SYM_TRACELESS").ok
        assert rep.by_id("Q.C8_STANDARD_FORM").status == rep.by_id("C.2.8").status

    def test_c8_standard_form_needs_the_h_structure(self):
        # with H = 0 and a non-scalar Gbar^2 the standard form is not equivalent
        G = fundamental_rep(SO(3))
        rep = ck.check_quadratic(G, G * 0)
        assert rep.by_id("C.2.8").ok and not rep.by_id("Q.C8_STANDARD_FORM").ok


class TestLieResolution:
    @pytest.mark.parametrize("m", [SP(2), SO(3), SO(4), SP(4)], ids=ids([SP(2), SO(3), SO(4), SP(4)]))
    def test_js_passes(self, m):
        rep = ck.check_lie_resolution(js_rep(m))
        assert rep.all_zero, rep.nonzero_ids()

    def test_spinor_so4_raises(self):
        with pytest.raises(W12Nonzero):
            ck.check_lie_resolution(spinor_rep(SO(4)))

    def test_literal_relations_fail_so3(self):
        bad = set(ck.check_lie_resolution(js_rep(SO(3)), ck.LITERAL).nonzero_ids())
        assert {"C.2.7", "C.2.8", "LR.C28", "LR.CHI", "LR.R8"} <= bad

    def test_literal_relations_fail(self):
        rep = ck.check_lie_resolution(js_rep(SP(2)), ck.LITERAL)
        bad = set(rep.nonzero_ids())
        assert {"C.2.7", "P5.SQUARE", "LR.C28", "LR.CHI"} <= bad
        assert {"C.2.1", "C.2.2", "C.2.4", "LR.W12"}.isdisjoint(bad)

    def test_g_is_formal(self):
        res = ck.resolve_quadratic(js_rep(SP(2)))
        assert res.gname == "g"
        assert res.g * res.g == res.gsq

    def test_casimir_relation(self):
        rep = ck.check_lie_resolution(js_rep(SO(3)))
        assert rep.by_id("LR.C26").ok and rep.by_id("LR.C28").ok and rep.by_id("LR.ALPHA_PRIME").ok

    def test_matrix_backend_agrees(self):
        G = js_rep(SP(2))
        (Gm,) = on_fock(G)
        a = ck.check_lie_resolution(G)
        b = ck.check_lie_resolution(Gm)
        assert [(r.id, r.status) for r in a.results] == [(r.id, r.status) for r in b.results]

    def test_fock_realization_keeps_the_square_rule(self):
        res = ck.resolve_quadratic(js_rep(SP(2)))
        (Gm,) = on_fock(res.G)
        g = Gm.one().symbol("g")
        (gsq,) = on_fock(res.Gbar.identity(res.gsq))
        assert g * g == gsq[1, 1]

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            ck.resolve_quadratic(js_rep(SP(2)), "other")


# spectral checks -----------------------------------------------------------
class TestRLL:
    def test_r_as_l(self):
        G, H = r_as_quadratic(SO(3))
        assert ck.verify_rll(ck.lax_operator(G, H)).ok

    def test_spinor_so4(self):
        assert ck.verify_rll(ck.lax_operator(spinor_rep(SO(4)))).ok

    def test_fundamental_so3(self):
        r = ck.verify_rll(ck.lax_operator(fundamental_rep(SO(3))))
        assert not r.ok and r.witness is not None

    def test_quadratic_js_resolution(self):
        assert ck.verify_rll(ck.resolve_quadratic(js_rep(SP(2))).lax()).ok

    def test_metric_mismatch(self):
        with pytest.raises(ValueError):
            ck.verify_rll(ck.lax_operator(spinor_rep(SO(4))), SO(3))

    @given(shift=st.fractions(min_value=-4, max_value=4, max_denominator=5))
    @settings(max_examples=10)
    def test_central_shift_preserves_rll(self, shift):
        G = spinor_rep(SO(3))
        assert ck.verify_rll(ck.lax_operator(G + G.identity(shift))).ok


class TestCenter:
    def test_linear_spinor_so4(self):
        cf = ck.center_function(ck.lax_operator(spinor_rep(SO(4))))
        u = CentralPoly.symbol("u")
        assert cf.proportional
        assert cf.c.scalar_part() == u * (u - 1) - Fraction(3, 4)
        assert cf.c.scalar_part() == ck.center_closed_form(SO(4), 1, c13=Fraction(3, 4))

    def test_quadratic_js_sp2(self):
        res = ck.resolve_quadratic(js_rep(SP(2)))
        L = res.lax()
        cf = ck.center_function(L)
        assert cf.report.all_zero
        st_ = ck.quadratic_structure(res.G, res.H)
        _, pc = ck.product_relations(st_, SP(2))
        u = ck._spectral(res.G._sample, ck.U)
        expected = ck.center_closed_form(SP(2), 2, u=u, g=st_["g"], h=st_["h"], c26=pc["c26"], c28=pc["c28"])
        assert cf.c == expected * res.G.one()

    def test_scalar_l(self):
        m = SO(3)
        u = CentralPoly.symbol("u")
        L = GeneratorMatrix(m, [[u * u if a == b else 0 for b in range(3)] for a in range(3)])
        cf = ck.center_function(L)
        assert cf.proportional
        beta = m.beta
        assert cf.c == u * u * (u - beta) * (u - beta)

    @pytest.mark.parametrize("m", [SO(3), SP(2), SP(4)], ids=ids([SO(3), SP(2), SP(4)]))
    def test_verified_l_is_proportional_and_central(self, m):
        for L in (ck.lax_operator(spinor_rep(m)), ck.lax_operator(*r_as_quadratic(m))):
            assert ck.center_function(L).report.all_zero

    def test_fundamental_so3_not_proportional(self):
        assert not ck.center_function(ck.lax_operator(fundamental_rep(SO(3)))).proportional

    def test_closed_form_order(self):
        with pytest.raises(UnsupportedOrder):
            ck.center_closed_form(SO(3), 3)


class TestFuse:
    def test_two_spinors_so4(self):
        L1 = ck.lax_operator(spinor_rep(SO(4)))
        L2 = ck.lax_operator(spinor_rep(SO(4), name="b"))
        F = ck.fuse(L1, L2)
        assert ck.lax_degree(F) == 2 and ck.lax_degree(F, ck.DELTA) == 1
        assert ck.verify_rll(F).ok

    def test_trivial_second_factor(self):
        m = SO(4)
        L1 = ck.lax_operator(spinor_rep(m))
        I = GeneratorMatrix(m, [[1 if a == b else 0 for b in range(4)] for a in range(4)])
        F = ck.fuse(L1, I)
        assert [[x for x in r] for r in F.entries] == [[x for x in r] for r in L1.entries]
        assert ck.verify_rll(F).ok

    def test_spinor_times_fundamental_fails(self):
        L1 = ck.lax_operator(spinor_rep(SO(3)))
        L2 = ck.lax_operator(fundamental_rep(SO(3), name="f"))
        assert not ck.verify_rll(L2).ok
        assert not ck.verify_rll(ck.fuse(L1, L2)).ok

    def test_quadratic_resolutions_with_distinct_central_symbols(self):
        m = SP(2)
        L1 = ck.resolve_quadratic(js_rep(m)).lax()
        L2 = ck.resolve_quadratic(js_rep(m, x="y", d="p"), symbol="k").lax()
        F = ck.fuse(L1, L2)
        assert {"g", "k"} <= set(F.algebra.centrals)
        assert ck.verify_rll(F).ok

    def test_same_central_symbol_twice_is_rejected(self):
        from yangian_eval.errors import AlgebraMismatch
        m = SP(2)
        L1 = ck.resolve_quadratic(js_rep(m)).lax()
        L2 = ck.resolve_quadratic(js_rep(m, x="y", d="p")).lax()
        with pytest.raises(AlgebraMismatch):
            ck.fuse(L1, L2)

    def test_letter_clash(self):
        from yangian_eval.errors import AlgebraMismatch
        L = ck.lax_operator(spinor_rep(SO(3)))
        L2 = ck.lax_operator(fundamental_rep(SO(3), name="c"))
        with pytest.raises(AlgebraMismatch):
            ck.fuse(L, L2)


# decomposition -------------------------------------------------------------
class TestDecompose:
    @pytest.mark.parametrize("n", [2, 3])
    def test_free_reconstruction(self, n):
        G, H = ck.free_pair(SO(n))
        d = ck.decompose_rll(G, H, classify=(n == 2))
        assert d.report.by_id("DECOMP.RECONSTRUCTION").ok
        assert len(d.expressions) == 8

    def test_free_sp2_reconstruction(self):
        d = ck.decompose_rll(*ck.free_pair(SP(2)), classify=False)
        assert d.report.by_id("DECOMP.RECONSTRUCTION").ok

    def test_displayed_prefactors_do_not_reconstruct(self):
        d = ck.decompose_rll(*ck.free_pair(SO(2)), convention=ck.LITERAL, classify=False)
        assert not d.report.by_id("DECOMP.RECONSTRUCTION").ok

    def test_displayed_second_product_differs(self):
        d = ck.decompose_rll(*ck.free_pair(SO(2)), classify=False)
        assert not d.report.by_id("DECOMP.RLL2_DISPLAYED_FORM").ok
        assert any("opposite sign" in f for f in d.report.flags)

    def test_zero_pair(self):
        G = spinor_rep(SO(3)) * 0
        d = ck.decompose_rll(G, G, classify=False)
        assert all(x.is_zero() for x in d.expressions.values())
        assert d.report.by_id("DECOMP.RECONSTRUCTION").ok

    def test_table_classification_n2(self):
        G, H = ck.free_pair(SO(2))
        d = ck.decompose_rll(G, H)
        assert set(d.table) == {k for k, _ in ck.TABLE_IDS}
        assert set(d.table.values()) <= {ck.FREE, ck.OPPOSITE, ck.MODULO, ck.UNRESOLVED}
        assert d.table["c21.a"] == ck.FREE and d.table["c22.a"] == ck.FREE

    def test_expressions_vanish_on_r(self):
        G, H = r_as_quadratic(SO(3))
        d = ck.decompose_rll(G, H, classify=False)
        assert all(x.is_zero() for x in d.expressions.values())

    def test_bad_convention(self):
        with pytest.raises(ValueError):
            ck.decompose_rll(*ck.free_pair(SO(2)), convention="x")


def test_casimir_matches_trace_square(any_metric):
    if any_metric.n > 4:
        pytest.skip("small n is enough here")
    G = spinor_rep(any_metric)
    assert ck.trace_square(G) == casimir_m2(G) * any_metric.n
