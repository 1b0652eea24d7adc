"""Connection forms, the flatness recursion, lifts, and conjugation."""

import random
from fractions import Fraction

import pytest

from starhom.fedosov import (
    FormalVectorField,
    LieValuedForm,
    TorsionError,
    TransitionDatum,
    central_scalar_form,
    curvature,
    extend_base,
    fiber_weyl_names,
    fiber_z_names,
    gl_to_vf,
    half_trace_form,
    i_map,
    kazhdan_assemble,
    lift_connection,
    matrix_form_to_vf,
    psi_apply,
    psi_conjugate,
    tautological_shift_form,
    transition_check,
    vf_bracket,
)
from starhom.series import Poly, SeriesError
from starhom.weyl import LieElement, WeylElement, gl_embed, lie_bracket

BASE2 = ("z1", "z2")
N1 = fiber_z_names(1)
N2 = fiber_z_names(2)


def rvf(rng, dim=2, trunc=8, max_deg=2):
    names = fiber_z_names(dim)
    comps = []
    for _ in range(dim):
        p = Poly.zero(names)
        for _ in range(2):
            exp = tuple(rng.randint(0, max_deg) for _ in range(dim))
            p = p + Poly.monomial(names, exp, Fraction(rng.randint(-3, 3)))
        comps.append(p)
    return FormalVectorField(dim, comps, trunc)


class TestVectorFields:
    def test_constant_against_euler(self):
        dz = FormalVectorField.d_zh(1, 1, 6)
        euler = FormalVectorField(1, [Poly.gen(N1, "zh1")], 6)
        assert vf_bracket(dz, euler) == dz

    def test_constant_fields_commute(self):
        a = FormalVectorField.d_zh(2, 1, 6)
        b = FormalVectorField.d_zh(2, 2, 6)
        assert vf_bracket(a, b).is_zero()

    def test_bracket_grading(self):
        rng = random.Random("grading")
        for _ in range(10):
            u = rvf(rng).fiber_part(1)
            v = rvf(rng).fiber_part(-1)
            br = vf_bracket(u, v)
            assert br == br.fiber_part(0)

    def test_jacobi(self):
        rng = random.Random("jacobi")
        for _ in range(10):
            u, v, w = rvf(rng), rvf(rng), rvf(rng)
            total = (
                vf_bracket(u, vf_bracket(v, w))
                + vf_bracket(v, vf_bracket(w, u))
                + vf_bracket(w, vf_bracket(u, v))
            )
            assert total.is_zero()

    def test_truncation_mismatch(self):
        with pytest.raises(SeriesError):
            vf_bracket(FormalVectorField.d_zh(1, 1, 6), FormalVectorField.d_zh(1, 1, 5))


class TestIMap:
    def test_linear_field_with_correction(self):
        got = i_map(gl_to_vf([[1]], 1, 6))
        want = gl_embed([[1]], 1, trunc=8, gens=fiber_weyl_names(1))
        assert (got.value - want.value).is_zero()

    def test_constant_field(self):
        gens = fiber_weyl_names(1)
        got = i_map(FormalVectorField.d_zh(1, 1, 6))
        want = WeylElement.from_poly(Poly.gen(gens, "xih1"), 1, 8, t_exp=-1)
        assert (got.value - want).is_zero()

    def test_lie_morphism_on_random_fields(self):
        rng = random.Random("imorph")
        for _ in range(12):
            u, v = rvf(rng), rvf(rng)
            lhs = i_map(vf_bracket(u, v), t_trunc=6)
            rhs = lie_bracket(i_map(u, t_trunc=6), i_map(v, t_trunc=6))
            assert (lhs.value - rhs.value).is_zero()

    def test_gl_difference_is_central(self):
        # i on linear fields minus the quadratic embedding is a scalar
        gens = fiber_weyl_names(2)
        a = [[1, -2], [4, 3]]
        quad = Poly.zero(gens)
        for i in range(2):
            for j in range(2):
                if a[i][j]:
                    exp = [0] * 4
                    exp[i] += 1
                    exp[2 + j] += 1
                    quad = quad + Poly.monomial(gens, exp, a[i][j])
        std = WeylElement.from_poly(quad, 2, 8, t_exp=-1)
        diff = i_map(gl_to_vf(a, 2, 6)).value - std
        for p in diff.value.coeffs.values():
            assert p.is_constant()


def e11_form(trunc=7):
    z2p = Poly.gen(BASE2, "z2")
    return LieValuedForm.from_entries(
        BASE2, "vf", [((0,), z2p, gl_to_vf([[1, 0], [0, 0]], 2, trunc))]
    )


class TestCurvature:
    def test_zero_connection(self):
        assert curvature(LieValuedForm.zero(BASE2, "vf")).is_zero()

    def test_flat_shift_form(self):
        shift = tautological_shift_form(BASE2, 2, 6)
        assert curvature(shift).is_zero()

    def test_gl_example(self):
        got = curvature(e11_form())
        want = LieValuedForm.from_entries(
            BASE2, "vf", [((0, 1), Poly.const(BASE2, -1), gl_to_vf([[1, 0], [0, 0]], 2, 7))]
        )
        assert got == want

    def test_rejects_two_forms(self):
        two_form = LieValuedForm.from_entries(
            BASE2, "vf", [((0, 1), Poly.const(BASE2, 1), gl_to_vf([[1, 0], [0, 0]], 2, 6))]
        )
        with pytest.raises(SeriesError):
            curvature(two_form)


class TestKazhdan:
    def test_flat_chart(self):
        assembled = kazhdan_assemble(LieValuedForm.zero(BASE2, "vf"), 4)
        assert assembled.total() == tautological_shift_form(BASE2, 2, assembled.fiber_trunc)
        assert curvature(assembled.total()).is_zero()

    def test_prescribed_low_degrees(self):
        assembled = kazhdan_assemble(e11_form(), 3)
        assert assembled.component(0) == e11_form(assembled.fiber_trunc)
        assert assembled.component(-1) == tautological_shift_form(
            BASE2, 2, assembled.fiber_trunc
        )

    def test_example_produces_first_correction(self):
        assembled = kazhdan_assemble(e11_form(), 3)
        a1 = assembled.component(1)
        names = N2
        zh1, zh2 = Poly.gen(names, "zh1"), Poly.gen(names, "zh2")
        want = LieValuedForm.from_entries(
            BASE2,
            "vf",
            [
                ((0,), Poly.const(BASE2, Fraction(1, 3)),
                 FormalVectorField(2, [zh1 * zh2, Poly.zero(names)], assembled.fiber_trunc)),
                ((1,), Poly.const(BASE2, Fraction(-1, 3)),
                 FormalVectorField(2, [zh1 * zh1, Poly.zero(names)], assembled.fiber_trunc)),
            ],
        )
        assert a1 == want

    @pytest.mark.parametrize("deg", [3, 4])
    def test_flatness_to_requested_degree(self, deg):
        assembled = kazhdan_assemble(e11_form(), deg)
        residue = curvature(assembled.total()).fiber_truncate(deg)
        assert residue.is_zero()

    def test_torsion_is_detected(self):
        bad = LieValuedForm.from_entries(
            BASE2, "vf", [((1,), Poly.gen(BASE2, "z1"), gl_to_vf([[1, 0], [0, 0]], 2, 7))]
        )
        with pytest.raises(TorsionError):
            kazhdan_assemble(bad, 2)


class TestLift:
    def test_flat_chart_lift(self):
        assembled = kazhdan_assemble(LieValuedForm.zero(BASE2, "vf"), 3)
        lifted = lift_connection(assembled.total(), None, t_trunc=8)
        gens = fiber_weyl_names(2)
        entries = [
            (
                (i,),
                Poly.const(BASE2, 1),
                LieElement(
                    WeylElement.from_poly(Poly.gen(gens, gens[2 + i]), 2, 8, t_exp=-1)
                ).scale(-1),
            )
            for i in range(2)
        ]
        assert lifted == LieValuedForm.from_entries(BASE2, "lie", entries)

    def test_curvature_is_half_trace_curvature(self):
        fiber_deg = 4
        assembled = kazhdan_assemble(e11_form(fiber_deg + 4), fiber_deg)
        mform = {(0,): [[Poly.gen(BASE2, "z2"), Poly.zero(BASE2)],
                        [Poly.zero(BASE2), Poly.zero(BASE2)]]}
        lifted = lift_connection(
            assembled.total(), half_trace_form(mform, BASE2, 2, t_trunc=8), t_trunc=8
        )
        got = curvature(lifted).fiber_truncate(fiber_deg)
        want = central_scalar_form(
            BASE2, 2, [((0, 1), Poly.const(BASE2, Fraction(-1, 2)))], t_trunc=8
        )
        assert got == want


class TestTransition:
    def make_datum(self):
        one = Poly.const(BASE2, 1)
        zero = Poly.zero(BASE2)
        z1 = Poly.gen(BASE2, "z1")
        g = [[one, z1], [zero, one]]
        g_inv = [[one, -z1], [zero, one]]
        return TransitionDatum(BASE2, g, g_inv)

    def test_identities_hold(self):
        datum = self.make_datum()
        z1, z2 = Poly.gen(BASE2, "z1"), Poly.gen(BASE2, "z2")
        a_beta = {
            (0,): [[z2, z1], [Poly.const(BASE2, 2), Poly.zero(BASE2)]],
            (1,): [[Poly.zero(BASE2), Poly.const(BASE2, 3)], [z2, z2]],
        }
        report = transition_check(datum, a_beta)
        assert report.lift_identity and report.trace_identity

    def test_bad_inverse_rejected(self):
        one = Poly.const(BASE2, 1)
        zero = Poly.zero(BASE2)
        with pytest.raises(SeriesError):
            TransitionDatum(BASE2, [[one, one], [zero, one]], [[one, one], [zero, one]])


class TestPsi:
    def build_lift(self):
        chart = ("z1",)
        a0 = LieValuedForm.from_entries(
            chart, "vf", [((0,), Poly.gen(chart, "z1"), gl_to_vf([[1]], 1, 7))]
        )
        assembled = kazhdan_assemble(a0, 3)
        mform = {(0,): [[Poly.gen(chart, "z1")]]}
        lifted = lift_connection(
            assembled.total(), half_trace_form(mform, chart, 1, t_trunc=10), t_trunc=10
        )
        return extend_base(lifted, ("z1", "xi1"))

    def test_curvature_preserved(self):
        lifted = self.build_lift()
        conjugated = psi_conjugate(lifted, 3, 1, t_trunc=10)
        assert conjugated != lifted
        assert curvature(conjugated) == curvature(lifted)

    def test_central_values_fixed(self):
        chart = ("z1", "xi1")
        cs = central_scalar_form(chart, 1, [((0,), Poly.gen(chart, "xi1"))], t_trunc=10)
        assert psi_apply(cs, 1) == cs

    def test_inverse_series(self):
        rng = random.Random("psi-inv")
        chart = ("z1", "xi1")
        gens = fiber_weyl_names(1)
        for _ in range(8):
            p = Poly.zero(gens)
            for _ in range(3):
                exp = (rng.randint(0, 2), rng.randint(0, 2))
                p = p + Poly.monomial(gens, exp, Fraction(rng.randint(-3, 3)))
            val = LieElement(WeylElement.from_poly(p, 1, 12, t_exp=rng.choice((-1, 0))))
            form = LieValuedForm.from_entries(
                chart, "lie", [((0,), Poly.gen(chart, "xi1"), val)]
            )
            assert psi_apply(psi_apply(form, 1), 1, inverse=True) == form


class TestMatrixFormHelpers:
    def test_matrix_form_to_vf_matches_entries(self):
        z2 = Poly.gen(BASE2, "z2")
        mform = {(0,): [[z2, Poly.zero(BASE2)], [Poly.zero(BASE2), Poly.zero(BASE2)]]}
        assert matrix_form_to_vf(mform, BASE2, 2, 7) == e11_form()
