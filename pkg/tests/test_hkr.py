"""Exterior algebra and the chains-to-forms map."""

import random
from fractions import Fraction

import pytest

from starhom.corpus import random_chain, random_poly
from starhom.hkr import DForm, FormError, UForm, de_rham, hkr_map, hkr_periodic, wedge
from starhom.hochschild import (
    ChainError,
    HochschildChain,
    UChain,
    diff_B,
    diff_b,
    diff_cyclic,
    poly_handle,
    weyl_handle,
)
from starhom.series import Poly

V = ("x", "y", "z")
PH = poly_handle(V)
x, y, z = (Poly.gen(V, n) for n in V)
one = Poly.const(V, 1)
dx, dy, dz = (DForm.d_gen(V, i) for i in range(3))


def slot(rng):
    return random_poly(rng, V, max_degree=2, terms=2, nonzero=True)


class TestWedge:
    def test_antisymmetry(self):
        assert wedge(dx, dy) == -wedge(dy, dx)

    def test_square_vanishes(self):
        assert wedge(dx, dx).is_zero()

    def test_function_coefficients_pass_through(self):
        got = wedge(DForm(V, {(1,): x}), dz)
        assert got == DForm(V, {(1, 2): x})

    def test_dimension_mismatch(self):
        other = DForm.d_gen(("u", "v"), 0)
        with pytest.raises(FormError):
            wedge(dx, other)

    def test_strictly_increasing_indices_enforced(self):
        with pytest.raises(FormError):
            DForm(V, {(1, 1): x})


class TestDeRham:
    def test_on_functions(self):
        assert de_rham(DForm.from_poly(x)) == dx

    def test_on_one_forms(self):
        assert de_rham(DForm(V, {(1,): x})) == wedge(dx, dy)

    def test_squares_to_zero(self):
        rng = random.Random("dsq")
        for _ in range(20):
            form = DForm(V, {(rng.randrange(3),): slot(rng)})
            assert de_rham(de_rham(form)).is_zero()
        assert de_rham(de_rham(DForm.from_poly(x * y))).is_zero()


class TestHkrMap:
    def test_degree_one(self):
        c = HochschildChain.single(PH, (x, y))
        assert hkr_map(c) == DForm(V, {(1,): x})

    def test_half_factor_in_degree_two(self):
        c = HochschildChain.single(PH, (one, x, y))
        assert hkr_map(c) == wedge(dx, dy).scale(Fraction(1, 2))

    def test_kills_boundaries(self):
        c = HochschildChain.single(PH, (x, y, z))
        assert hkr_map(diff_b(c)).is_zero()

    def test_rejects_noncommutative_handles(self):
        wh = weyl_handle(1, trunc=4)
        c = HochschildChain.single(wh, (wh.unit,))
        with pytest.raises(ChainError):
            hkr_map(c)

    def test_chain_map_identities_random(self):
        rng = random.Random("hkr")
        for _ in range(60):
            degree = rng.randint(1, 4)
            c = random_chain(rng, PH, degree, slot)
            assert hkr_map(diff_b(c)).is_zero()
            assert hkr_map(diff_B(c)) == de_rham(hkr_map(c))


class TestHkrPeriodic:
    def test_constant_chain(self):
        c = HochschildChain.single(PH, (Poly.const(V, 5),))
        uc = UChain(PH, (0, 2), 0, {0: c})
        got = hkr_periodic(uc)
        assert got.component(0) == DForm.from_poly(Poly.const(V, 5))

    def test_one_tensor_f(self):
        c = HochschildChain.single(PH, (one, x))
        uc = UChain(PH, (1, 3), -1, {1: c})
        assert hkr_periodic(uc).component(1) == dx

    def test_square_with_cyclic_differential(self):
        rng = random.Random("hkrp")
        c0 = random_chain(rng, PH, 1, slot)
        c1 = random_chain(rng, PH, 3, slot)
        uc = UChain(PH, (0, 3), 1, {0: c0, 1: c1})
        lhs = hkr_periodic(diff_cyclic(uc))
        img = hkr_periodic(uc)
        lo, hi = uc.window
        want = UForm(
            img.variables,
            uc.window,
            {j + 1: de_rham(img.component(j)) for j in range(lo, hi)},
        )
        assert lhs == want
