"""Chains, differentials, trace cycles, and induced chain maps."""

import random
from fractions import Fraction

import pytest

from starhom.corpus import random_chain, random_poly, random_rees, random_weyl
from starhom.hochschild import (
    AlgebraMorphism,
    ChainError,
    HochschildChain,
    UChain,
    alt_chain,
    diff_B,
    diff_b,
    diff_cyclic,
    induced_chain_map,
    phi_A,
    phi_E,
    poly_handle,
    rees_handle,
    weyl_handle,
)
from starhom.rees import rees_from_localized, rees_iota, rees_sigma
from starhom.series import Poly, TSeries
from starhom.suite import localization_morphism
from starhom.weyl import WeylElement, weyl_gens

PG = ("x", "y", "z")
PH = poly_handle(PG)
G1 = weyl_gens(1)
WH = weyl_handle(1, trunc=9)
WLOC = weyl_handle(1, trunc=4, localized=True)

px = Poly.gen(PG, "x")
py = Poly.gen(PG, "y")
pz = Poly.gen(PG, "z")
pone = Poly.const(PG, 1)

wx = WeylElement.from_poly(Poly.gen(G1, "x1"), 1, 9)
wxi = WeylElement.from_poly(Poly.gen(G1, "xi1"), 1, 9)


def poly_slot(rng):
    return random_poly(rng, PG, max_degree=2, terms=2, nonzero=True)


def weyl_slot(rng):
    return random_weyl(rng, 1, 9, max_degree=2, terms=2)


class TestDiffB:
    def test_degree_one(self):
        c = HochschildChain.single(WH, (wx, wxi))
        want = HochschildChain.single(
            WH, (WeylElement.from_poly(Poly.const(G1, -1), 1, 9, t_exp=1),)
        )
        assert diff_b(c) == want

    def test_degree_two_weyl_example(self):
        c = HochschildChain.single(WH, (WH.unit, wx, wxi))
        xxi = WeylElement.from_poly(Poly.gen(G1, "x1") * Poly.gen(G1, "xi1"), 1, 9)
        want = (
            HochschildChain.single(WH, (wxi, wx))
            + HochschildChain.single(WH, (wx, wxi))
            - HochschildChain.single(WH, (WH.unit, xxi))
        )
        assert diff_b(c) == want

    def test_degree_zero_is_zero(self):
        c = HochschildChain.single(PH, (px,))
        assert diff_b(c).is_zero()

    def test_b_squared_on_specific_three_chain(self):
        c = HochschildChain.single(PH, (px, py, pz, px * py))
        assert diff_b(diff_b(c)).is_zero()


class TestDiffBCyclic:
    def test_degree_zero(self):
        c = HochschildChain.single(PH, (px,))
        assert diff_B(c) == HochschildChain.single(PH, (pone, px))

    def test_degree_one_signs(self):
        c = HochschildChain.single(PH, (px, py))
        want = HochschildChain.single(PH, (pone, px, py)) - HochschildChain.single(
            PH, (pone, py, px)
        )
        assert diff_B(c) == want

    def test_unit_slot_zero_normalizes_away(self):
        c = HochschildChain.single(PH, (pone, px))
        assert diff_B(c).is_zero()


class TestIdentities:
    @pytest.mark.parametrize("handle,slot", [(PH, poly_slot), (WH, weyl_slot)])
    def test_differential_identities(self, handle, slot):
        rng = random.Random(f"ids:{handle.kind}")
        for _ in range(30):
            degree = rng.randint(1, 4)
            c = random_chain(rng, handle, degree, slot)
            assert diff_b(diff_b(c)).is_zero()
            assert diff_B(diff_B(c)).is_zero()
            assert (diff_b(diff_B(c)) + diff_B(diff_b(c))).is_zero()

    def test_normalization_consistency(self):
        # a representative with monomial scalar junk in an interior slot
        t2 = TSeries.from_poly(Poly.const(G1, 3), 9, t_exp=2)
        perturbed = WeylElement(wx.value + t2, 1)
        raw = HochschildChain(WH, 2, [(1, (wxi, perturbed, wxi))], _normalized=True)
        norm = HochschildChain(WH, 2, [(1, (wxi, perturbed, wxi))])
        assert diff_b(raw) == diff_b(norm)
        assert diff_B(raw) == diff_B(norm)


class TestAltChain:
    def test_two_permutations(self):
        c = alt_chain(PH, pone, (px, py))
        want = HochschildChain.single(PH, (pone, px, py)) - HochschildChain.single(
            PH, (pone, py, px)
        )
        assert c == want

    def test_repeated_slot_vanishes(self):
        assert alt_chain(PH, pone, (px, px)).is_zero()

    def test_word_count_d2(self):
        c = alt_chain(PH, pone, (px, py, pz, px * py))
        assert c.term_count() == 24


class TestTraceCycles:
    @pytest.mark.parametrize("d", [1, 2])
    def test_phi_E_is_a_cycle(self, d):
        assert diff_b(phi_E(d)).is_zero()

    @pytest.mark.parametrize("d", [1, 2])
    def test_phi_A_is_a_cycle(self, d):
        assert diff_b(phi_A(d)).is_zero()

    def test_phi_E_term_count_and_signs(self):
        c1 = phi_E(1)
        assert c1.term_count() == 2
        assert sorted(
            coeff.component(0).constant_term() for coeff, _ in c1.items()
        ) == [Fraction(-1), Fraction(1)]
        assert phi_E(2).term_count() == 24

    def test_phi_A_equals_shifted_alt(self):
        # pulling t^-1 out of every momentum slot leaves t^-d times the
        # plain alternating chain
        d = 2
        h = weyl_handle(d, trunc=3, localized=True)
        gens = weyl_gens(d)
        xs = [WeylElement.from_poly(Poly.gen(gens, gens[i]), d, 3) for i in range(d)]
        xis = [
            WeylElement.from_poly(Poly.gen(gens, gens[d + i]), d, 3) for i in range(d)
        ]
        plain = alt_chain(h, h.unit, xs + xis)
        assert phi_A(d) == plain.scale(1, tpow=-d)

    def test_phi_A_darboux_invariance_linear_symplectic(self):
        # (x, xi) -> (xi, -x) is symplectic; the image stays a cycle
        d = 1
        gens = weyl_gens(d)
        sub = {"x1": Poly.gen(gens, "xi1"), "xi1": -Poly.gen(gens, "x1")}

        def rotate(w):
            return WeylElement(w.value.map_coeffs(lambda p: p.substitute(sub)), d)

        morphism = AlgebraMorphism(WLOC, WLOC, element_map=rotate, coeff_map=rotate)
        image = induced_chain_map(morphism, phi_A(1), check=True)
        assert diff_b(image).is_zero()
        assert not image.is_zero()


class TestInducedChainMap:
    def test_identity_morphism(self):
        c = HochschildChain.single(PH, (px, py))
        ident = AlgebraMorphism(PH, PH, element_map=lambda a: a, coeff_map=lambda q: q)
        assert induced_chain_map(ident, c) == c

    def test_localized_phi_E_maps_to_phi_A(self):
        for d in (1, 2):
            assert induced_chain_map(localization_morphism(d), phi_E(d)) == phi_A(d)

    def test_multiplicativity_check_rejects_bad_map(self):
        c = HochschildChain.single(PH, (px, py))
        shift = AlgebraMorphism(
            PH, PH, element_map=lambda a: a + Poly.const(PG, 1), coeff_map=lambda q: q
        )
        with pytest.raises(ChainError):
            induced_chain_map(shift, c)

    def test_symbol_map_commutes_with_b(self):
        rng = random.Random("sigma-chain")
        d = 1
        src = rees_handle(d, strict=True)
        tgt = poly_handle(weyl_gens(d))

        def elem(s):
            return rees_sigma(rees_from_localized(s))

        morphism = AlgebraMorphism(
            src,
            tgt,
            element_map=elem,
            coeff_map=lambda c: c.component(0).constant_term(),
        )
        for _ in range(10):
            words = []
            for _ in range(2):
                word = tuple(rees_iota(random_rees(rng, d)) for _ in range(3))
                if any(s.is_zero() for s in word):
                    continue
                words.append((Fraction(rng.randint(-2, 2) or 1), word))
            c = HochschildChain(src, 2, words)
            lhs = induced_chain_map(morphism, diff_b(c), check=False)
            rhs = diff_b(induced_chain_map(morphism, c, check=False))
            assert lhs == rhs


class TestUChains:
    def make(self, rng):
        c0 = random_chain(rng, PH, 2, poly_slot)
        c1 = random_chain(rng, PH, 4, poly_slot)
        return UChain(PH, (0, 3), 2, {0: c0, 1: c1})

    def test_cyclic_differential_squares_to_zero(self):
        rng = random.Random("uchain")
        for _ in range(10):
            uc = self.make(rng)
            assert diff_cyclic(diff_cyclic(uc)).is_zero()

    def test_quotient_carries_b(self):
        rng = random.Random("uchain-q")
        uc = self.make(rng)
        assert diff_cyclic(uc).u0_part() == diff_b(uc.u0_part())

    def test_u_shift_is_an_injective_chain_map(self):
        rng = random.Random("uchain-s")
        uc = self.make(rng)
        shifted = uc.u_shift()
        assert diff_cyclic(shifted) == diff_cyclic(uc).u_shift()
        assert not shifted.is_zero()
        assert shifted.u0_part().is_zero()

    def test_b_plus_uB_on_degree_zero(self):
        a0 = HochschildChain.single(PH, (px,))
        uc = UChain(PH, (0, 2), 0, {0: a0})
        image = diff_cyclic(uc)
        assert image.component(0).is_zero()
        assert image.component(1) == diff_B(a0)

    def test_window_validation(self):
        a0 = HochschildChain.single(PH, (px,))
        with pytest.raises(ChainError):
            UChain(PH, (0, 2), 0, {3: a0})
        with pytest.raises(ChainError):
            UChain(PH, (0, 2), 1, {0: a0})

    def test_negative_cyclic_flag(self):
        a0 = HochschildChain.single(PH, (px,))
        assert UChain(PH, (0, 2), 0, {0: a0}).is_negative_cyclic()
        assert not UChain(PH, (-1, 2), 0, {0: a0}).is_negative_cyclic()
