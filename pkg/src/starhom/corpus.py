"""Seeded random value generators shared by the verification suite and tests.

Everything is driven by an explicit random.Random instance so any report
can be replayed from its recorded seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .hochschild import AlgebraHandle, HochschildChain
from .rees import DiffOp, ReesElement, rees_embed
from .series import Poly
from .weyl import WeylElement, weyl_gens


def random_fraction(rng: random.Random, span: int = 4, denominators=(1, 1, 2, 3)) -> Fraction:
    num = rng.randint(-span, span)
    return Fraction(num, rng.choice(denominators))


def random_poly(
    rng: random.Random,
    gens,
    max_degree: int = 4,
    terms: int = 3,
    nonzero: bool = False,
    span: int = 4,
) -> Poly:
    gens = tuple(gens)
    p = Poly.zero(gens)
    for _ in range(terms):
        exp = [0] * len(gens)
        for _ in range(rng.randint(0, max_degree)):
            exp[rng.randrange(len(gens))] += 1
        p = p + Poly.monomial(gens, exp, random_fraction(rng, span))
    if nonzero and p.is_zero():
        exp = [0] * len(gens)
        exp[rng.randrange(len(gens))] = rng.randint(1, max_degree)
        p = p + Poly.monomial(gens, exp, 1)
    return p


def random_weyl(
    rng: random.Random,
    dim: int,
    trunc: int,
    max_degree: int = 3,
    terms: int = 2,
    max_t: int = 1,
    min_t: int = 0,
    nonzero: bool = True,
) -> WeylElement:
    gens = weyl_gens(dim)
    coeffs = {}
    for _ in range(terms):
        e = rng.randint(min_t, max_t)
        p = random_poly(rng, gens, max_degree, 1)
        if p.is_zero():
            continue
        coeffs[e] = coeffs.get(e, Poly.zero(gens)) + p
    w = WeylElement.from_poly(Poly.zero(gens), dim, trunc)
    for e, p in coeffs.items():
        if not p.is_zero():
            w = w + WeylElement.from_poly(p, dim, trunc, t_exp=e)
    if nonzero and w.is_zero():
        w = WeylElement.from_poly(
            Poly.gen(gens, gens[rng.randrange(len(gens))]), dim, trunc
        )
    return w


def random_diffop(
    rng: random.Random,
    dim: int,
    max_x: int = 2,
    max_d: int = 2,
    terms: int = 2,
    nonzero: bool = True,
) -> DiffOp:
    table = {}
    for _ in range(terms):
        xe = tuple(rng.randint(0, max_x) for _ in range(dim))
        de = tuple(rng.randint(0, max_d) for _ in range(dim))
        q = random_fraction(rng)
        if q:
            table[(xe, de)] = table.get((xe, de), Fraction(0)) + q
    op = DiffOp(dim, table)
    if nonzero and op.is_zero():
        op = DiffOp.x(dim, 1)
    return op


def random_rees(rng: random.Random, dim: int, extra_grades: int = 1) -> ReesElement:
    """Random graded element: a few operators placed at admissible grades."""
    out = ReesElement.zero(dim)
    for _ in range(rng.randint(1, 2)):
        op = random_diffop(rng, dim)
        grade = max(op.order(), 0) + rng.randint(0, extra_grades)
        out = out + rees_embed(op, grade)
    return out


def random_chain(
    rng: random.Random,
    handle: AlgebraHandle,
    degree: int,
    element_maker,
    words: int = 2,
) -> HochschildChain:
    """Chain with the given number of random words; slots from element_maker."""
    terms = []
    for _ in range(words):
        word = tuple(element_maker(rng) for _ in range(degree + 1))
        if any(handle.is_zero(a) for a in word):
            continue
        coeff = Fraction(rng.randint(-3, 3) or 1)
        terms.append((coeff, word))
    return HochschildChain(handle, degree, terms)
