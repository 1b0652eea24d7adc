"""Characteristic-class series: A-hat, Todd, exponentials, and the
multiplicative identity A-hat * e^(c1/2) = Td.

Series are exact symmetric polynomials in d Chern roots, truncated at a
total algebraic degree D (cohomological degree 2D).  The c-basis side uses
elementary symmetric polynomials c_1..c_d with algebraic degree deg c_i = i.

Single-root generating functions, expanded by exact series inversion:

    a_hat:  x / (e^(x/2) - e^(-x/2))  =  1 - x^2/24 + 7x^4/5760 - ...
    todd:   x / (1 - e^(-x))          =  1 + x/2 + x^2/12 - x^4/720 + ...

Per root, a_hat(x) * e^(x/2) = todd(x) exactly, which is what the identity
check verifies after symmetrization.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .series import Poly, SeriesError


class SymmetryError(SeriesError):
    """A root-basis expression was not symmetric under root permutations."""


def root_names(d: int) -> tuple[str, ...]:
    return tuple(f"r{i}" for i in range(1, d + 1))


def chern_names(d: int) -> tuple[str, ...]:
    return tuple(f"c{i}" for i in range(1, d + 1))


# -- univariate series oracles ------------------------------------------------


def invert_unit_series(coeffs: list[Fraction], order: int) -> list[Fraction]:
    """Reciprocal of a series with constant term 1, to the given order."""
    if not coeffs or coeffs[0] != 1:
        raise SeriesError("series inversion requires constant term 1")
    inv = [Fraction(1)] + [Fraction(0)] * order
    for n in range(1, order + 1):
        s = Fraction(0)
        for k in range(1, n + 1):
            if k < len(coeffs):
                s += coeffs[k] * inv[n - k]
        inv[n] = -s
    return inv


def a_hat_root_series(order: int) -> list[Fraction]:
    """Coefficients of x / (e^(x/2) - e^(-x/2)) = 1 / (sinh(x/2)/(x/2))."""
    denom = [Fraction(0)] * (order + 1)
    for k in range(0, order + 1, 2):
        # (e^(x/2) - e^(-x/2)) / x = sum over even k of x^k / (2^k (k+1)!)
        denom[k] = Fraction(1, 2**k * math.factorial(k + 1))
    return invert_unit_series(denom, order)


def todd_root_series(order: int) -> list[Fraction]:
    """Coefficients of x / (1 - e^(-x))."""
    denom = [
        Fraction((-1) ** k, math.factorial(k + 1)) for k in range(order + 1)
    ]
    return invert_unit_series(denom, order)


def exp_half_root_series(order: int) -> list[Fraction]:
    return [Fraction(1, 2**k * math.factorial(k)) for k in range(order + 1)]


# -- symmetric series in the root basis ---------------------------------------


class ChernRootSeries:
    """Symmetric polynomial in d Chern roots, exact below total degree trunc.

    Root degree is counted algebraically (each root has degree 1); the
    cohomological degree of a degree-k piece is 2k.
    """

    __slots__ = ("roots", "trunc", "poly")

    def __init__(self, roots, trunc: int, poly: Poly, check_symmetry: bool = True):
        roots = tuple(roots)
        if poly.gens != roots:
            raise SeriesError("polynomial generators do not match the roots")
        poly = poly.truncate_degree(trunc)
        if check_symmetry and not _is_symmetric(poly):
            raise SymmetryError("expression is not symmetric in the roots")
        object.__setattr__(self, "roots", roots)
        object.__setattr__(self, "trunc", int(trunc))
        object.__setattr__(self, "poly", poly)

    def __setattr__(self, *_):
        raise AttributeError("ChernRootSeries is immutable")

    @classmethod
    def one(cls, d: int, trunc: int) -> ChernRootSeries:
        roots = root_names(d)
        return cls(roots, trunc, Poly.const(roots, 1))

    @classmethod
    def from_root_function(cls, coeffs: list[Fraction], d: int, trunc: int) -> ChernRootSeries:
        """Product over the d roots of a single-variable series."""
        roots = root_names(d)
        out = Poly.const(roots, 1)
        for i in range(d):
            factor = Poly.zero(roots)
            for k, q in enumerate(coeffs[: trunc + 1]):
                if q:
                    exp = [0] * d
                    exp[i] = k
                    factor = factor + Poly.monomial(roots, exp, q)
            out = (out * factor).truncate_degree(trunc)
        return cls(roots, trunc, out)

    @property
    def dim(self) -> int:
        return len(self.roots)

    def degree_part(self, k: int) -> Poly:
        return self.poly.homogeneous_part(k)

    def __mul__(self, other: ChernRootSeries) -> ChernRootSeries:
        if self.roots != other.roots:
            raise SeriesError("root mismatch")
        trunc = min(self.trunc, other.trunc)
        return ChernRootSeries(
            self.roots, trunc, (self.poly * other.poly).truncate_degree(trunc),
            check_symmetry=False,
        )

    def __sub__(self, other: ChernRootSeries) -> ChernRootSeries:
        if self.roots != other.roots:
            raise SeriesError("root mismatch")
        trunc = min(self.trunc, other.trunc)
        return ChernRootSeries(
            self.roots, trunc, (self.poly - other.poly).truncate_degree(trunc),
            check_symmetry=False,
        )

    def __eq__(self, other):
        return (
            isinstance(other, ChernRootSeries)
            and self.roots == other.roots
            and self.trunc == other.trunc
            and self.poly == other.poly
        )

    def __repr__(self):
        return f"ChernRootSeries({self.poly!r}; deg < {self.trunc + 1})"


def _is_symmetric(p: Poly) -> bool:
    d = len(p.gens)
    for i in range(d - 1):
        swapped = {}
        for exp, q in p.terms.items():
            e = list(exp)
            e[i], e[i + 1] = e[i + 1], e[i]
            swapped[tuple(e)] = q
        if swapped != p.terms:
            return False
    return True


@dataclass(frozen=True)
class ChernClassExpr:
    """Polynomial in c_1..c_d with weighted degree deg c_i = i, truncated."""

    dim: int
    trunc: int
    poly: Poly

    def __post_init__(self):
        if self.poly.gens != chern_names(self.dim):
            raise SeriesError("expected generators c1..cd")
        object.__setattr__(self, "poly", _truncate_weighted(self.poly, self.trunc))

    @classmethod
    def zero(cls, d: int, trunc: int) -> ChernClassExpr:
        return cls(d, trunc, Poly.zero(chern_names(d)))

    @classmethod
    def from_terms(cls, d: int, trunc: int, terms) -> ChernClassExpr:
        return cls(d, trunc, Poly(chern_names(d), terms))

    @classmethod
    def half_c1(cls, d: int, trunc: int) -> ChernClassExpr:
        gens = chern_names(d)
        return cls(d, trunc, Poly.gen(gens, "c1") * Fraction(1, 2))

    def weighted_degrees(self) -> list[int]:
        w = list(range(1, self.dim + 1))
        return sorted({sum(e * wi for e, wi in zip(exp, w)) for exp in self.poly.terms})

    def min_weighted_degree(self) -> int:
        degs = self.weighted_degrees()
        return degs[0] if degs else -1

    def to_roots(self, trunc: int | None = None) -> ChernRootSeries:
        """Expand c_i as the elementary symmetric polynomial e_i(roots)."""
        trunc = self.trunc if trunc is None else trunc
        d = self.dim
        roots = root_names(d)
        images = {
            f"c{i}": elementary_symmetric(d, i) for i in range(1, d + 1)
        }
        expanded = self.poly.substitute(images).truncate_degree(trunc)
        return ChernRootSeries(roots, trunc, expanded, check_symmetry=False)


def _truncate_weighted(p: Poly, trunc: int) -> Poly:
    w = list(range(1, len(p.gens) + 1))
    return Poly(
        p.gens,
        {
            exp: q
            for exp, q in p.terms.items()
            if sum(e * wi for e, wi in zip(exp, w)) <= trunc
        },
    )


def elementary_symmetric(d: int, i: int) -> Poly:
    roots = root_names(d)
    out = Poly.zero(roots)
    for combo in itertools.combinations(range(d), i):
        exp = [0] * d
        for j in combo:
            exp[j] = 1
        out = out + Poly.monomial(roots, exp, 1)
    return out


# -- the four main operations --------------------------------------------------


def a_hat(d: int, trunc: int) -> ChernRootSeries:
    """Product over the d roots of x / (e^(x/2) - e^(-x/2))."""
    return ChernRootSeries.from_root_function(a_hat_root_series(trunc), d, trunc)


def todd(d: int, trunc: int) -> ChernRootSeries:
    """Product over the d roots of x / (1 - e^(-x))."""
    return ChernRootSeries.from_root_function(todd_root_series(trunc), d, trunc)


def exp_class(theta: ChernClassExpr, trunc: int | None = None) -> ChernRootSeries:
    """exp of a class with positive-degree terms, in the root basis."""
    trunc = theta.trunc if trunc is None else trunc
    if not theta.poly.is_zero() and theta.min_weighted_degree() < 1:
        raise SeriesError("exponential requires positive-degree terms only")
    base = theta.to_roots(trunc).poly
    out = Poly.const(base.gens, 1)
    power = Poly.const(base.gens, 1)
    for k in range(1, trunc + 1):
        power = (power * base).truncate_degree(trunc)
        if power.is_zero():
            break
        out = out + power * Fraction(1, math.factorial(k))
    return ChernRootSeries(root_names(theta.dim), trunc, out, check_symmetry=False)


def to_chern_basis(s: ChernRootSeries) -> ChernClassExpr:
    """Rewrite a symmetric root polynomial in the elementary basis.

    Classical leading-term subtraction: peel the lex-greatest monomial
    x^lambda (lambda must be a partition, or the input was not symmetric)
    against e_1^(l1-l2) e_2^(l2-l3) ... ; exact and terminating.
    """
    d = s.dim
    cgens = chern_names(d)
    remainder = s.poly
    out = Poly.zero(cgens)
    elems = [elementary_symmetric(d, i) for i in range(1, d + 1)]
    while not remainder.is_zero():
        lam = max(remainder.terms)
        q = remainder.terms[lam]
        if any(lam[i] < lam[i + 1] for i in range(d - 1)):
            raise SymmetryError(
                f"leading exponent {lam} is not a partition; input not symmetric"
            )
        cexp = [0] * d
        prod = Poly.const(s.roots, q)
        for i in range(d):
            power = lam[i] - (lam[i + 1] if i + 1 < d else 0)
            cexp[i] = power
            if power:
                prod = prod * elems[i] ** power
        out = out + Poly.monomial(cgens, cexp, q)
        remainder = remainder - prod
    return ChernClassExpr(d, s.trunc, out)


@dataclass(frozen=True)
class IdentityReport:
    """Degree-by-degree comparison of two symmetric series."""

    equal: bool
    dim: int
    trunc: int
    mismatches: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "equal": self.equal,
            "dim": self.dim,
            "max_algebraic_degree": self.trunc,
            "mismatches": [
                {
                    "cohomological_degree": 2 * k,
                    "left_minus_right": repr(diff),
                }
                for k, diff in self.mismatches
            ],
        }


def rr_identity_check(d: int, trunc: int, theta: ChernClassExpr | None = None) -> IdentityReport:
    """Compare a_hat(d) * exp(theta) with todd(d) degree by degree.

    theta defaults to c1/2, the curvature class of the cotangent-bundle
    quantization; any discrepant homogeneous piece is reported rather than
    raised.
    """
    if theta is None:
        theta = ChernClassExpr.half_c1(d, trunc)
    lhs = a_hat(d, trunc) * exp_class(theta, trunc)
    rhs = todd(d, trunc)
    mismatches = []
    for k in range(trunc + 1):
        diff = lhs.degree_part(k) - rhs.degree_part(k)
        if not diff.is_zero():
            mismatches.append((k, diff))
    return IdentityReport(equal=not mismatches, dim=d, trunc=trunc, mismatches=mismatches)
