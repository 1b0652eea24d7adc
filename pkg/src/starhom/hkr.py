"""Exterior algebra with polynomial coefficients and the chains-to-forms map.

The map sends f_0 (x) f_1 (x) ... (x) f_p over a commutative polynomial
algebra to (1/p!) f_0 df_1 ^ ... ^ df_p.  The 1/p! factor is kept as an
exact rational so the normalization statements downstream are bit-exact.
Composed with b it vanishes; composed with B it becomes the exterior
derivative, which is the commuting square the cyclic machinery needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .hochschild import ChainError, HochschildChain, UChain
from .series import Poly, SeriesError


class FormError(SeriesError):
    """Contract violation in exterior-algebra operations."""


def _merge_sign(left: tuple, right: tuple) -> tuple[int, tuple] | None:
    """Sort the concatenation of two strictly increasing index tuples.

    Returns (sign, merged) or None when an index repeats.
    """
    merged = list(left)
    sign = 1
    for idx in right:
        pos = len(merged)
        while pos > 0 and merged[pos - 1] > idx:
            pos -= 1
        if pos > 0 and merged[pos - 1] == idx:
            return None
        sign *= (-1) ** (len(merged) - pos)
        merged.insert(pos, idx)
    return sign, tuple(merged)


class DForm:
    """Exterior-algebra element: wedge monomials dx_I with Poly coefficients.

    Indices are 0-based positions into the variable tuple and strictly
    increasing within each term; mixed degrees are allowed as formal sums.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, variables, terms=None):
        variables = tuple(variables)
        clean: dict[tuple, Poly] = {}
        if terms:
            for idx, coef in terms.items():
                idx = tuple(int(i) for i in idx)
                if list(idx) != sorted(set(idx)):
                    raise FormError(f"wedge indices must be strictly increasing: {idx}")
                if idx and (idx[0] < 0 or idx[-1] >= len(variables)):
                    raise FormError(f"wedge index out of range: {idx}")
                if coef.gens != variables:
                    raise FormError("coefficient generators do not match form variables")
                if coef.is_zero():
                    continue
                if idx in clean:
                    s = clean[idx] + coef
                    if s.is_zero():
                        del clean[idx]
                    else:
                        clean[idx] = s
                else:
                    clean[idx] = coef
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *_):
        raise AttributeError("DForm is immutable")

    @classmethod
    def zero(cls, variables) -> DForm:
        return cls(variables)

    @classmethod
    def from_poly(cls, p: Poly) -> DForm:
        return cls(p.gens, {(): p})

    @classmethod
    def d_gen(cls, variables, i: int) -> DForm:
        variables = tuple(variables)
        return cls(variables, {(i,): Poly.const(variables, 1)})

    def is_zero(self) -> bool:
        return not self.terms

    def degree_part(self, k: int) -> DForm:
        return DForm(self.vars, {i: p for i, p in self.terms.items() if len(i) == k})

    def degrees(self) -> list[int]:
        return sorted({len(i) for i in self.terms})

    def _check(self, other: DForm):
        if self.vars != other.vars:
            raise FormError(f"variable mismatch: {self.vars} vs {other.vars}")

    def __add__(self, other: DForm) -> DForm:
        self._check(other)
        out = dict(self.terms)
        for idx, p in other.terms.items():
            s = out.get(idx)
            s = p if s is None else s + p
            if s.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = s
        return DForm(self.vars, out)

    def __neg__(self) -> DForm:
        return DForm(self.vars, {i: -p for i, p in self.terms.items()})

    def __sub__(self, other: DForm) -> DForm:
        return self + (-other)

    def scale(self, q) -> DForm:
        return DForm(self.vars, {i: p * q for i, p in self.terms.items()})

    def __eq__(self, other):
        return (
            isinstance(other, DForm)
            and self.vars == other.vars
            and self.terms == other.terms
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for idx in sorted(self.terms, key=lambda i: (len(i), i)):
            p = self.terms[idx]
            wedge = "^".join(f"d{self.vars[i]}" for i in idx)
            if not wedge:
                bits.append(f"({p!r})")
            else:
                bits.append(f"({p!r}) {wedge}")
        return " + ".join(bits)


def wedge(a: DForm, b: DForm) -> DForm:
    """Graded-commutative product with shuffle signs."""
    a._check(b)
    out: dict[tuple, Poly] = {}
    for i1, p1 in a.terms.items():
        for i2, p2 in b.terms.items():
            merged = _merge_sign(i1, i2)
            if merged is None:
                continue
            sign, idx = merged
            p = p1 * p2 * sign
            s = out.get(idx)
            s = p if s is None else s + p
            if s.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = s
    return DForm(a.vars, out)


def de_rham(a: DForm) -> DForm:
    """Exterior derivative; squares to zero."""
    out = DForm.zero(a.vars)
    for idx, p in a.terms.items():
        for i, v in enumerate(a.vars):
            dp = p.partial(v)
            if dp.is_zero():
                continue
            merged = _merge_sign((i,), idx)
            if merged is None:
                continue
            sign, new_idx = merged
            out = out + DForm(a.vars, {new_idx: dp * sign})
    return out


def hkr_map(c: HochschildChain) -> DForm:
    """f_0 (x) ... (x) f_p  ->  (1/p!) f_0 df_1 ^ ... ^ df_p, extended
    linearly.  Only defined over the commutative polynomial algebra."""
    if c.handle.kind != "poly":
        raise ChainError(f"chains over {c.handle.kind!r} are not in the domain")
    variables = c.handle.unit.gens
    p = c.degree
    factor = Fraction(1, math.factorial(p))
    out = DForm.zero(variables)
    for coeff, word in c.terms.values():
        form = DForm.from_poly(word[0] * (coeff * factor))
        for slot in word[1:]:
            form = wedge(form, de_rham(DForm.from_poly(slot)))
            if form.is_zero():
                break
        out = out + form
    return out


@dataclass(frozen=True)
class UForm:
    """Window of differential forms indexed by u-exponents."""

    variables: tuple
    window: tuple[int, int]
    components: dict

    def component(self, j: int) -> DForm:
        return self.components.get(j, DForm.zero(self.variables))

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.components.values())

    def __eq__(self, other):
        if not isinstance(other, UForm) or self.variables != other.variables:
            return NotImplemented
        lo = min(self.window[0], other.window[0])
        hi = min(self.window[1], other.window[1])
        return all(self.component(j) == other.component(j) for j in range(lo, hi + 1))


def hkr_periodic(c: UChain) -> UForm:
    """Componentwise chains-to-forms map on a u-window."""
    if c.handle.kind != "poly":
        raise ChainError(f"chains over {c.handle.kind!r} are not in the domain")
    variables = c.handle.unit.gens
    comps = {}
    for j, chain in c.components.items():
        form = hkr_map(chain)
        if not form.is_zero():
            comps[j] = form
    return UForm(variables, c.window, comps)
