"""Exact polynomial and truncated t-series arithmetic.

Everything downstream (star products, Hochschild chains, curvature forms,
characteristic classes) is built on two types:

* ``Poly``: a multivariate polynomial over a fixed, ordered tuple of
  generator names, with ``fractions.Fraction`` coefficients.  Exact, no
  floating point anywhere.
* ``TSeries``: a Laurent-style series in a central variable ``t`` whose
  coefficients are ``Poly`` values.  Each series carries its own validity
  window ``[lower, trunc)``; binary operations intersect windows so that a
  truncated tail can never masquerade as an exact zero.

Values are immutable after construction and all operations are pure, so
they can be shared freely between workers.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping


class SeriesError(ValueError):
    """Base class for arithmetic contract violations."""


class GeneratorMismatch(SeriesError):
    """Operands live over different generator tuples."""


class EmptyWindow(SeriesError):
    """A series was requested with no representable t-exponents."""


class NegativeTPowers(SeriesError):
    """The t=0 evaluation was applied to a localized series."""


def as_fraction(value) -> Fraction:
    """Coerce int / Fraction / 'p/q' string to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class Poly:
    """Multivariate polynomial with exact rational coefficients.

    ``terms`` maps exponent tuples (one entry per generator, in order) to
    nonzero Fractions.  Generator order is fixed at construction; mixing
    polynomials over different generator tuples raises GeneratorMismatch
    rather than coercing.
    """

    __slots__ = ("gens", "terms")

    def __init__(self, gens: Iterable[str], terms: Mapping[tuple, object] | None = None):
        gens = tuple(gens)
        clean: dict[tuple, Fraction] = {}
        if terms:
            for exp, coef in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != len(gens):
                    raise SeriesError(
                        f"exponent {exp} has length {len(exp)}, expected {len(gens)}"
                    )
                if any(e < 0 for e in exp):
                    raise SeriesError(f"negative exponent in {exp}")
                q = as_fraction(coef)
                if q:
                    q0 = clean.get(exp)
                    q = q if q0 is None else q0 + q
                    if q:
                        clean[exp] = q
                    elif exp in clean:
                        del clean[exp]
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *_):
        raise AttributeError("Poly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, gens) -> Poly:
        return cls(gens)

    @classmethod
    def const(cls, gens, value) -> Poly:
        gens = tuple(gens)
        return cls(gens, {(0,) * len(gens): as_fraction(value)})

    @classmethod
    def gen(cls, gens, name: str) -> Poly:
        gens = tuple(gens)
        if name not in gens:
            raise GeneratorMismatch(f"unknown generator {name!r} (have {gens})")
        exp = tuple(1 if g == name else 0 for g in gens)
        return cls(gens, {exp: 1})

    @classmethod
    def monomial(cls, gens, exp, coef=1) -> Poly:
        return cls(gens, {tuple(exp): coef})

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(exp) for exp in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.gens), Fraction(0))

    def constant_part(self) -> Poly:
        return Poly.const(self.gens, self.constant_term())

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(exp) for exp in self.terms)

    def homogeneous_part(self, k: int) -> Poly:
        return Poly(self.gens, {e: q for e, q in self.terms.items() if sum(e) == k})

    def truncate_degree(self, max_deg: int) -> Poly:
        """Drop all terms of total degree above ``max_deg``."""
        return Poly(self.gens, {e: q for e, q in self.terms.items() if sum(e) <= max_deg})

    def key(self):
        """Canonical hashable form (sorted term list)."""
        return tuple(sorted(self.terms.items()))

    # -- ring operations ---------------------------------------------------

    def _check(self, other: Poly):
        if self.gens != other.gens:
            raise GeneratorMismatch(f"{self.gens} vs {other.gens}")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.gens, other)
        self._check(other)
        out = dict(self.terms)
        for exp, q in other.terms.items():
            s = out.get(exp, Fraction(0)) + q
            if s:
                out[exp] = s
            elif exp in out:
                del out[exp]
        return Poly(self.gens, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.gens, {e: -q for e, q in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.gens, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            q = as_fraction(other)
            if not q:
                return Poly(self.gens)
            return Poly(self.gens, {e: c * q for e, c in self.terms.items()})
        self._check(other)
        out: dict[tuple, Fraction] = {}
        for e1, q1 in self.terms.items():
            for e2, q2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(exp, Fraction(0)) + q1 * q2
                if s:
                    out[exp] = s
                elif exp in out:
                    del out[exp]
        return Poly(self.gens, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.const(self.gens, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def partial(self, name: str) -> Poly:
        """Formal partial derivative with respect to one generator."""
        if name not in self.gens:
            raise GeneratorMismatch(f"unknown generator {name!r} (have {self.gens})")
        i = self.gens.index(name)
        out: dict[tuple, Fraction] = {}
        for exp, q in self.terms.items():
            if exp[i] == 0:
                continue
            new = list(exp)
            new[i] -= 1
            out[tuple(new)] = q * exp[i]
        return Poly(self.gens, out)

    def substitute(self, images: Mapping[str, "Poly"]) -> Poly:
        """Ring map sending each generator to the given image polynomial.

        All image polynomials must share one target generator tuple;
        generators absent from ``images`` are sent to themselves (and must
        exist in the target ring).
        """
        if images:
            target = next(iter(images.values())).gens
        else:
            target = self.gens
        img: list[Poly] = []
        for g in self.gens:
            if g in images:
                p = images[g]
                if p.gens != target:
                    raise GeneratorMismatch("inconsistent image generator tuples")
                img.append(p)
            else:
                img.append(Poly.gen(target, g))
        out = Poly.zero(target)
        for exp, q in self.terms.items():
            term = Poly.const(target, q)
            for p, e in zip(img, exp):
                if e:
                    term = term * (p ** e)
            out = out + term
        return out

    # -- comparisons / display ---------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.gens == other.gens
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.gens, self.key()))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for exp, q in sorted(self.terms.items()):
            mono = "*".join(
                f"{g}^{e}" if e > 1 else g
                for g, e in zip(self.gens, exp)
                if e
            )
            if not mono:
                bits.append(str(q))
            elif q == 1:
                bits.append(mono)
            elif q == -1:
                bits.append(f"-{mono}")
            else:
                bits.append(f"{q}*{mono}")
        return " + ".join(bits).replace("+ -", "- ")


class TSeries:
    """Truncated series in t with Poly coefficients.

    ``coeffs`` maps t-exponents to nonzero Poly values.  Every stored
    exponent e satisfies ``lower <= e < trunc``.  ``lower`` is a hard
    support bound (coefficients below it are exactly zero), while ``trunc``
    is a validity bound: nothing is known at or above it.  Negative lower
    bounds represent localized series in t^-1.
    """

    __slots__ = ("gens", "coeffs", "lower", "trunc")

    def __init__(self, gens, coeffs: Mapping[int, Poly] | None, lower: int, trunc: int):
        gens = tuple(gens)
        if trunc <= lower:
            raise EmptyWindow(f"window [{lower}, {trunc}) is empty")
        clean: dict[int, Poly] = {}
        if coeffs:
            for e, p in coeffs.items():
                e = int(e)
                if p.gens != gens:
                    raise GeneratorMismatch(f"{p.gens} vs {gens}")
                if e < lower:
                    raise SeriesError(f"stored exponent {e} below declared lower {lower}")
                if e >= trunc or p.is_zero():
                    continue
                clean[e] = p
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "lower", int(lower))
        object.__setattr__(self, "trunc", int(trunc))

    def __setattr__(self, *_):
        raise AttributeError("TSeries is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, gens, trunc: int, lower: int = 0) -> TSeries:
        return cls(gens, {}, lower, trunc)

    @classmethod
    def const(cls, gens, value, trunc: int, lower: int = 0) -> TSeries:
        gens = tuple(gens)
        return cls(gens, {0: Poly.const(gens, value)}, min(lower, 0), trunc)

    @classmethod
    def from_poly(cls, p: Poly, trunc: int, t_exp: int = 0) -> TSeries:
        return cls(p.gens, {t_exp: p}, min(t_exp, 0), trunc)

    # -- queries -----------------------------------------------------------

    def coefficient(self, e: int) -> Poly:
        return self.coeffs.get(e, Poly.zero(self.gens))

    def is_zero(self) -> bool:
        """True when nothing is stored inside the validity window."""
        return not self.coeffs

    def min_exponent(self) -> int | None:
        return min(self.coeffs) if self.coeffs else None

    def key(self):
        """Canonical hashable form; deliberately ignores the window so that
        equal stored data computed under different truncations merges."""
        return tuple(sorted((e, p.key()) for e, p in self.coeffs.items()))

    def set_t_zero(self) -> Poly:
        """Evaluate at t=0.  Defined only when no negative powers are stored."""
        m = self.min_exponent()
        if m is not None and m < 0:
            raise NegativeTPowers(
                f"negative t-powers present (lowest stored exponent {m})"
            )
        return self.coefficient(0)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: TSeries):
        if self.gens != other.gens:
            raise GeneratorMismatch(f"{self.gens} vs {other.gens}")

    def __add__(self, other: TSeries) -> TSeries:
        self._check(other)
        lower = min(self.lower, other.lower)
        trunc = min(self.trunc, other.trunc)
        out: dict[int, Poly] = dict(self.coeffs)
        for e, p in other.coeffs.items():
            s = out.get(e)
            s = p if s is None else s + p
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        out = {e: p for e, p in out.items() if e < trunc}
        return TSeries(self.gens, out, lower, trunc)

    def __neg__(self) -> TSeries:
        return TSeries(self.gens, {e: -p for e, p in self.coeffs.items()}, self.lower, self.trunc)

    def __sub__(self, other: TSeries) -> TSeries:
        return self + (-other)

    def __mul__(self, other) -> TSeries:
        if not isinstance(other, TSeries):
            return self.scale(other)
        self._check(other)
        lower = self.lower + other.lower
        trunc = min(self.trunc + other.lower, other.trunc + self.lower)
        out: dict[int, Poly] = {}
        for e1, p1 in self.coeffs.items():
            for e2, p2 in other.coeffs.items():
                e = e1 + e2
                if e >= trunc:
                    continue
                prod = p1 * p2
                s = out.get(e)
                s = prod if s is None else s + prod
                if s.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = s
        return TSeries(self.gens, out, lower, trunc)

    __rmul__ = __mul__

    def scale(self, q) -> TSeries:
        """Exact multiplication by a rational; the window is unchanged."""
        q = as_fraction(q)
        if not q:
            return TSeries(self.gens, {}, self.lower, self.trunc)
        return TSeries(self.gens, {e: p * q for e, p in self.coeffs.items()}, self.lower, self.trunc)

    def shift(self, m: int) -> TSeries:
        """Exact multiplication by t^m; the window shifts with the data."""
        return TSeries(
            self.gens,
            {e + m: p for e, p in self.coeffs.items()},
            self.lower + m,
            self.trunc + m,
        )

    def mul_monomial(self, q, m: int = 0) -> TSeries:
        """Exact multiplication by q * t^m."""
        return self.scale(q).shift(m)

    def truncated(self, trunc: int) -> TSeries:
        if trunc <= self.lower:
            raise EmptyWindow(f"window [{self.lower}, {trunc}) is empty")
        return TSeries(
            self.gens,
            {e: p for e, p in self.coeffs.items() if e < trunc},
            self.lower,
            min(self.trunc, trunc),
        )

    def with_lower(self, lower: int) -> TSeries:
        """Tighten or relax the declared support bound (must stay sound)."""
        m = self.min_exponent()
        if m is not None and m < lower:
            raise SeriesError(f"stored exponent {m} below requested lower {lower}")
        return TSeries(self.gens, self.coeffs, lower, self.trunc)

    def map_coeffs(self, fn) -> TSeries:
        """Apply a Poly -> Poly map to every t-coefficient."""
        out = {}
        for e, p in self.coeffs.items():
            q = fn(p)
            if not q.is_zero():
                out[e] = q
        return TSeries(self.gens, out, self.lower, self.trunc)

    # -- comparisons / display ---------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, TSeries)
            and self.gens == other.gens
            and self.lower == other.lower
            and self.trunc == other.trunc
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.gens, self.lower, self.trunc, self.key()))

    def __repr__(self):
        if not self.coeffs:
            return f"0 (mod t^{self.trunc})"
        bits = []
        for e in sorted(self.coeffs):
            p = self.coeffs[e]
            body = repr(p) if p.is_constant() or len(p.terms) == 1 else f"({p!r})"
            if e == 0:
                bits.append(body)
            else:
                bits.append(f"{body}*t^{e}")
        return " + ".join(bits) + f" (mod t^{self.trunc})"


def factorial_of_multi_index(alpha: tuple) -> int:
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out
