"""Polynomial differential operators, their order filtration, and the Rees ring.

A ``DiffOp`` is stored in normal order (all coordinate factors to the left
of all derivatives); products are normal-ordered through the Leibniz rule

    d^b x^c = sum_k  C(b,k) c!/(c-k)!  x^(c-k) d^(b-k).

The Rees ring of the order filtration places an operator of order <= p in
grade p, realized here as a finite sum of components a_p t^p.  Grades are
exact (no truncation is needed: operator products are finite), and the two
structure maps are

* ``rees_sigma``: t -> 0, sending a_p t^p to its order-p principal symbol
  with d^b replaced by xi^b;
* ``rees_iota``: localization, embedding the Rees ring into Laurent
  polynomials in t with operator coefficients (``OpSeries``).

The Darboux-ordered Weyl image of a Rees element evaluates each normal
monomial x^a (t d)^b as the star product x^a * xi^b in that written order.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .series import Poly, SeriesError, TSeries, as_fraction
from .weyl import WeylElement, moyal_star, weyl_gens


class FiltrationError(SeriesError):
    """An operator was placed below its filtration level."""


def _binom(n: int, k: int) -> int:
    return math.comb(n, k)


def _falling(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


class DiffOp:
    """Normal-ordered polynomial differential operator in d variables.

    ``terms`` maps pairs (x-multi-index, d-multi-index) to Fractions.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms=None):
        clean: dict[tuple, Fraction] = {}
        if terms:
            for (xe, de), coef in terms.items():
                xe, de = tuple(int(e) for e in xe), tuple(int(e) for e in de)
                if len(xe) != dim or len(de) != dim:
                    raise SeriesError(f"multi-index length mismatch for dim {dim}")
                if any(e < 0 for e in xe + de):
                    raise SeriesError("negative multi-index entry")
                q = as_fraction(coef)
                if q:
                    key = (xe, de)
                    q0 = clean.get(key)
                    q = q if q0 is None else q0 + q
                    if q:
                        clean[key] = q
                    elif key in clean:
                        del clean[key]
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *_):
        raise AttributeError("DiffOp is immutable")

    @classmethod
    def zero(cls, dim: int) -> DiffOp:
        return cls(dim)

    @classmethod
    def one(cls, dim: int) -> DiffOp:
        z = (0,) * dim
        return cls(dim, {(z, z): 1})

    @classmethod
    def const(cls, dim: int, q) -> DiffOp:
        z = (0,) * dim
        return cls(dim, {(z, z): q})

    @classmethod
    def x(cls, dim: int, i: int) -> DiffOp:
        """The multiplication operator by x_i (1-based)."""
        xe = tuple(1 if j == i - 1 else 0 for j in range(dim))
        return cls(dim, {(xe, (0,) * dim): 1})

    @classmethod
    def d(cls, dim: int, i: int) -> DiffOp:
        """The derivative d/dx_i (1-based)."""
        de = tuple(1 if j == i - 1 else 0 for j in range(dim))
        return cls(dim, {((0,) * dim, de): 1})

    def order(self) -> int:
        """Maximal total derivative degree; -1 for the zero operator."""
        if not self.terms:
            return -1
        return max(sum(de) for _, de in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(xe) and not any(de) for xe, de in self.terms)

    def constant_term(self) -> Fraction:
        z = (0,) * self.dim
        return self.terms.get((z, z), Fraction(0))

    def key(self):
        return tuple(sorted(self.terms.items()))

    def _check(self, other: DiffOp):
        if self.dim != other.dim:
            raise SeriesError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: DiffOp) -> DiffOp:
        self._check(other)
        out = dict(self.terms)
        for key, q in other.terms.items():
            s = out.get(key, Fraction(0)) + q
            if s:
                out[key] = s
            elif key in out:
                del out[key]
        return DiffOp(self.dim, out)

    def __neg__(self) -> DiffOp:
        return DiffOp(self.dim, {k: -q for k, q in self.terms.items()})

    def __sub__(self, other: DiffOp) -> DiffOp:
        return self + (-other)

    def scale(self, q) -> DiffOp:
        q = as_fraction(q)
        if not q:
            return DiffOp(self.dim)
        return DiffOp(self.dim, {k: c * q for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return diffop_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def order_part(self, p: int) -> DiffOp:
        return DiffOp(self.dim, {k: q for k, q in self.terms.items() if sum(k[1]) == p})

    def symbol(self, gens=None) -> Poly:
        """Full symbol: x^a d^b -> x^a xi^b over the 2d Darboux generators."""
        gens = weyl_gens(self.dim) if gens is None else tuple(gens)
        out = {}
        for (xe, de), q in self.terms.items():
            out[tuple(xe) + tuple(de)] = q
        return Poly(gens, out)

    def __eq__(self, other):
        return isinstance(other, DiffOp) and self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, self.key()))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (xe, de), q in sorted(self.terms.items()):
            mono = "".join(
                f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(xe) if e
            ) + "".join(
                f"D{i + 1}^{e}" if e > 1 else f"D{i + 1}" for i, e in enumerate(de) if e
            )
            bits.append(f"{q}*{mono}" if mono else str(q))
        return " + ".join(bits)


def diffop_mul(a: DiffOp, b: DiffOp) -> DiffOp:
    """Normal-ordered product; order(ab) <= order(a) + order(b)."""
    a._check(b)
    dim = a.dim
    out: dict[tuple, Fraction] = {}
    for (ax, ad), qa in a.terms.items():
        for (bx, bd), qb in b.terms.items():
            # commute d^ad past x^bx one variable at a time
            ranges = [range(min(ad[i], bx[i]) + 1) for i in range(dim)]
            for kvec in itertools.product(*ranges):
                coef = qa * qb
                for i, k in enumerate(kvec):
                    if k:
                        coef *= _binom(ad[i], k) * _falling(bx[i], k)
                if not coef:
                    continue
                xe = tuple(ax[i] + bx[i] - kvec[i] for i in range(dim))
                de = tuple(ad[i] + bd[i] - kvec[i] for i in range(dim))
                key = (xe, de)
                s = out.get(key, Fraction(0)) + coef
                if s:
                    out[key] = s
                elif key in out:
                    del out[key]
    return DiffOp(dim, out)


class OpSeries:
    """Finite Laurent polynomial in central t with DiffOp coefficients.

    This is the localized model E[t, t^-1]; unlike TSeries no truncation
    bookkeeping is needed because all products here are exact.
    """

    __slots__ = ("dim", "comps")

    def __init__(self, dim: int, comps=None):
        clean: dict[int, DiffOp] = {}
        if comps:
            for p, op in comps.items():
                if op.dim != dim:
                    raise SeriesError("component dimension mismatch")
                if not op.is_zero():
                    clean[int(p)] = op
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "comps", clean)

    def __setattr__(self, *_):
        raise AttributeError("OpSeries is immutable")

    @classmethod
    def zero(cls, dim: int) -> OpSeries:
        return cls(dim)

    @classmethod
    def one(cls, dim: int) -> OpSeries:
        return cls(dim, {0: DiffOp.one(dim)})

    @classmethod
    def const(cls, dim: int, q, t_exp: int = 0) -> OpSeries:
        return cls(dim, {t_exp: DiffOp.const(dim, q)})

    @classmethod
    def from_op(cls, op: DiffOp, t_exp: int = 0) -> OpSeries:
        return cls(op.dim, {t_exp: op})

    def component(self, p: int) -> DiffOp:
        return self.comps.get(p, DiffOp.zero(self.dim))

    def is_zero(self) -> bool:
        return not self.comps

    def is_scalar(self) -> bool:
        return all(op.is_constant() for op in self.comps.values())

    def scalar_part(self) -> OpSeries:
        out = {}
        for p, op in self.comps.items():
            q = op.constant_term()
            if q:
                out[p] = DiffOp.const(self.dim, q)
        return OpSeries(self.dim, out)

    def key(self):
        return tuple(sorted((p, op.key()) for p, op in self.comps.items()))

    def _check(self, other: OpSeries):
        if self.dim != other.dim:
            raise SeriesError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: OpSeries) -> OpSeries:
        self._check(other)
        out = dict(self.comps)
        for p, op in other.comps.items():
            s = out.get(p)
            s = op if s is None else s + op
            if s.is_zero():
                out.pop(p, None)
            else:
                out[p] = s
        return OpSeries(self.dim, out)

    def __neg__(self) -> OpSeries:
        return OpSeries(self.dim, {p: -op for p, op in self.comps.items()})

    def __sub__(self, other: OpSeries) -> OpSeries:
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, OpSeries):
            return self.scale(other)
        self._check(other)
        out: dict[int, DiffOp] = {}
        for p, a in self.comps.items():
            for q, b in other.comps.items():
                prod = diffop_mul(a, b)
                if prod.is_zero():
                    continue
                s = out.get(p + q)
                s = prod if s is None else s + prod
                if s.is_zero():
                    out.pop(p + q, None)
                else:
                    out[p + q] = s
        return OpSeries(self.dim, out)

    __rmul__ = __mul__

    def scale(self, q) -> OpSeries:
        q = as_fraction(q)
        if not q:
            return OpSeries(self.dim)
        return OpSeries(self.dim, {p: op.scale(q) for p, op in self.comps.items()})

    def shift(self, m: int) -> OpSeries:
        return OpSeries(self.dim, {p + m: op for p, op in self.comps.items()})

    def mul_monomial(self, q, m: int = 0) -> OpSeries:
        return self.scale(q).shift(m)

    def __eq__(self, other):
        return isinstance(other, OpSeries) and self.dim == other.dim and self.comps == other.comps

    def __repr__(self):
        if not self.comps:
            return "0"
        return " + ".join(f"({self.comps[p]!r})*t^{p}" for p in sorted(self.comps))


class ReesElement:
    """Graded element of the Rees ring: components a_p t^p with order(a_p) <= p.

    The order bound in every grade witnesses t-torsion-freeness.
    """

    __slots__ = ("dim", "comps")

    def __init__(self, dim: int, comps=None):
        clean: dict[int, DiffOp] = {}
        if comps:
            for p, op in comps.items():
                p = int(p)
                if op.dim != dim:
                    raise SeriesError("component dimension mismatch")
                if op.is_zero():
                    continue
                if p < 0:
                    raise FiltrationError("Rees grades are nonnegative")
                if op.order() > p:
                    raise FiltrationError(
                        f"operator of order {op.order()} placed in grade {p}"
                    )
                clean[p] = op
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "comps", clean)

    def __setattr__(self, *_):
        raise AttributeError("ReesElement is immutable")

    @classmethod
    def zero(cls, dim: int) -> ReesElement:
        return cls(dim)

    @classmethod
    def one(cls, dim: int) -> ReesElement:
        return cls(dim, {0: DiffOp.one(dim)})

    def component(self, p: int) -> DiffOp:
        return self.comps.get(p, DiffOp.zero(self.dim))

    def is_zero(self) -> bool:
        return not self.comps

    def key(self):
        return tuple(sorted((p, op.key()) for p, op in self.comps.items()))

    def __add__(self, other: ReesElement) -> ReesElement:
        return rees_from_localized(rees_iota(self) + rees_iota(other))

    def __neg__(self) -> ReesElement:
        return ReesElement(self.dim, {p: -op for p, op in self.comps.items()})

    def __sub__(self, other: ReesElement) -> ReesElement:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ReesElement):
            return rees_from_localized(rees_iota(self) * rees_iota(other))
        return rees_from_localized(rees_iota(self).scale(other))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ReesElement) and self.dim == other.dim and self.comps == other.comps

    def __repr__(self):
        return repr(rees_iota(self))


def rees_embed(a: DiffOp, p: int) -> ReesElement:
    """Place an operator of order <= p in grade p (the class a t^p)."""
    if a.order() > p:
        raise FiltrationError(
            f"operator of order {a.order()} is not in filtration level {p}"
        )
    return ReesElement(a.dim, {p: a})


def rees_sigma(r: ReesElement, gens=None) -> Poly:
    """t -> 0: each grade contributes the order-p part of a_p with d -> xi."""
    gens = weyl_gens(r.dim) if gens is None else tuple(gens)
    out = Poly.zero(gens)
    for p, op in r.comps.items():
        out = out + op.order_part(p).symbol(gens)
    return out


def rees_iota(r: ReesElement) -> OpSeries:
    """Localization map into E[t, t^-1]; injective and multiplicative."""
    return OpSeries(r.dim, dict(r.comps))


def rees_from_localized(s: OpSeries) -> ReesElement:
    """Inverse of iota on its image; raises when s is not a Rees element."""
    return ReesElement(s.dim, dict(s.comps))


def localized_to_weyl(s: OpSeries, trunc: int | None = None, gens=None) -> WeylElement:
    """Algebra map x_i -> x_i, t d_i -> xi_i, t -> t on the localized model.

    A normal monomial x^a d^b in grade p is read as x^a (t d)^b t^(p-|b|)
    and sent to t^(p-|b|) x^a * xi^b, the star product taken in the written
    order.  The default window is wide enough that nothing real is cut.
    """
    dim = s.dim
    gens = weyl_gens(dim) if gens is None else tuple(gens)
    if trunc is None:
        top = 0
        for p, op in s.comps.items():
            for (xe, de), _ in op.terms.items():
                top = max(top, p - sum(de) + min(sum(xe), sum(de)))
        trunc = top + 1
    lower = 0
    for p, op in s.comps.items():
        for (_, de), _ in op.terms.items():
            lower = min(lower, p - sum(de))
    acc = WeylElement(TSeries.zero(gens, trunc, lower=lower), dim)
    for p, op in s.comps.items():
        for (xe, de), q in op.terms.items():
            x_part = WeylElement.from_poly(
                Poly.monomial(gens, tuple(xe) + (0,) * dim, q), dim, trunc + sum(de) + 1
            )
            xi_part = WeylElement.from_poly(
                Poly.monomial(gens, (0,) * dim + tuple(de), 1), dim, trunc + sum(de) + 1
            )
            word = moyal_star(x_part, xi_part).shift(p - sum(de))
            acc = acc + WeylElement(word.value.truncated(trunc).with_lower(lower), dim)
    return acc


def rees_to_weyl(r: ReesElement, trunc: int | None = None, gens=None) -> WeylElement:
    """Weyl image of a Rees element; lands in nonnegative t-powers."""
    return localized_to_weyl(rees_iota(r), trunc=trunc, gens=gens)
