"""JSON encoding and decoding for every value the CLI reads or writes.

Rationals travel as "p/q" strings so nothing is ever rounded.  Chain
documents carry an "algebra" discriminator ("poly" | "weyl" | "rees" |
"weyl-loc") that selects the coefficient algebra.
"""

from __future__ import annotations

from fractions import Fraction

from .charclass import ChernClassExpr, ChernRootSeries
from .hkr import DForm
from .hochschild import (
    AlgebraHandle,
    HochschildChain,
    poly_handle,
    rees_handle,
    weyl_handle,
)
from .rees import DiffOp, OpSeries, ReesElement
from .series import Poly, SeriesError, TSeries, as_fraction, format_fraction
from .weyl import WeylElement, weyl_gens


class DecodeError(ValueError):
    """Malformed input document."""


def _need(doc: dict, field: str):
    if not isinstance(doc, dict) or field not in doc:
        raise DecodeError(f"missing field {field!r}")
    return doc[field]


def _fraction_from(text) -> Fraction:
    try:
        return as_fraction(text)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise DecodeError(f"bad rational {text!r}: {exc}") from None


# -- Poly ----------------------------------------------------------------------


def poly_to_json(p: Poly) -> dict:
    return {
        "gens": list(p.gens),
        "terms": [
            {"exp": list(exp), "coef": format_fraction(q)}
            for exp, q in sorted(p.terms.items())
        ],
    }


def poly_from_json(doc: dict, gens=None) -> Poly:
    got = tuple(_need(doc, "gens")) if "gens" in doc else None
    gens = got if gens is None else tuple(gens)
    if got is not None and got != gens:
        raise DecodeError(f"generator mismatch: {got} vs {gens}")
    if gens is None:
        raise DecodeError("no generators given")
    terms = {}
    for item in _need(doc, "terms"):
        exp = tuple(int(e) for e in _need(item, "exp"))
        terms[exp] = terms.get(exp, Fraction(0)) + _fraction_from(_need(item, "coef"))
    try:
        return Poly(gens, terms)
    except SeriesError as exc:
        raise DecodeError(str(exc)) from None


# -- TSeries / WeylElement -----------------------------------------------------


def tseries_to_json(s: TSeries) -> dict:
    return {
        "lower": s.lower,
        "trunc": s.trunc,
        "coeffs": {str(e): poly_to_json(p) for e, p in sorted(s.coeffs.items())},
    }


def tseries_from_json(doc: dict, gens=None) -> TSeries:
    coeffs_doc = _need(doc, "coeffs")
    coeffs = {}
    for e_str, p_doc in coeffs_doc.items():
        p = poly_from_json(p_doc, gens)
        gens = p.gens
        try:
            coeffs[int(e_str)] = p
        except ValueError:
            raise DecodeError(f"bad t-exponent key {e_str!r}") from None
    if gens is None:
        raise DecodeError("empty series requires explicit generators")
    try:
        return TSeries(gens, coeffs, int(_need(doc, "lower")), int(_need(doc, "trunc")))
    except (SeriesError, ValueError, TypeError) as exc:
        raise DecodeError(str(exc)) from None


def weyl_to_json(w: WeylElement) -> dict:
    return {"dim": w.dim, "trunc": w.value.trunc, "value": tseries_to_json(w.value)}


def weyl_from_json(doc: dict, dim: int | None = None, trunc: int | None = None) -> WeylElement:
    dim = int(doc.get("dim", dim) or 0) or dim
    if dim is None:
        raise DecodeError("dimension required")
    gens = weyl_gens(dim)
    body = doc.get("value", doc)
    if "coeffs" in body:
        series = tseries_from_json(body, gens)
    else:
        series = TSeries.from_poly(poly_from_json(body, gens), trunc if trunc else 8)
    try:
        return WeylElement(series, dim)
    except SeriesError as exc:
        raise DecodeError(str(exc)) from None


# -- differential operators ------------------------------------------------------


def diffop_to_json(op: DiffOp) -> dict:
    return {
        "dim": op.dim,
        "terms": [
            {"x": list(xe), "d": list(de), "coef": format_fraction(q)}
            for (xe, de), q in sorted(op.terms.items())
        ],
    }


def diffop_from_json(doc: dict, dim: int | None = None) -> DiffOp:
    dim = int(doc.get("dim", dim) or 0) or dim
    if dim is None:
        raise DecodeError("dimension required for operators")
    terms = {}
    for item in _need(doc, "terms"):
        xe = tuple(int(e) for e in _need(item, "x"))
        de = tuple(int(e) for e in _need(item, "d"))
        key = (xe, de)
        terms[key] = terms.get(key, Fraction(0)) + _fraction_from(_need(item, "coef"))
    try:
        return DiffOp(dim, terms)
    except SeriesError as exc:
        raise DecodeError(str(exc)) from None


def opseries_to_json(s: OpSeries) -> dict:
    return {
        "dim": s.dim,
        "coeffs": {str(p): diffop_to_json(op) for p, op in sorted(s.comps.items())},
    }


def opseries_from_json(doc: dict, dim: int | None = None) -> OpSeries:
    dim = int(doc.get("dim", dim) or 0) or dim
    comps = {}
    for p_str, op_doc in _need(doc, "coeffs").items():
        op = diffop_from_json(op_doc, dim)
        dim = op.dim
        try:
            comps[int(p_str)] = op
        except ValueError:
            raise DecodeError(f"bad grade key {p_str!r}") from None
    if dim is None:
        raise DecodeError("dimension required for operators")
    return OpSeries(dim, comps)


def rees_from_json(doc: dict, dim: int | None = None) -> ReesElement:
    s = opseries_from_json(doc, dim)
    try:
        return ReesElement(s.dim, dict(s.comps))
    except SeriesError as exc:
        raise DecodeError(str(exc)) from None


# -- chains ----------------------------------------------------------------------


def handle_for(algebra: str, dim: int = 1, trunc: int = 8, gens=None) -> AlgebraHandle:
    if algebra == "poly":
        return poly_handle(gens if gens is not None else weyl_gens(dim))
    if algebra == "weyl":
        return weyl_handle(dim, trunc=trunc)
    if algebra == "weyl-loc":
        return weyl_handle(dim, trunc=trunc, localized=True)
    if algebra == "rees":
        return rees_handle(dim)
    raise DecodeError(f"unknown algebra {algebra!r}")


def _element_to_json(algebra: str, elem) -> dict:
    if algebra == "poly":
        return poly_to_json(elem)
    if algebra in ("weyl", "weyl-loc"):
        return weyl_to_json(elem)
    return opseries_to_json(elem)


def _element_from_json(algebra: str, doc: dict, handle: AlgebraHandle, dim: int, trunc: int):
    if algebra == "poly":
        return poly_from_json(doc, handle.unit.gens)
    if algebra in ("weyl", "weyl-loc"):
        return weyl_from_json(doc, dim=dim, trunc=trunc)
    return opseries_from_json(doc, dim)


def _coeff_to_json(algebra: str, coeff) -> object:
    if algebra == "poly":
        return format_fraction(coeff)
    if algebra in ("weyl", "weyl-loc"):
        return tseries_to_json(coeff.value)
    return opseries_to_json(coeff)


def _coeff_from_json(algebra: str, doc, handle: AlgebraHandle, dim: int):
    if isinstance(doc, str):
        return handle.coeff_scale(handle.coeff_unit(), _fraction_from(doc), 0)
    if algebra in ("weyl", "weyl-loc"):
        series = tseries_from_json(doc, weyl_gens(dim))
        return WeylElement(series, dim)
    if algebra == "rees":
        return opseries_from_json(doc, dim)
    raise DecodeError("polynomial chains take rational coefficients only")


def chain_to_json(c: HochschildChain, dim: int = 1) -> dict:
    algebra = c.handle.kind
    return {
        "algebra": algebra,
        "degree": c.degree,
        "terms": [
            {
                "coef": _coeff_to_json(algebra, coeff),
                "word": [_element_to_json(algebra, a) for a in word],
            }
            for coeff, word in c.items()
        ],
    }


def chain_from_json(doc: dict, dim: int = 1, trunc: int = 8, gens=None) -> HochschildChain:
    algebra = _need(doc, "algebra")
    dim = int(doc.get("dim", dim))
    if algebra == "poly" and gens is None:
        # polynomial chains carry their own generator tuple
        for item in _need(doc, "terms"):
            for elem in item.get("word", ()):
                if "gens" in elem:
                    gens = tuple(elem["gens"])
                    break
            if gens is not None:
                break
    handle = handle_for(algebra, dim=dim, trunc=trunc, gens=gens)
    degree = int(_need(doc, "degree"))
    terms = []
    for item in _need(doc, "terms"):
        coeff = _coeff_from_json(algebra, _need(item, "coef"), handle, dim)
        word = tuple(
            _element_from_json(algebra, e, handle, dim, trunc) for e in _need(item, "word")
        )
        if len(word) != degree + 1:
            raise DecodeError(
                f"word length {len(word)} does not match degree {degree}"
            )
        terms.append((coeff, word))
    try:
        return HochschildChain(handle, degree, terms)
    except SeriesError as exc:
        raise DecodeError(str(exc)) from None


# -- forms and class series -------------------------------------------------------


def dform_to_json(f: DForm) -> dict:
    return {
        "vars": list(f.vars),
        "terms": [
            {"wedge": list(idx), "coef": poly_to_json(f.terms[idx])}
            for idx in sorted(f.terms, key=lambda i: (len(i), i))
        ],
    }


def root_series_to_json(s: ChernRootSeries) -> dict:
    parts = {}
    for k in range(s.trunc + 1):
        piece = s.degree_part(k)
        if not piece.is_zero():
            parts[str(2 * k)] = poly_to_json(piece)
    return {
        "basis": "roots",
        "dim": s.dim,
        "max_cohomological_degree": 2 * s.trunc,
        "components": parts,
    }


def chern_expr_to_json(e: ChernClassExpr) -> dict:
    weights = list(range(1, e.dim + 1))
    parts: dict[str, dict] = {}
    for exp, q in sorted(e.poly.terms.items()):
        deg = 2 * sum(a * w for a, w in zip(exp, weights))
        entry = parts.setdefault(str(deg), {"gens": list(e.poly.gens), "terms": []})
        entry["terms"].append({"exp": list(exp), "coef": format_fraction(q)})
    return {
        "basis": "chern",
        "dim": e.dim,
        "max_cohomological_degree": 2 * e.trunc,
        "components": parts,
    }
