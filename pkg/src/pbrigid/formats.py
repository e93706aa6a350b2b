"""JSON documents for rings, maps and verdicts.

Every document carries ``"format": 1``.  A polynomial is a list of terms
``{"coeff": "<c>", "exps": [e_1, ..., e_n, e_U]}`` in graded-lex order, largest
first; coefficients are strings so rationals survive exactly.  Output is
deterministic so that load followed by dump is byte-identical.
"""

from __future__ import annotations

import json
from typing import Any

from .coeffs import FieldError, make_field
from .expmap import ExpMap
from .poly import Poly
from .ring import (
    PHAM_BRIESKORN,
    XR_PLUS_H,
    RingPresentation,
    make_pham_brieskorn,
    make_xr_plus_h,
)

__all__ = [
    "FORMAT_VERSION",
    "FormatError",
    "dumps",
    "map_from_dict",
    "map_to_dict",
    "poly_from_terms",
    "poly_to_terms",
    "ring_from_dict",
    "ring_to_dict",
]

FORMAT_VERSION = 1


class FormatError(ValueError):
    pass


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def poly_to_terms(f: Poly) -> list[dict]:
    if f.involves(f.v_slot):
        raise FormatError("V may not appear in serialized polynomials")
    return [{"coeff": f.field.render(c), "exps": list(exps[: f.nvars + 1])} for exps, c in f.items()]


def poly_from_terms(terms: list, field, nvars: int) -> Poly:
    if not isinstance(terms, list):
        raise FormatError("a polynomial must be a list of terms")
    items = []
    for t in terms:
        try:
            exps = t["exps"]
            coeff = t["coeff"]
        except (TypeError, KeyError) as exc:
            raise FormatError(f"malformed term {t!r}") from exc
        if not isinstance(exps, list) or len(exps) != nvars + 1 or not all(
            isinstance(e, int) and not isinstance(e, bool) and e >= 0 for e in exps
        ):
            raise FormatError(f"term needs {nvars + 1} non-negative integer exponents: {t!r}")
        if not isinstance(coeff, str):
            raise FormatError(f"coefficients are strings: {t!r}")
        try:
            items.append((exps, field.coerce(coeff)))
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad coefficient {coeff!r}") from exc
    return Poly.from_terms(field, nvars, items)


def _check_format(d: dict) -> None:
    if not isinstance(d, dict):
        raise FormatError("expected a JSON object")
    if d.get("format") != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {d.get('format')!r}")


def ring_to_dict(pres: RingPresentation) -> dict:
    d: dict[str, Any] = {
        "format": FORMAT_VERSION,
        "char": pres.field.characteristic,
        "kind": pres.kind,
        "nvars": pres.n,
        "reduction_var": pres.reduction_var,
    }
    if pres.kind == PHAM_BRIESKORN:
        d["tuple"] = list(pres.exponents)
        d["power"] = pres.power
    else:
        d["r"] = pres.r
    d["names"] = list(pres.names)
    d["traits"] = pres.field.traits()
    d["relation"] = poly_to_terms(pres.relation)
    return d


def ring_from_dict(d: dict) -> RingPresentation:
    _check_format(d)
    try:
        traits = d.get("traits", {})
        field = make_field(
            d["char"],
            bool(traits.get("alg_closed", False)),
            traits.get("sqrt_minus_one") if "sqrt_minus_one" in traits else None,
        )
    except (KeyError, TypeError, FieldError) as exc:
        raise FormatError(f"bad field description: {exc}") from exc
    kind = d.get("kind", PHAM_BRIESKORN)
    names = d.get("names")
    try:
        if kind == PHAM_BRIESKORN:
            pres = make_pham_brieskorn(
                field, d["tuple"], d.get("power", 1), d.get("reduction_var", 0), names=names
            )
        elif kind == XR_PLUS_H:
            n = d["nvars"]
            var = d.get("reduction_var", 0)
            r = d["r"]
            rel = poly_from_terms(d["relation"], field, n)
            exps = [0] * n
            exps[var] = r
            h = rel - Poly.monomial(field, n, exps)
            pres = make_xr_plus_h(field, r, h, var=var, names=names)
        else:
            raise FormatError(f"unknown ring kind {kind!r}")
    except KeyError as exc:
        raise FormatError(f"missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(str(exc)) from exc
    if "relation" in d and poly_from_terms(d["relation"], field, pres.n) != pres.relation:
        raise FormatError("stored relation does not match the ring description")
    if "nvars" in d and d["nvars"] != pres.n:
        raise FormatError("nvars does not match the ring description")
    return pres


def map_to_dict(phi: ExpMap) -> dict:
    return {
        "format": FORMAT_VERSION,
        "ring": ring_to_dict(phi.presentation),
        "images": [poly_to_terms(img) for img in phi.images],
    }


def map_from_dict(d: dict, pres: RingPresentation | None = None) -> ExpMap:
    _check_format(d)
    if "ring" in d:
        embedded = ring_from_dict(d["ring"])
        if pres is not None and embedded != pres:
            raise FormatError("map's ring differs from the given ring")
        pres = embedded
    if pres is None:
        raise FormatError("map has no ring")
    images = d.get("images")
    if not isinstance(images, list) or len(images) != pres.n:
        raise FormatError(f"need a list of {pres.n} images")
    return ExpMap(pres, [poly_from_terms(t, pres.field, pres.n) for t in images])
