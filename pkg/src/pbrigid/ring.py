"""Single-relation quotient rings ``k[X_1..X_n] / (G)`` with ``G`` monic in one variable.

Two shapes are supported:

* Pham-Brieskorn: ``G = (X_1^a_1 + ... + X_n^a_n)^m``;
* ``X^r + h``: ``G = X_v^r + h`` with ``h`` free of ``X_v``.

Because ``G`` is monic of degree ``d`` in the reduction variable ``x``, the
quotient is a free module over the other variables with basis
``1, x, ..., x^(d-1)``; the normal form is the unique representative whose
``x``-exponents are all below ``d``.  Deformation variables U, V ride along.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import reduce as _fold
from math import gcd
from typing import Sequence

from .coeffs import FieldSpec, p_adic_valuation
from .poly import FIELD_MASK, Poly, PolyError, _clean, _shift, compose, power

__all__ = [
    "InvalidRelation",
    "InvalidTuple",
    "PresentationMismatch",
    "RingElement",
    "RingPresentation",
    "make_pham_brieskorn",
    "make_xr_plus_h",
    "normal_form",
    "ring_equal",
]

PHAM_BRIESKORN = "pham_brieskorn"
XR_PLUS_H = "xr_plus_h"


class InvalidTuple(ValueError):
    pass


class InvalidRelation(ValueError):
    pass


class PresentationMismatch(ValueError):
    pass


class RingPresentation:
    """Quotient presentation with a designated monic reduction variable."""

    def __init__(
        self,
        field: FieldSpec,
        relation: Poly,
        reduction_var: int,
        kind: str,
        *,
        exponents: tuple[int, ...] | None = None,
        power: int = 1,
        r: int | None = None,
        h: Poly | None = None,
        is_domain: bool | None = None,
        names: Sequence[str] | None = None,
    ):
        self.field = field
        self.n = relation.nvars
        self.relation = relation
        self.reduction_var = reduction_var
        self.kind = kind
        self.exponents = exponents
        self.power = power
        self.r = r
        self.h = h
        self.is_domain = is_domain
        self.names = tuple(names) if names is not None else tuple(f"x{i + 1}" for i in range(self.n))
        if relation.involves(relation.u_slot) or relation.involves(relation.v_slot):
            raise InvalidRelation("the relation may not involve U or V")
        self.reduction_degree = relation.degree_in(reduction_var)
        if self.reduction_degree < 1:
            raise InvalidRelation("relation does not involve the reduction variable")
        lead = relation.coefficient_in(reduction_var, self.reduction_degree)
        if lead != Poly.const(field, self.n, 1):
            raise InvalidRelation("relation is not monic in the reduction variable")
        d = self.reduction_degree
        sh = _shift(reduction_var, self.n + 2)
        top = d << sh
        # x^d == tail modulo the relation
        self._tail = [(k, field.neg(c)) for k, c in relation.terms.items() if k != top]
        self._shift = sh

    # -- identity ------------------------------------------------------------

    def key(self) -> tuple:
        return (self.field.characteristic, self.n, self.reduction_var, frozenset(self.relation.terms.items()))

    def __eq__(self, other) -> bool:
        return isinstance(other, RingPresentation) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def same_ideal(self, other: RingPresentation) -> bool:
        return (
            self.field.characteristic == other.field.characteristic
            and self.n == other.n
            and self.relation == other.relation
        )

    def describe(self) -> str:
        if self.kind == PHAM_BRIESKORN:
            base = f"B{self.exponents}"
            if self.power > 1:
                base += f" with relation power {self.power}"
        else:
            base = f"k[{','.join(self.names)}]/({self.relation.render(self.names)})"
        return f"{base} over {self.field.describe()}"

    def __repr__(self) -> str:
        return f"RingPresentation({self.describe()})"

    # -- polynomials in the ambient ring ---------------------------------------

    def zero(self) -> Poly:
        return Poly.zero(self.field, self.n)

    def one(self) -> Poly:
        return Poly.const(self.field, self.n, 1)

    def const(self, c) -> Poly:
        return Poly.const(self.field, self.n, c)

    def gen(self, i: int) -> Poly:
        return Poly.var(self.field, self.n, i)

    def gens(self) -> list[Poly]:
        return [self.gen(i) for i in range(self.n)]

    def U(self) -> Poly:
        return Poly.var(self.field, self.n, self.n)

    def V(self) -> Poly:
        return Poly.var(self.field, self.n, self.n + 1)

    # -- reduction ------------------------------------------------------------------

    def normal_form(self, f: Poly) -> Poly:
        """Rewrite ``x^d -> x^d - G`` until every ``x``-exponent is below ``d``."""
        if f.nvars != self.n:
            raise PresentationMismatch(f"polynomial has {f.nvars} variables, ring has {self.n}")
        if not f.terms:
            return f
        d = self.reduction_degree
        sh = self._shift
        if self._top_exponent(f) < d:
            return f
        p = self.field.characteristic
        low: dict[int, object] = {}
        buckets: dict[int, dict[int, object]] = defaultdict(dict)
        for k, c in f.terms.items():
            e = (k >> sh) & FIELD_MASK
            if e < d:
                low[k] = c
            else:
                buckets[e][k] = c
        tail = self._tail
        drop = d << sh
        e = max(buckets)
        while e >= d:
            bucket = buckets.pop(e, None)
            if bucket:
                for k, c in bucket.items():
                    if p:
                        c %= p
                    if not c:
                        continue
                    base = k - drop
                    for tk, tc in tail:
                        nk = base + tk
                        ne = (nk >> sh) & FIELD_MASK
                        target = low if ne < d else buckets[ne]
                        target[nk] = target.get(nk, 0) + c * tc
            e -= 1
        return f.with_terms(_clean(low, p))

    def _top_exponent(self, f: Poly) -> int:
        sh = self._shift
        return max((k >> sh) & FIELD_MASK for k in f.terms)

    def is_normal(self, f: Poly) -> bool:
        return not f.terms or self._top_exponent(f) < self.reduction_degree

    def mul(self, f: Poly, g: Poly) -> Poly:
        return self.normal_form(f * g)

    def pow(self, f: Poly, k: int) -> Poly:
        return power(self.normal_form(f), k, self.normal_form)

    def compose(self, f: Poly, images: Sequence[Poly | None], u: Poly | None = None, v: Poly | None = None) -> Poly:
        """Normal form of ``f`` with ``x_i -> images[i]`` (None keeps ``x_i``)."""
        if len(images) != self.n:
            raise PresentationMismatch(f"need {self.n} images, got {len(images)}")
        table = {i: img for i, img in enumerate(images) if img is not None}
        if u is not None:
            table[self.n] = u
        if v is not None:
            table[self.n + 1] = v
        return compose(f, table, self.normal_form)

    def element(self, f: Poly) -> RingElement:
        return RingElement(self, self.normal_form(f))

    def relation_base(self) -> Poly:
        """The polynomial ``G`` with relation ``G^m`` (``G`` itself when m = 1)."""
        if self.kind == PHAM_BRIESKORN:
            return _pb_sum(self.field, self.exponents)
        return self.relation


@dataclass(frozen=True, eq=False)
class RingElement:
    presentation: RingPresentation
    nf: Poly

    def _other(self, other) -> Poly:
        if isinstance(other, RingElement):
            if other.presentation != self.presentation:
                raise PresentationMismatch("elements of different presentations")
            return other.nf
        if isinstance(other, Poly):
            return self.presentation.normal_form(other)
        return self.presentation.const(other)

    def __add__(self, other) -> RingElement:
        return RingElement(self.presentation, self.nf + self._other(other))

    __radd__ = __add__

    def __sub__(self, other) -> RingElement:
        return RingElement(self.presentation, self.nf - self._other(other))

    def __neg__(self) -> RingElement:
        return RingElement(self.presentation, -self.nf)

    def __mul__(self, other) -> RingElement:
        return RingElement(self.presentation, self.presentation.mul(self.nf, self._other(other)))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> RingElement:
        return RingElement(self.presentation, self.presentation.pow(self.nf, k))

    def __eq__(self, other) -> bool:
        return ring_equal(self, other)

    def __hash__(self) -> int:
        return hash((self.presentation, self.nf))

    def __bool__(self) -> bool:
        return bool(self.nf)

    def __repr__(self) -> str:
        return f"RingElement({self.nf.render(self.presentation.names)})"


def ring_equal(a: RingElement, b: RingElement) -> bool:
    if not isinstance(a, RingElement) or not isinstance(b, RingElement):
        raise TypeError("ring_equal compares RingElements")
    if a.presentation != b.presentation:
        raise PresentationMismatch("elements of different presentations")
    return a.nf == b.nf


def normal_form(pres: RingPresentation, f: Poly) -> RingElement:
    return pres.element(f)


def _pb_sum(field: FieldSpec, exponents: Sequence[int]) -> Poly:
    n = len(exponents)
    terms = []
    for i, a in enumerate(exponents):
        exps = [0] * n
        exps[i] = a
        terms.append((exps, 1))
    return Poly.from_terms(field, n, terms)


def make_pham_brieskorn(
    field: FieldSpec,
    exponents: Sequence[int],
    m: int = 1,
    reduction_var: int = 0,
    names: Sequence[str] | None = None,
) -> RingPresentation:
    """Presentation of ``k[X]/((X_1^a_1 + ... + X_n^a_n)^m)`` reducing on ``reduction_var``."""
    exponents = tuple(int(a) for a in exponents)
    if len(exponents) < 2:
        raise InvalidTuple("need at least two exponents")
    if any(a < 1 for a in exponents):
        raise InvalidTuple(f"exponents must be positive: {exponents}")
    if m < 1:
        raise InvalidTuple("relation power must be >= 1")
    if not 0 <= reduction_var < len(exponents):
        raise InvalidTuple("reduction variable out of range")
    base = _pb_sum(field, exponents)
    relation = power(base, m)
    g = _fold(gcd, exponents)
    p = field.characteristic
    if m > 1:
        is_domain = False
    elif len(exponents) >= 3:
        is_domain = p == 0 or g % p != 0
    else:
        # two-variable binomials are irreducible over the closure iff coprime
        is_domain = g == 1
    return RingPresentation(
        field,
        relation,
        reduction_var,
        PHAM_BRIESKORN,
        exponents=exponents,
        power=m,
        is_domain=is_domain,
        names=names,
    )


def binomial_shape_is_domain(field: FieldSpec, r: int, h: Poly, var: int) -> bool | None:
    """Primality of ``X^r + h`` for the two shapes with a known criterion.

    ``h`` a single monomial ``c * prod y^e``: prime iff ``gcd(r, e...) == 1``.
    ``h`` a sum of pure powers of at least two distinct variables:
    prime iff ``p`` does not divide ``gcd(r, exponents)``.  Otherwise None.
    """
    if not h.terms:
        return r == 1
    rows = [(h.exponents(k), c) for k, c in h.terms.items()]
    if len(rows) == 1:
        exps, _ = rows[0]
        return _fold(gcd, exps[: h.nvars], r) == 1
    seen = set()
    degs = []
    for exps, _ in rows:
        support = [i for i, e in enumerate(exps[: h.nvars]) if e]
        if len(support) != 1 or support[0] in seen or support[0] == var:
            return None
        seen.add(support[0])
        degs.append(exps[support[0]])
    g = _fold(gcd, degs, r)
    p = field.characteristic
    return p == 0 or g % p != 0


def make_xr_plus_h(
    field: FieldSpec,
    r: int,
    h: Poly,
    var: int = 0,
    names: Sequence[str] | None = None,
    is_domain: bool | None = None,
) -> RingPresentation:
    """Presentation of ``k[X..]/(X_var^r + h)``."""
    if r < 1:
        raise InvalidRelation("r must be positive")
    if h.involves(var):
        raise InvalidRelation("h may not involve the reduction variable")
    if h.involves(h.u_slot) or h.involves(h.v_slot):
        raise InvalidRelation("h may not involve U or V")
    exps = [0] * h.nvars
    exps[var] = r
    relation = Poly.monomial(field, h.nvars, exps) + h
    if is_domain is None:
        is_domain = binomial_shape_is_domain(field, r, h, var)
    return RingPresentation(
        field, relation, var, XR_PLUS_H, r=r, h=h, is_domain=is_domain, names=names
    )


def valuation_split(a: int, p: int) -> tuple[int, int]:
    """``a = s * p^e`` with ``p`` not dividing ``s``; returns ``(s, e)``."""
    e = p_adic_valuation(a, p)
    return a // (p**e) if p else a, e
