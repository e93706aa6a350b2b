"""Sparse multivariate polynomials over a :class:`~pbrigid.coeffs.FieldSpec`.

A polynomial lives in ``k[X_1, ..., X_n, U, V]``: ``n`` ring variables plus
the two deformation variables used by exponential maps.  Terms are kept in a
dict from packed monomial keys to nonzero raw coefficients.

Packing puts the exponent of slot ``i`` in a 32-bit field, with ``X_1`` in
the most significant position and ``V`` in the least.  Multiplying two
monomials is then integer addition, and comparing keys compares monomials
lexicographically in the order ``X_1 > ... > X_n > U > V``.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .coeffs import FieldMismatch, FieldSpec

__all__ = [
    "ArityMismatch",
    "NEG_INF",
    "Poly",
    "PolyError",
    "UnassignedUWeight",
    "WeightVector",
    "ZeroPolynomial",
    "compose",
    "parse_poly",
]

SHIFT = 32
FIELD_MASK = (1 << SHIFT) - 1
EXP_LIMIT = 1 << 31
NEG_INF = float("-inf")


class PolyError(ValueError):
    pass


class ArityMismatch(PolyError):
    pass


class UnassignedUWeight(PolyError):
    pass


class ZeroPolynomial(PolyError):
    pass


def _shift(slot: int, nslots: int) -> int:
    return SHIFT * (nslots - 1 - slot)


def pack(exps: Sequence[int], nslots: int) -> int:
    if len(exps) > nslots:
        raise ArityMismatch(f"{len(exps)} exponents for {nslots} slots")
    key = 0
    for e in exps:
        if e < 0 or e >= EXP_LIMIT:
            raise OverflowError(f"exponent {e} out of range")
        key = (key << SHIFT) | e
    return key << (SHIFT * (nslots - len(exps)))


def unpack(key: int, nslots: int) -> tuple[int, ...]:
    out = [0] * nslots
    for i in range(nslots - 1, -1, -1):
        out[i] = key & FIELD_MASK
        key >>= SHIFT
    return tuple(out)


@dataclass(frozen=True)
class WeightVector:
    """Integer weights on the ring variables; ``u_weight`` also applies to V."""

    weights: tuple[int, ...]
    u_weight: Fraction | int | None = None

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))

    def scaled(self, factor: int) -> WeightVector:
        u = None if self.u_weight is None else self.u_weight * factor
        return WeightVector(tuple(w * factor for w in self.weights), u)

    def with_u(self, u_weight) -> WeightVector:
        return WeightVector(self.weights, u_weight)


class Poly:
    """Immutable sparse polynomial.  Build with the class constructors."""

    __slots__ = ("field", "nvars", "terms", "_maxdeg", "_hash")

    def __init__(self, field: FieldSpec, nvars: int, terms: dict[int, object] | None = None):
        self.field = field
        self.nvars = nvars
        self.terms = terms if terms is not None else {}
        self._maxdeg = None
        self._hash = None

    # -- construction -------------------------------------------------------

    @property
    def nslots(self) -> int:
        return self.nvars + 2

    @property
    def u_slot(self) -> int:
        return self.nvars

    @property
    def v_slot(self) -> int:
        return self.nvars + 1

    @classmethod
    def zero(cls, field: FieldSpec, nvars: int) -> Poly:
        return cls(field, nvars, {})

    @classmethod
    def const(cls, field: FieldSpec, nvars: int, c) -> Poly:
        c = field.coerce(c)
        return cls(field, nvars, {0: c} if c else {})

    @classmethod
    def monomial(cls, field: FieldSpec, nvars: int, exps: Sequence[int], c=1) -> Poly:
        c = field.coerce(c)
        return cls(field, nvars, {pack(exps, nvars + 2): c} if c else {})

    @classmethod
    def var(cls, field: FieldSpec, nvars: int, slot: int) -> Poly:
        exps = [0] * (nvars + 2)
        exps[slot] = 1
        return cls.monomial(field, nvars, exps)

    @classmethod
    def from_terms(cls, field: FieldSpec, nvars: int, items: Iterable) -> Poly:
        """Sum ``(exps, coeff)`` pairs; ``exps`` may omit trailing slots."""
        nslots = nvars + 2
        acc: dict[int, object] = {}
        for exps, c in items:
            k = pack(exps, nslots)
            acc[k] = acc.get(k, 0) + field.coerce(c)
        return cls(field, nvars, _clean(acc, field.characteristic))

    def with_terms(self, terms: dict[int, object]) -> Poly:
        return Poly(self.field, self.nvars, terms)

    # -- basic queries --------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                return self == Poly.const(self.field, self.nvars, other)
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.field.characteristic == other.field.characteristic
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field.characteristic, self.nvars, frozenset(self.terms.items())))
        return self._hash

    def exponent(self, key: int, slot: int) -> int:
        return (key >> _shift(slot, self.nslots)) & FIELD_MASK

    def exponents(self, key: int) -> tuple[int, ...]:
        return unpack(key, self.nslots)

    def max_degrees(self) -> tuple[int, ...]:
        if self._maxdeg is None:
            md = [0] * self.nslots
            for k in self.terms:
                for i, e in enumerate(unpack(k, self.nslots)):
                    if e > md[i]:
                        md[i] = e
            self._maxdeg = tuple(md)
        return self._maxdeg

    def degree_in(self, slot: int) -> int | float:
        if not self.terms:
            return NEG_INF
        return self.max_degrees()[slot]

    def involves(self, slot: int) -> bool:
        return bool(self.terms) and self.max_degrees()[slot] > 0

    def total_degree(self, slots: Iterable[int] | None = None) -> int | float:
        if not self.terms:
            return NEG_INF
        idx = list(range(self.nvars)) if slots is None else list(slots)
        return max(sum(e[i] for i in idx) for e in map(self.exponents, self.terms))

    def constant_term(self):
        return self.terms.get(0, self.field.zero)

    def items(self) -> list[tuple[tuple[int, ...], object]]:
        """``(exps, coeff)`` pairs in graded-lex order, largest first."""
        nslots = self.nslots
        rows = [(unpack(k, nslots), c) for k, c in self.terms.items()]
        rows.sort(key=lambda r: (sum(r[0]), r[0]), reverse=True)
        return rows

    # -- arithmetic -----------------------------------------------------------

    def _coerce_other(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ArityMismatch(f"{self.nvars} vs {other.nvars} ring variables")
            if not self.field.same_arithmetic(other.field):
                raise FieldMismatch(f"{self.field.describe()} vs {other.field.describe()}")
            return other
        return Poly.const(self.field, self.nvars, other)

    def __add__(self, other) -> Poly:
        other = self._coerce_other(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        p = self.field.characteristic
        out = dict(self.terms)
        get = out.get
        for k, c in other.terms.items():
            s = get(k, 0) + c
            if p:
                s %= p
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return self.with_terms(out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        p = self.field.characteristic
        if p:
            return self.with_terms({k: p - c for k, c in self.terms.items()})
        return self.with_terms({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> Poly:
        return self + (-self._coerce_other(other))

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def scale(self, c) -> Poly:
        c = self.field.coerce(c)
        if not c:
            return Poly.zero(self.field, self.nvars)
        p = self.field.characteristic
        if p:
            return self.with_terms({k: v * c % p for k, v in self.terms.items()})
        return self.with_terms({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._coerce_other(other)
        if not self.terms or not other.terms:
            return Poly.zero(self.field, self.nvars)
        a, b = self.max_degrees(), other.max_degrees()
        for x, y in zip(a, b):
            if x + y >= EXP_LIMIT:
                raise OverflowError("exponent overflow in product")
        return self.with_terms(_mul_terms(self.terms, other.terms, self.field.characteristic))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        return power(self, k)

    def frobenius(self, times: int = 1) -> Poly:
        """``self ** (p ** times)`` computed termwise; needs characteristic p > 0."""
        p = self.field.characteristic
        if not p:
            raise PolyError("Frobenius needs positive characteristic")
        q = p**times
        if self.terms and max(self.max_degrees()) * q >= EXP_LIMIT:
            raise OverflowError("exponent overflow in Frobenius power")
        # coefficients are fixed by Frobenius on F_p
        return self.with_terms({k * q: c for k, c in self.terms.items()})

    # -- slot manipulation ------------------------------------------------------

    def coefficients_in(self, slot: int) -> dict[int, Poly]:
        """Split as ``sum_j c_j * var^j``; returns ``{j: c_j}`` with the slot cleared."""
        sh = _shift(slot, self.nslots)
        groups: dict[int, dict] = defaultdict(dict)
        for k, c in self.terms.items():
            e = (k >> sh) & FIELD_MASK
            groups[e][k - (e << sh)] = c
        return {e: self.with_terms(t) for e, t in groups.items()}

    def coefficient_in(self, slot: int, j: int) -> Poly:
        sh = _shift(slot, self.nslots)
        out = {}
        for k, c in self.terms.items():
            if ((k >> sh) & FIELD_MASK) == j:
                out[k - (j << sh)] = c
        return self.with_terms(out)

    def derivative(self, slot: int) -> Poly:
        """Formal partial derivative with respect to ``slot``."""
        sh = _shift(slot, self.nslots)
        out = {}
        for k, c in self.terms.items():
            e = (k >> sh) & FIELD_MASK
            if e:
                out[k - (1 << sh)] = c * e
        return self.with_terms(_clean(out, self.field.characteristic))

    def rename_slot(self, src: int, dst: int) -> Poly:
        """Move the exponent of ``src`` onto ``dst`` (``dst`` must be unused)."""
        if self.involves(dst):
            raise PolyError("target slot already in use")
        s_src, s_dst = _shift(src, self.nslots), _shift(dst, self.nslots)
        out = {}
        for k, c in self.terms.items():
            e = (k >> s_src) & FIELD_MASK
            out[k - (e << s_src) + (e << s_dst)] = c
        return self.with_terms(out)

    def shift_slot(self, slot: int, e: int) -> Poly:
        """Multiply by ``var^e``."""
        if not self.terms:
            return self
        sh = _shift(slot, self.nslots)
        return self.with_terms({k + (e << sh): c for k, c in self.terms.items()})

    def substitute(self, images: Sequence[Poly | None], u: Poly | None = None, v: Poly | None = None) -> Poly:
        """Ring-homomorphic substitution ``X_i -> images[i]`` (``None`` keeps X_i).

        ``U`` and ``V`` map to themselves unless ``u`` / ``v`` are given.
        """
        if len(images) != self.nvars:
            raise ArityMismatch(f"need {self.nvars} images, got {len(images)}")
        table = {i: self._coerce_other(img) for i, img in enumerate(images) if img is not None}
        if u is not None:
            table[self.u_slot] = self._coerce_other(u)
        if v is not None:
            table[self.v_slot] = self._coerce_other(v)
        return compose(self, table)

    # -- weights ---------------------------------------------------------------

    def _term_weight(self, w: WeightVector) -> Callable[[int], object]:
        if len(w.weights) != self.nvars:
            raise ArityMismatch(f"{len(w.weights)} weights for {self.nvars} variables")
        nslots = self.nslots
        weights = w.weights
        uw = w.u_weight
        nv = self.nvars

        def weight(key: int):
            exps = unpack(key, nslots)
            total = sum(a * b for a, b in zip(weights, exps))
            eu = exps[nv] + exps[nv + 1]
            if eu:
                if uw is None:
                    raise UnassignedUWeight("polynomial involves U but the U weight is unassigned")
                total = total + uw * eu
            return total

        return weight

    def weighted_degree(self, w: WeightVector):
        if not self.terms:
            return NEG_INF
        weight = self._term_weight(w)
        return max(weight(k) for k in self.terms)

    def is_homogeneous(self, w: WeightVector) -> bool:
        weight = self._term_weight(w)
        return len({weight(k) for k in self.terms}) <= 1

    def homogeneous_components(self, w: WeightVector) -> dict:
        weight = self._term_weight(w)
        groups: dict = defaultdict(dict)
        for k, c in self.terms.items():
            groups[weight(k)][k] = c
        return {d: self.with_terms(t) for d, t in groups.items()}

    def homogeneous_component(self, w: WeightVector, d) -> Poly:
        weight = self._term_weight(w)
        return self.with_terms({k: c for k, c in self.terms.items() if weight(k) == d})

    def top_component(self, w: WeightVector) -> Poly:
        if not self.terms:
            raise ZeroPolynomial("the zero polynomial has no top component")
        return self.homogeneous_component(w, self.weighted_degree(w))

    # -- division ----------------------------------------------------------------

    def exact_divide(self, g: Poly) -> Poly | None:
        """Quotient ``self / g`` if ``g`` divides ``self`` exactly, else None.

        Division by a single polynomial under lex order; ``{g}`` is a Groebner
        basis of ``(g)``, so a nonzero remainder means non-divisibility.
        """
        g = self._coerce_other(g)
        if not g.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        lead = max(g.terms)
        lead_c_inv = self.field.inv(g.terms[lead])
        lead_exps = unpack(lead, self.nslots)
        rem = dict(self.terms)
        quot: dict[int, object] = {}
        p = self.field.characteristic
        while rem:
            k = max(rem)
            if any(a < b for a, b in zip(unpack(k, self.nslots), lead_exps)):
                return None
            t = k - lead
            c = self.field.mul(rem[k], lead_c_inv)
            quot[t] = c
            for gk, gc in g.terms.items():
                nk = t + gk
                s = rem.get(nk, 0) - c * gc
                if p:
                    s %= p
                if s:
                    rem[nk] = s
                else:
                    rem.pop(nk, None)
        return self.with_terms(quot)

    # -- rendering -----------------------------------------------------------------

    def var_names(self) -> list[str]:
        return [f"X{i + 1}" for i in range(self.nvars)] + ["U", "V"]

    def render(self, names: Sequence[str] | None = None) -> str:
        """Text form ``c * X1^e1 * ... * U^eu`` with terms in graded-lex order."""
        if not self.terms:
            return "0"
        names = list(names) if names is not None else self.var_names()
        if len(names) == self.nvars:
            names += ["U", "V"]
        parts = []
        for exps, c in self.items():
            factors = []
            for name, e in zip(names, exps):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            coeff = self.field.render(c)
            if not factors:
                parts.append(coeff)
            elif coeff == "1":
                parts.append(" * ".join(factors))
            else:
                parts.append(" * ".join([coeff] + factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Poly({self.render()})"

    __str__ = render


def _clean(terms: dict, p: int) -> dict:
    if p:
        return {k: c % p for k, c in terms.items() if c % p}
    return {k: c for k, c in terms.items() if c}


def _mul_terms(a: dict, b: dict, p: int) -> dict:
    if len(a) < len(b):
        a, b = b, a
    if len(b) == 1:
        ((kb, cb),) = b.items()
        if p:
            return {k + kb: c * cb % p for k, c in a.items()}
        return {k + kb: c * cb for k, c in a.items()}
    out: dict[int, object] = {}
    get = out.get
    for kb, cb in b.items():
        for ka, ca in a.items():
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return _clean(out, p)


def power(f: Poly, k: int, reduce: Callable[[Poly], Poly] | None = None) -> Poly:
    """``f**k`` by binary exponentiation, Frobenius on factors of p, optional reduction."""
    if k < 0:
        raise PolyError("negative exponent")
    red = reduce or (lambda x: x)
    if k == 0:
        return red(Poly.const(f.field, f.nvars, 1))
    if k == 1 or not f.terms:
        return red(f)
    p = f.field.characteristic
    if p and k % p == 0:
        return red(power(f, k // p, reduce).frobenius())
    if len(f.terms) == 1:
        ((key, c),) = f.terms.items()
        if max(f.max_degrees()) * k >= EXP_LIMIT:
            raise OverflowError("exponent overflow in power")
        return red(f.with_terms({key * k: f.field.power(c, k)}))
    result = None
    base = f
    while True:
        if k & 1:
            result = base if result is None else red(result * base)
        k >>= 1
        if not k:
            break
        base = red(base * base)
    return red(result)


def compose(
    f: Poly,
    images: Mapping[int, Poly],
    reduce: Callable[[Poly], Poly] | None = None,
) -> Poly:
    """Substitute ``slot -> images[slot]`` for the listed slots of ``f``.

    Unlisted slots stay as they are.  Terms are grouped by their exponents
    on the substituted slots, Horner style, so shared prefixes cost one
    product; ``reduce`` (e.g. a normal form) is applied after every product.
    """
    red = reduce or (lambda x: x)
    slots = sorted(images)
    nslots = f.nslots
    zero = Poly.zero(f.field, f.nvars)
    if not f.terms:
        return zero
    if not slots:
        return red(f)
    shifts = [_shift(s, nslots) for s in slots]
    groups: dict[tuple, dict] = defaultdict(dict)
    for k, c in f.terms.items():
        exps = tuple((k >> sh) & FIELD_MASK for sh in shifts)
        rest = k
        for e, sh in zip(exps, shifts):
            rest -= e << sh
        groups[exps][rest] = c

    cache: dict[tuple[int, int], Poly] = {}

    def img_power(i: int, e: int) -> Poly:
        key = (i, e)
        if key not in cache:
            cache[key] = power(images[slots[i]], e, red)
        return cache[key]

    def evaluate(sub: dict[tuple, dict], depth: int) -> Poly:
        if depth == len(slots):
            ((_, terms),) = sub.items()
            return red(f.with_terms(terms))
        by_e: dict[int, dict] = defaultdict(dict)
        for exps, terms in sub.items():
            by_e[exps[0]][exps[1:]] = terms
        total = zero
        for e in sorted(by_e):
            inner = evaluate(by_e[e], depth + 1)
            if not inner.terms:
                continue
            if e:
                inner = red(inner * img_power(depth, e))
            total = total + inner
        return total

    return evaluate(groups, 0)


_TERM_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?$")


def parse_poly(text: str, field: FieldSpec, nvars: int, names: Sequence[str] | None = None) -> Poly:
    """Parse the output of :meth:`Poly.render` (``+``-separated ``c * X1^2 * U`` terms)."""
    names = list(names) if names is not None else [f"X{i + 1}" for i in range(nvars)] + ["U", "V"]
    if len(names) == nvars:
        names += ["U", "V"]
    index = {n: i for i, n in enumerate(names)}
    text = text.strip()
    if text == "0":
        return Poly.zero(field, nvars)
    items = []
    for raw in text.split(" + "):
        pieces = [s.strip() for s in raw.split("*")]
        coeff = 1
        exps = [0] * (nvars + 2)
        for j, piece in enumerate(pieces):
            m = _TERM_FACTOR.match(piece)
            if m and m.group(1) in index:
                exps[index[m.group(1)]] += int(m.group(2) or 1)
            elif j == 0:
                coeff = Fraction(piece)
            else:
                raise PolyError(f"cannot parse factor {piece!r}")
        items.append((exps, coeff))
    return Poly.from_terms(field, nvars, items)
