"""Rigidity classification of Pham-Brieskorn rings ``B_a = k[X]/(sum X_i^a_i)``.

The verdict for a tuple comes from a fixed, ordered list of rules.  Rules
that say "non-rigid" always come with an explicit exponential map, which is
verified (and checked nontrivial) before the verdict is returned.  Rules
that say "rigid" rest on known theorems and carry a citation string only.

Exponent sets used by the rules, for characteristic ``p``:

* F: ``p`` does not divide ``gcd(a)`` (always true for ``p = 0``);
* T: some ``a_i = 1``, or two exponents equal 2;
* R: some ``a_i = 1``, or ``a_i = p^r`` and ``p^r | a_j`` for some ``i != j``, ``r >= 1``;
* S3: triples ``(2, 2m, 2p^e)`` up to order, ``m > 1``, ``e >= 1``, ``p`` not dividing ``2m``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import reduce
from itertools import permutations
from math import gcd
from typing import Any, Sequence

from .coeffs import FieldSpec, p_adic_valuation
from .expmap import (
    ExpMap,
    construct_degenerate,
    construct_family_I,
    construct_family_II,
    construct_family_II_split,
    construct_family_III,
    is_trivial,
    verify,
)
from .ring import make_pham_brieskorn, valuation_split

__all__ = [
    "MonomialSurface",
    "MonomialSurfaceWithF",
    "NoMapVerdict",
    "PB4",
    "SetMembership",
    "Status",
    "Translate",
    "Verdict",
    "WitnessFailure",
    "XmYnTqZp",
    "classify",
    "classify_special_form",
    "membership",
    "no_map_fixing",
]


class Status(str, enum.Enum):
    RIGID = "Rigid"
    STABLY_RIGID = "StablyRigid"
    NON_RIGID = "NonRigid"
    NON_DOMAIN_NON_RIGID = "NonDomainNonRigid"
    UNKNOWN = "Unknown"

    @property
    def is_rigid(self) -> bool:
        return self in (Status.RIGID, Status.STABLY_RIGID)

    @property
    def is_non_rigid(self) -> bool:
        return self in (Status.NON_RIGID, Status.NON_DOMAIN_NON_RIGID)


class WitnessFailure(RuntimeError):
    """A constructed witness did not verify; this is a bug, never a verdict."""


CITATIONS = {
    "R1": "p divides gcd(a): B is not a domain and carries an exponential map on (sum X_i^(a_i/p^t))^(p^t)",
    "R2": "some a_i = 1: B is a polynomial ring",
    "R3": "a_i = p^r and p^r | a_j: translation-type exponential map",
    "R4": "two exponents equal 2 and sqrt(-1) in k: the quadric part splits as u*v",
    "R5": "stable rigidity: 1/a + 1/s2 + 1/s3 <= 1 with p not dividing a*s2*s3",
    "R6": "rigidity for triples in F3 outside R3, T3 and S3",
    "R7": "B(2,2,c) with c odd, char != 2, sqrt(-1) not in k: rigid",
    "R8": "no rule applies",
}


@dataclass(frozen=True)
class SetMembership:
    exponents: tuple[int, ...]
    p: int
    in_F: bool
    in_T: bool
    in_R: bool
    in_S3: bool
    unit_index: int | None = None
    two_pair: tuple[int, int] | None = None
    # (i, j, r, s, e): a_i = p^r, a_j = s p^e, r <= e
    r_witness: tuple[int, int, int, int, int] | None = None
    # (m, e) with the tuple a permutation of (2, 2m, 2p^e)
    s3_witness: tuple[int, int] | None = None


def _r_witness(a: Sequence[int], p: int) -> tuple[int, int, int, int, int] | None:
    if p == 0:
        return None
    for i, ai in enumerate(a):
        s_i, r = valuation_split(ai, p)
        if s_i != 1 or r < 1:
            continue
        for j, aj in enumerate(a):
            if j == i:
                continue
            s, e = valuation_split(aj, p)
            if e >= r:
                return (i, j, r, s, e)
    return None


def _s3_witness(a: Sequence[int], p: int) -> tuple[int, int] | None:
    if p == 0 or len(a) != 3:
        return None
    for x, y, z in permutations(a):
        if x != 2 or y % 2 or z % 2:
            continue
        m, w = y // 2, z // 2
        s, e = valuation_split(w, p)
        if s == 1 and e >= 1 and m > 1 and (2 * m) % p:
            return (m, e)
    return None


def membership(exponents: Sequence[int], p: int) -> SetMembership:
    a = tuple(int(x) for x in exponents)
    if len(a) < 2 or any(x < 1 for x in a):
        raise ValueError(f"need at least two positive exponents: {a}")
    g = reduce(gcd, a)
    in_F = p == 0 or g % p != 0
    unit = next((i for i, x in enumerate(a) if x == 1), None)
    twos = [i for i, x in enumerate(a) if x == 2]
    pair = (twos[0], twos[1]) if len(twos) >= 2 else None
    rw = _r_witness(a, p)
    s3 = _s3_witness(a, p)
    return SetMembership(
        a,
        p,
        in_F,
        in_T=unit is not None or pair is not None,
        in_R=unit is not None or rw is not None,
        in_S3=s3 is not None,
        unit_index=unit,
        two_pair=pair,
        r_witness=rw,
        s3_witness=s3,
    )


@dataclass
class Verdict:
    exponents: tuple[int, ...]
    field: FieldSpec
    status: Status
    rule: str
    citation: str
    witness: ExpMap | None = None
    notes: list[str] = dc_field(default_factory=list)

    def to_dict(self, with_witness: bool = True) -> dict[str, Any]:
        from .formats import map_to_dict

        d: dict[str, Any] = {
            "tuple": list(self.exponents),
            "char": self.field.characteristic,
            "traits": self.field.traits(),
            "status": self.status.value,
            "rule": self.rule,
            "citation": self.citation,
        }
        if with_witness and self.witness is not None:
            d["witness"] = map_to_dict(self.witness)
        d["notes"] = list(self.notes)
        return d


def _checked(phi: ExpMap) -> ExpMap:
    report = verify(phi)
    if not report.ok:
        raise WitnessFailure(f"{phi.label}: {report.describe(phi.presentation.names)}")
    if is_trivial(phi):
        raise WitnessFailure(f"{phi.label}: witness is trivial")
    return phi


def _stable_rigidity_split(a: Sequence[int], p: int) -> tuple | None:
    for x, y, z in permutations(a):
        if p and x % p == 0:
            continue
        s2, _ = valuation_split(y, p)
        s3, _ = valuation_split(z, p)
        if Fraction(1, x) + Fraction(1, s2) + Fraction(1, s3) <= 1:
            return (x, s2, s3)
    return None


def classify(exponents: Sequence[int], field: FieldSpec) -> Verdict:
    a = tuple(int(x) for x in exponents)
    if len(a) < 3:
        raise ValueError("classification needs at least three exponents")
    p = field.characteristic
    mem = membership(a, p)
    n = len(a)

    def verdict(status: Status, rule: str, witness=None, notes=None) -> Verdict:
        return Verdict(a, field, status, rule, CITATIONS[rule], witness, list(notes or []))

    # rule 1: non-reduced ring
    if not mem.in_F:
        t = p_adic_valuation(reduce(gcd, a), p)
        q = p**t
        base = tuple(x // q for x in a)
        pres = make_pham_brieskorn(field, base, m=q)
        phi = _checked(construct_family_III(pres))
        return verdict(
            Status.NON_DOMAIN_NON_RIGID,
            "R1",
            phi,
            [f"relation written as ({' + '.join(f'X{i + 1}^{b}' for i, b in enumerate(base))})^{q}", f"witness: {phi.label}"],
        )

    pres = make_pham_brieskorn(field, a)
    if mem.unit_index is not None:
        phi = _checked(construct_degenerate(pres, mem.unit_index))
        return verdict(Status.NON_RIGID, "R2", phi, [f"witness: {phi.label}"])

    if mem.r_witness is not None:
        i, j, r, s, e = mem.r_witness
        phi = _checked(construct_family_I(pres, i, j))
        return verdict(
            Status.NON_RIGID,
            "R3",
            phi,
            [f"a_{i + 1} = {p}^{r}, a_{j + 1} = {s}*{p}^{e}", f"witness: {phi.label}"],
        )

    if mem.two_pair is not None and field.sqrt_minus_one:
        i, j = mem.two_pair
        if p == 2:
            phi = construct_family_I(pres, i, j)
            notes = []
        elif field.sqrt_minus_one_element() is not None:
            phi = construct_family_II(pres, i, j)
            notes = []
        else:
            rest = tuple(x for t, x in enumerate(a) if t not in (i, j))
            phi = construct_family_II_split(field, rest)
            notes = ["witness written in split coordinates u = x_i + i*x_j, v = x_i - i*x_j"]
        phi = _checked(phi)
        return verdict(Status.NON_RIGID, "R4", phi, notes + [f"witness: {phi.label}"])

    rigid_notes = ["rigidity also holds for the translates X^a + Y^b + Z^c + lambda"]
    if n == 3:
        split = _stable_rigidity_split(a, p)
        if split is not None:
            x, s2, s3 = split
            return verdict(
                Status.STABLY_RIGID,
                "R5",
                notes=[f"a = {x}, s2 = {s2}, s3 = {s3}"] + rigid_notes,
            )
        if not mem.in_T and not mem.in_S3:
            return verdict(Status.RIGID, "R6", notes=rigid_notes)
        if (
            sorted(a)[:2] == [2, 2]
            and sorted(a)[2] % 2 == 1
            and sorted(a)[2] > 1
            and p != 2
            and not field.sqrt_minus_one
            and not field.algebraically_closed
        ):
            return verdict(Status.RIGID, "R7", notes=rigid_notes)

    notes = []
    if mem.in_S3:
        m, e = mem.s3_witness
        notes.append(f"tuple is in S3 with m = {m}, e = {e}; this case is open")
    if mem.in_T and not field.sqrt_minus_one:
        notes.append("two exponents equal 2 but k has no square root of -1")
    if n > 3:
        notes.append("no rigidity criterion for four or more variables")
    return verdict(Status.UNKNOWN, "R8", notes=notes)


# -- special forms ---------------------------------------------------------------


@dataclass(frozen=True)
class MonomialSurface:
    """``X^a + Y^b Z^c``."""

    a: int
    b: int
    c: int


@dataclass(frozen=True)
class MonomialSurfaceWithF:
    """``X^a + Y^b Z^c + F(Y)``; ``F`` is kept as an opaque description."""

    a: int
    b: int
    c: int
    F: Any = None


@dataclass(frozen=True)
class Translate:
    """``X^a + Y^b + Z^c + lambda``."""

    a: int
    b: int
    c: int
    lam: Any = 0


def classify_special_form(form, field: FieldSpec) -> Verdict:
    if isinstance(form, (MonomialSurface, MonomialSurfaceWithF)):
        abc = (form.a, form.b, form.c)
        if min(abc) >= 2 and reduce(gcd, abc) == 1:
            return Verdict(
                abc,
                field,
                Status.RIGID,
                "S1",
                "X^a + Y^b Z^c + F(Y) with a, b, c >= 2 and gcd(a, b, c) = 1 is a rigid domain",
            )
        return Verdict(abc, field, Status.UNKNOWN, "S0", "hypotheses a, b, c >= 2 and gcd = 1 fail")
    if isinstance(form, Translate):
        abc = (form.a, form.b, form.c)
        base = classify(abc, field)
        if base.status.is_rigid and membership(abc, field.characteristic).in_F:
            return Verdict(
                abc,
                field,
                Status.RIGID,
                "S2",
                f"translate of a rigid Pham-Brieskorn surface ({base.rule}: {base.citation})",
            )
        return Verdict(abc, field, Status.UNKNOWN, "S0", "the untranslated surface is not known to be rigid")
    raise TypeError(f"unknown special form {form!r}")


@dataclass(frozen=True)
class XmYnTqZp:
    """``k[X,Y,Z,T]/(X^m Y^n + T^(q p^r) + Z^(p^e))``."""

    m: int
    n: int
    q: int
    r: int
    e: int
    p: int


@dataclass(frozen=True)
class PB4:
    a: int
    b: int
    c: int
    d: int
    p: int


@dataclass
class NoMapVerdict:
    excluded: bool
    citation: str = ""
    conditions: list[str] = dc_field(default_factory=list)

    @property
    def label(self) -> str:
        return "Excluded" if self.excluded else "Unknown"


_GEN_NAMES = {"x": 0, "y": 1, "z": 2, "t": 3}


def _gen_index(generator) -> int:
    if isinstance(generator, str):
        return _GEN_NAMES[generator.lower()]
    return int(generator)


def _in_F_minus_T_S3(triple: Sequence[int], p: int) -> bool:
    mem = membership(triple, p)
    return mem.in_F and not mem.in_T and not mem.in_R and not mem.in_S3


def no_map_fixing(form, generator) -> NoMapVerdict:
    """Whether known results exclude a nontrivial exponential map fixing ``generator``."""
    g = _gen_index(generator)
    if isinstance(form, XmYnTqZp):
        m, n, q, r, e, p = form.m, form.n, form.q, form.r, form.e, form.p
        if not (p > 0 and min(m, n, q, r, e) >= 1 and q % p and e > r >= 1):
            return NoMapVerdict(False, conditions=["base hypotheses p > 0, p not dividing q, e > r >= 1 fail"])
        cite = "no nontrivial exponential map on X^m Y^n + T^(q p^r) + Z^(p^e) fixes"
        if g == 1 and m % p and m >= 2 and q >= 2:
            return NoMapVerdict(True, f"{cite} y", ["p does not divide m", "m, q >= 2", "e > r >= 1"])
        if g == 3 and m >= 2 and n >= 2 and gcd(gcd(m, n), p) == 1:
            return NoMapVerdict(True, f"{cite} t", ["m, n >= 2", "gcd(m, n, p) = 1"])
        if g == 2 and m >= 2 and n >= 2 and gcd(gcd(m, n), p * q) == 1:
            return NoMapVerdict(True, f"{cite} z", ["m, n >= 2", "gcd(m, n, pq) = 1"])
        return NoMapVerdict(False, conditions=["no case matches"])
    if isinstance(form, PB4):
        tup = (form.a, form.b, form.c, form.d)
        p = form.p
        mem = membership(tup, p)
        if not mem.in_F or mem.in_R or mem.in_T:
            return NoMapVerdict(False, conditions=["tuple is not in F4 minus (R4 and T4)"])
        rest = tuple(x for i, x in enumerate(tup) if i != g)
        cite = f"no nontrivial exponential map on B{tup} fixes generator {g + 1}"
        if _in_F_minus_T_S3(rest, p):
            return NoMapVerdict(True, cite, [f"{rest} in F3 minus S3"])
        if p:
            for b, c, d in permutations(rest):
                (s2, m), (s3, r), (s4, e) = (valuation_split(x, p) for x in (b, c, d))
                if min(m, r, e) >= 1 and m <= r <= e:
                    reduced = (s2, s3 * p ** (r - m), s4 * p ** (e - m))
                    rm = membership(reduced, p)
                    if rm.in_F and not rm.in_T and not rm.in_S3:
                        return NoMapVerdict(
                            True, cite, [f"{(b, c, d)} reduces to {reduced} in F3 minus (T3 and S3)"]
                        )
        return NoMapVerdict(False, conditions=["neither condition on the remaining exponents holds"])
    raise TypeError(f"unknown descriptor {form!r}")
