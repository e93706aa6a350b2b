"""Exponential maps on single-relation quotient rings.

An exponential map is given by the images of the generators in ``A[U]``.
:func:`verify` checks the three identities that make such an assignment a
well-defined exponential map:

* W: the relation vanishes on the images;
* E: setting ``U = 0`` gives back every generator;
* C: ``phi_V(phi_U(x_i)) == phi_{U+V}(x_i)`` for every generator.

Both sides of C are algebra maps, so checking generators is enough.  The
constructors below build the explicit non-rigidity witnesses used by the
classifier; each one is re-verified by the caller before it is trusted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .coeffs import FieldSpec, make_field, p_adic_valuation
from .poly import NEG_INF, Poly
from .ring import (
    PHAM_BRIESKORN,
    RingElement,
    RingPresentation,
    make_pham_brieskorn,
    make_xr_plus_h,
    valuation_split,
)

__all__ = [
    "CaseConditionViolated",
    "CharTwo",
    "DecompositionFailure",
    "ExpMap",
    "ExpMapError",
    "ImageNotInSubring",
    "NoSqrtMinusOne",
    "NoUnitExponent",
    "NotADomain",
    "PhiDegreeReport",
    "UnverifiedMap",
    "VerificationReport",
    "check_degree_inequality",
    "construct_degenerate",
    "construct_family_I",
    "construct_family_II",
    "construct_family_II_split",
    "construct_family_III",
    "identity_map",
    "is_trivial",
    "phi_degree",
    "restrict_to_frobenius_subring",
    "verify",
    "verify_extended",
]


class ExpMapError(ValueError):
    pass


class UnverifiedMap(ExpMapError):
    pass


class NotADomain(ExpMapError):
    pass


class DecompositionFailure(ExpMapError):
    pass


class NoSqrtMinusOne(ExpMapError):
    pass


class CharTwo(ExpMapError):
    pass


class CaseConditionViolated(ExpMapError):
    pass


class NoUnitExponent(ExpMapError):
    pass


class ImageNotInSubring(ExpMapError):
    """A restricted image left the Frobenius subring.

    For verified inputs this should be impossible; if it ever fires it is a
    counterexample to the restriction result, so it is reported loudly.
    """


class Status(str, enum.Enum):
    UNVERIFIED = "unverified"
    VERIFIED = "verified"
    FAILED = "failed"


@dataclass
class VerificationReport:
    ok: bool
    axiom: str | None = None
    generator: int | None = None
    residual: Poly | None = None
    message: str = ""

    def describe(self, names: Sequence[str] | None = None) -> str:
        if self.ok:
            return "verified"
        where = f" at generator {self.generator + 1}" if self.generator is not None else ""
        text = f"failed({self.axiom}){where}: {self.message}"
        if self.residual is not None:
            text += f"; residual {self.residual.render(names)}"
        return text


class ExpMap:
    """Images of the generators in ``A[U]``; verification status is cached."""

    def __init__(self, presentation: RingPresentation, images: Sequence[Poly | RingElement], label: str = ""):
        if len(images) != presentation.n:
            raise ExpMapError(f"need {presentation.n} images, got {len(images)}")
        clean = []
        for img in images:
            if isinstance(img, RingElement):
                img = img.nf
            if img.involves(img.v_slot):
                raise ExpMapError("images may not involve V")
            clean.append(presentation.normal_form(img))
        self.presentation = presentation
        self.images: tuple[Poly, ...] = tuple(clean)
        self.label = label
        self._report: VerificationReport | None = None

    @property
    def status(self) -> Status:
        if self._report is None:
            return Status.UNVERIFIED
        return Status.VERIFIED if self._report.ok else Status.FAILED

    @property
    def verified(self) -> bool:
        return self.status == Status.VERIFIED

    def require_verified(self) -> None:
        if self._report is None:
            verify(self)
        if not self._report.ok:
            raise UnverifiedMap(f"map failed verification: {self._report.describe()}")

    def apply(self, f: Poly | RingElement) -> Poly:
        """``phi_U(f)`` as a normal form in ``A[U]``."""
        if isinstance(f, RingElement):
            f = f.nf
        return self.presentation.compose(f, list(self.images))

    def coefficients(self, f: Poly | RingElement) -> dict[int, Poly]:
        """``{i: phi^(i)(f)}`` for the nonzero U-coefficients."""
        img = self.apply(f)
        return img.coefficients_in(img.u_slot)

    def u_degree(self) -> int:
        return max((img.degree_in(img.u_slot) for img in self.images if img), default=0)

    def render(self) -> list[str]:
        names = self.presentation.names
        return [f"{names[i]} -> {img.render(names)}" for i, img in enumerate(self.images)]

    def __repr__(self) -> str:
        return f"ExpMap({'; '.join(self.render())})"


def identity_map(pres: RingPresentation) -> ExpMap:
    return ExpMap(pres, pres.gens(), label="identity")


def verify(phi: ExpMap) -> VerificationReport:
    pres = phi.presentation
    images = list(phi.images)
    u_slot, v_slot = pres.n, pres.n + 1

    residual = pres.compose(pres.relation, images)
    if residual:
        report = VerificationReport(False, "W", None, residual, "relation does not vanish on the images")
        phi._report = report
        return report

    for i, img in enumerate(images):
        at_zero = img.coefficient_in(u_slot, 0)
        gen = pres.normal_form(pres.gen(i))
        if at_zero != gen:
            report = VerificationReport(False, "E", i, at_zero - gen, "U = 0 does not give the generator back")
            phi._report = report
            return report

    u_plus_v = pres.U() + pres.V()
    renamed = None
    for i, img in enumerate(images):
        if renamed is None:
            renamed = [im.rename_slot(u_slot, v_slot) for im in images]
        # phi_V(phi_U(x_i)): ring variables -> V-images, U stays
        lhs = pres.compose(img, renamed)
        rhs = pres.compose(img, [None] * pres.n, u=u_plus_v)
        if lhs != rhs:
            report = VerificationReport(False, "C", i, lhs - rhs, "phi_V phi_U differs from phi_(U+V)")
            phi._report = report
            return report

    report = VerificationReport(True, message="verified")
    phi._report = report
    return report


@dataclass
class ExtendedReport:
    ok: bool
    violations: list[str] = dc_field(default_factory=list)
    checks: int = 0


def verify_extended(phi: ExpMap, sample: Sequence[Poly | RingElement]) -> ExtendedReport:
    """Leibniz rule on pairs and ``phi^(i) phi^(j) = C(i+j, i) phi^(i+j)`` on singles."""
    if not phi.verified:
        raise UnverifiedMap("verify the map first")
    pres = phi.presentation
    fld = pres.field
    elems = [pres.normal_form(a.nf if isinstance(a, RingElement) else a) for a in sample]
    coeffs = [phi.coefficients(a) for a in elems]
    report = ExtendedReport(True)
    zero = pres.zero()

    for x, (a, ca) in enumerate(zip(elems, coeffs)):
        for y in range(x, len(elems)):
            b, cb = elems[y], coeffs[y]
            cab = phi.coefficients(pres.mul(a, b))
            top = max(list(cab) + [max(ca, default=0) + max(cb, default=0)])
            for k in range(top + 1):
                rhs = zero
                for i in range(k + 1):
                    if i in ca and (k - i) in cb:
                        rhs = rhs + pres.mul(ca[i], cb[k - i])
                report.checks += 1
                if cab.get(k, zero) != rhs:
                    report.ok = False
                    report.violations.append(f"Leibniz fails for sample pair ({x}, {y}) at U^{k}")

        for j, cj in ca.items():
            inner = phi.coefficients(cj)
            for i in range(max(ca) + 1):
                lhs = inner.get(i, zero)
                rhs = ca.get(i + j, zero).scale(fld.binomial(i + j, i))
                report.checks += 1
                if lhs != rhs:
                    report.ok = False
                    report.violations.append(f"composition identity fails for sample {x} at (i, j) = ({i}, {j})")
    return report


def is_trivial(phi: ExpMap) -> bool:
    phi.require_verified()
    pres = phi.presentation
    return all(img == pres.normal_form(pres.gen(i)) for i, img in enumerate(phi.images))


@dataclass
class PhiDegreeReport:
    element: Poly
    phi_degree: int | float
    invariant: bool


def phi_degree(phi: ExpMap, f: Poly | RingElement) -> PhiDegreeReport:
    phi.require_verified()
    pres = phi.presentation
    f = pres.normal_form(f.nf if isinstance(f, RingElement) else f)
    img = phi.apply(f)
    deg = img.degree_in(img.u_slot)
    return PhiDegreeReport(f, deg, deg <= 0)


def check_degree_inequality(phi: ExpMap, f: Poly | RingElement) -> bool:
    phi.require_verified()
    if phi.presentation.is_domain is not True:
        raise NotADomain("the phi-degree is only a degree function on a domain")
    f = f.nf if isinstance(f, RingElement) else f
    top = phi_degree(phi, f).phi_degree
    if top == NEG_INF or top == 0:
        return True
    coeffs = phi.coefficients(f)
    for i in range(1, top + 1):
        c = coeffs.get(i)
        if c is None:
            continue
        if phi_degree(phi, c).phi_degree > top - i:
            return False
    return phi_degree(phi, coeffs[top]).phi_degree == 0


# -- constructors ---------------------------------------------------------------


def _require_pb(pres: RingPresentation, power_one: bool = True) -> tuple[int, ...]:
    if pres.kind != PHAM_BRIESKORN:
        raise ExpMapError("constructor needs a Pham-Brieskorn presentation")
    if power_one and pres.power != 1:
        raise ExpMapError("constructor needs relation power 1")
    return pres.exponents


def _translate_pair(pres: RingPresentation, i: int, j: int, k: int) -> ExpMap:
    """``x_j -> x_j + U``, ``x_i -> x_i - ((x_j + U)^k - x_j^k)``."""
    xj = pres.gen(j)
    shifted = xj + pres.U()
    images = pres.gens()
    images[j] = shifted
    images[i] = pres.gen(i) - (shifted**k - xj**k)
    return ExpMap(pres, images)


def construct_family_I(pres: RingPresentation, i: int, j: int) -> ExpMap:
    """Translation along ``x_j`` when ``a_i = p^r`` and ``p^r`` divides ``a_j``."""
    a = _require_pb(pres)
    p = pres.field.characteristic
    if p == 0:
        raise DecompositionFailure("needs positive characteristic")
    if i == j:
        raise DecompositionFailure("indices must differ")
    s_i, r = valuation_split(a[i], p)
    if s_i != 1 or r < 1:
        raise DecompositionFailure(f"a_{i + 1} = {a[i]} is not a positive power of {p}")
    e = p_adic_valuation(a[j], p)
    if e < r:
        raise DecompositionFailure(f"v_{p}(a_{j + 1}) = {e} < {r}")
    phi = _translate_pair(pres, i, j, a[j] // p**r)
    phi.label = f"translation family on (x{i + 1}, x{j + 1})"
    return phi


def construct_degenerate(pres: RingPresentation, i: int | None = None, j: int | None = None) -> ExpMap:
    """Map for a unit exponent ``a_i = 1`` (the ring is a polynomial ring)."""
    a = _require_pb(pres)
    if i is None:
        i = next((t for t, e in enumerate(a) if e == 1), None)
        if i is None:
            raise NoUnitExponent(f"no exponent equals 1 in {a}")
    elif a[i] != 1:
        raise NoUnitExponent(f"a_{i + 1} = {a[i]} is not 1")
    if j is None:
        j = 0 if i != 0 else 1
    if j == i:
        raise ExpMapError("indices must differ")
    phi = _translate_pair(pres, i, j, a[j])
    phi.label = f"unit-exponent translation on (x{i + 1}, x{j + 1})"
    return phi


def _sqrt_minus_one(fld: FieldSpec, given=None):
    p = fld.characteristic
    if given is not None:
        c = fld.coerce(given)
        if fld.mul(c, c) != fld.neg(fld.one):
            raise NoSqrtMinusOne(f"{given} does not square to -1")
        return c
    c = fld.sqrt_minus_one_element()
    if c is None:
        raise NoSqrtMinusOne(f"{fld.describe()} has no concrete square root of -1")
    return c


def construct_family_II(pres: RingPresentation, i: int, j: int, sqrt=None) -> ExpMap:
    """Map for two exponents equal to 2, through ``u = x_i + i*x_j``, ``v = x_i - i*x_j``.

    With ``uv = x_i^2 + x_j^2 = -sum_k x_k^a_k`` the map fixes ``u``, moves
    ``x_k -> x_k + u U`` and ``v -> v - N/u`` with
    ``N = sum_k ((x_k + uU)^a_k - x_k^a_k)``.  Back in the original
    coordinates ``x_i = (u + v)/2`` and ``x_j = (u - v)/(2i)``.
    """
    a = _require_pb(pres)
    fld = pres.field
    if fld.characteristic == 2:
        raise CharTwo("use the translation family in characteristic 2")
    if i == j or a[i] != 2 or a[j] != 2:
        raise DecompositionFailure("need two distinct indices with exponent 2")
    iota = _sqrt_minus_one(fld, sqrt)
    u = pres.gen(i) + pres.gen(j).scale(iota)
    uU = u * pres.U()
    n_sum = pres.zero()
    images = pres.gens()
    for k in range(pres.n):
        if k in (i, j):
            continue
        xk = pres.gen(k)
        images[k] = xk + uU
        n_sum = n_sum + (images[k] ** a[k] - xk ** a[k])
    q = n_sum.exact_divide(u)
    if q is None:
        raise DecompositionFailure("N is not divisible by u")
    half = fld.inv(fld.coerce(2))
    images[i] = pres.gen(i) - q.scale(half)
    images[j] = pres.gen(j) + q.scale(fld.inv(fld.mul(fld.coerce(2), iota)))
    phi = ExpMap(pres, images)
    phi.label = f"quadric-splitting family on (x{i + 1}, x{j + 1})"
    return phi


def construct_family_II_split(field: FieldSpec, rest: Sequence[int]) -> ExpMap:
    """The same map written on the split ring ``k[u, v, x_3..]/(uv + x_3^a_3 + ...)``.

    This form needs no square root of -1 at all, so it serves abstract
    fields that are only declared to contain one.  The presentation reduces
    on ``x_3``.
    """
    rest = tuple(int(a) for a in rest)
    if not rest or any(a < 1 for a in rest):
        raise DecompositionFailure("need at least one further positive exponent")
    n = 2 + len(rest)
    names = ["u", "v"] + [f"x{k + 3}" for k in range(len(rest))]
    base = make_field(field.characteristic)
    h_terms = [([1, 1] + [0] * len(rest), 1)]
    for k, a in enumerate(rest[1:], start=3):
        exps = [0] * n
        exps[k] = a
        h_terms.append((exps, 1))
    h = Poly.from_terms(base, n, h_terms)
    pres = make_xr_plus_h(base, rest[0], h, var=2, names=names, is_domain=True)
    u = pres.gen(0)
    uU = u * pres.U()
    images = pres.gens()
    n_sum = pres.zero()
    for k, a in enumerate(rest, start=2):
        xk = pres.gen(k)
        images[k] = xk + uU
        n_sum = n_sum + (images[k] ** a - xk**a)
    q = n_sum.exact_divide(u)
    images[1] = pres.gen(1) - q
    phi = ExpMap(pres, images)
    phi.label = "quadric-splitting family in split coordinates"
    return phi


def construct_family_III(pres: RingPresentation, case: str | None = None, index: int | None = None) -> ExpMap:
    """Maps on the non-reduced ring ``k[X]/(G^m)``, ``G = sum X_i^a_i``, ``m > 1``.

    * ``a``: ``p`` divides no exponent; ``x_i -> x_i + (1/a_i) x_i G^(m-1) U`` for all i.
    * ``b``: ``a_n = s p^e`` with ``p^e >= m``; ``x_n -> x_n + G U``.
    * ``c``: ``a_n = s p^e`` with ``m > p^e > 1``; ``x_n -> x_n + G^(alpha+1) U``,
      ``alpha = m // p^e``.

    With ``case=None`` the first applicable of b, c, a is used.
    """
    a = _require_pb(pres, power_one=False)
    m = pres.power
    if m <= 1:
        raise CaseConditionViolated("needs relation power m > 1")
    p = pres.field.characteristic
    fld = pres.field

    def pick(cond) -> int | None:
        cands = [t for t in range(pres.n) if p and p_adic_valuation(a[t], p) >= 1 and cond(p ** p_adic_valuation(a[t], p))]
        if index is not None:
            return index if index in cands else None
        if not cands:
            return None
        return max(cands, key=lambda t: (p_adic_valuation(a[t], p), -t))

    cases = [case] if case else ["b", "c", "a"]
    G = pres.relation_base()
    for c in cases:
        if c == "a":
            if p and any(x % p == 0 for x in a):
                continue
            Gm1U = G ** (m - 1) * pres.U()
            images = [
                pres.gen(t) + (pres.gen(t) * Gm1U).scale(fld.inv(fld.coerce(a[t]))) for t in range(pres.n)
            ]
            phi = ExpMap(pres, images)
            phi.label = "Euler-type map on a power relation"
            return phi
        if c == "b":
            t = pick(lambda q: q >= m)
            if t is None:
                continue
            images = pres.gens()
            images[t] = images[t] + G * pres.U()
            phi = ExpMap(pres, images)
            phi.label = f"G-translation of x{t + 1} on a power relation"
            return phi
        if c == "c":
            t = pick(lambda q: 1 < q < m)
            if t is None:
                continue
            alpha = m // p ** p_adic_valuation(a[t], p)
            images = pres.gens()
            images[t] = images[t] + G ** (alpha + 1) * pres.U()
            phi = ExpMap(pres, images)
            phi.label = f"G^{alpha + 1}-translation of x{t + 1} on a power relation"
            return phi
        if c not in ("a", "b", "c"):
            raise CaseConditionViolated(f"unknown case {c!r}")
    raise CaseConditionViolated(f"no applicable case among {cases} for {a}, m = {m}, p = {p}")


def frobenius_restriction_data(exponents: Sequence[int], p: int) -> tuple[int, int, tuple[int, ...]]:
    """``(free index, r, new exponents)`` for the subring ``k[x_f, x_i^(p^r)]``.

    Exactly one exponent must be prime to ``p``; the others are ``s_i p^e_i``
    with ``e_i >= 1`` and ``r = min e_i``.
    """
    if p == 0:
        raise DecompositionFailure("needs positive characteristic")
    free = [t for t, x in enumerate(exponents) if x % p]
    if len(free) != 1:
        raise DecompositionFailure(f"need exactly one exponent prime to {p} in {tuple(exponents)}")
    f = free[0]
    r = min(p_adic_valuation(x, p) for t, x in enumerate(exponents) if t != f)
    q = p**r
    new = tuple(x if t == f else x // q for t, x in enumerate(exponents))
    return f, r, new


def restrict_to_frobenius_subring(phi: ExpMap) -> ExpMap:
    """Restrict to ``A = k[x_f, x_i^(p^r)]``, itself a Pham-Brieskorn ring.

    ``B`` is free over ``A`` on the monomials ``x_i^(c_i)`` with
    ``0 <= c_i < p^r``, so an element of ``B`` (in normal form with respect
    to ``x_f``) lies in ``A`` iff all other exponents are multiples of ``p^r``.
    Returns the restricted map, already verified.
    """
    phi.require_verified()
    pres = phi.presentation
    a = _require_pb(pres)
    p = pres.field.characteristic
    f, r, new = frobenius_restriction_data(a, p)
    q = p**r
    big = make_pham_brieskorn(pres.field, a, reduction_var=f) if pres.reduction_var != f else pres
    small = make_pham_brieskorn(pres.field, new, reduction_var=f)
    images = []
    for t in range(pres.n):
        img = big.normal_form(phi.images[t])
        if t != f:
            img = big.pow(img, q)
        images.append(_descend(img, f, q, t))
    out = ExpMap(small, images)
    out.label = f"restriction of {phi.label or 'map'} to the p^{r}-th power subring"
    report = verify(out)
    if not report.ok:
        raise ImageNotInSubring(f"restricted map failed verification: {report.describe()}")
    return out


def _descend(img: Poly, free: int, q: int, gen: int) -> Poly:
    n = img.nvars
    terms = []
    for exps, c in img.items():
        new = list(exps)
        for t in range(n):
            if t == free:
                continue
            if exps[t] % q:
                raise ImageNotInSubring(
                    f"image of generator {gen + 1} has x{t + 1}-exponent {exps[t]} not divisible by {q}"
                )
            new[t] = exps[t] // q
        terms.append((new, c))
    return Poly.from_terms(img.field, n, terms)
