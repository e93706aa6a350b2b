"""Weight gradings, the filtration degree on ``X^r + h`` rings, and homogenization.

Weights are integers and may be zero or negative.  The filtration degree
extends base weights on the non-reduction variables to the whole ring by
giving ``x`` the weight ``d(h)/r``; base weights are rescaled first so that
this is an integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .expmap import ExpMap, UnverifiedMap, VerificationReport, is_trivial, verify
from .poly import Poly, WeightVector
from .ring import RingElement, RingPresentation, make_xr_plus_h

__all__ = [
    "CandidateVerificationFailed",
    "FiltrationDegree",
    "GradingError",
    "HomogenizationReport",
    "NonPrimeGradedRelation",
    "RelationNotHomogeneous",
    "StandardGrading",
    "TrivialMap",
    "ZeroElement",
    "associated_graded_presentation",
    "filtration_degree",
    "homogenize_map",
    "monomial_surface_gradings",
    "rho",
    "standard_grading",
]


class GradingError(ValueError):
    pass


class ZeroElement(GradingError):
    pass


class NonPrimeGradedRelation(GradingError):
    pass


class RelationNotHomogeneous(GradingError):
    pass


class TrivialMap(GradingError):
    pass


class CandidateVerificationFailed(GradingError):
    def __init__(self, message: str, report: VerificationReport, candidate: ExpMap):
        super().__init__(message)
        self.report = report
        self.candidate = candidate


@dataclass(frozen=True)
class StandardGrading:
    exponents: tuple[int, ...]
    L: int
    weights: tuple[int, ...]

    def weight_vector(self, u_weight=None) -> WeightVector:
        return WeightVector(self.weights, u_weight)


def standard_grading(exponents: Sequence[int]) -> StandardGrading:
    """``d_i = L / a_i`` with ``L = lcm(a)``, making ``sum X_i^a_i`` homogeneous of degree L."""
    exponents = tuple(int(a) for a in exponents)
    if not exponents or any(a < 1 for a in exponents):
        raise GradingError(f"exponents must be positive: {exponents}")
    L = lcm(*exponents)
    return StandardGrading(exponents, L, tuple(L // a for a in exponents))


def _split_relation(pres: RingPresentation) -> tuple[int, Poly]:
    """``(r, h)`` with relation ``x^r + h`` and ``h`` free of ``x``."""
    x = pres.reduction_var
    r = pres.reduction_degree
    exps = [0] * pres.n
    exps[x] = r
    h = pres.relation - Poly.monomial(pres.field, pres.n, exps)
    if h.involves(x):
        raise GradingError("relation is not of the form x^r + h(other variables)")
    return r, h


def _full_weights(pres: RingPresentation, base: WeightVector | Sequence[int]) -> tuple[int, ...]:
    w = base.weights if isinstance(base, WeightVector) else tuple(int(v) for v in base)
    x = pres.reduction_var
    if len(w) == pres.n - 1:
        w = w[:x] + (0,) + w[x:]
    elif len(w) == pres.n:
        w = w[:x] + (0,) + w[x + 1 :]
    else:
        raise GradingError(f"expected {pres.n - 1} base weights, got {len(w)}")
    return w


class FiltrationDegree:
    """``deg(g) = max_j (d(g_j) + j a)`` for ``g = sum_j g_j x^j`` in normal form.

    ``a = d(h)/r``; the base weights are multiplied by ``r / gcd(r, d(h))`` so
    that ``a`` is an integer.  Attribute ``weights`` is the full weight vector
    (``x`` carrying ``a``), under which ``deg`` is the ordinary weighted degree
    of the normal form.
    """

    def __init__(self, pres: RingPresentation, base_weights: WeightVector | Sequence[int]):
        self.presentation = pres
        self.r, self.h = _split_relation(pres)
        w = _full_weights(pres, base_weights)
        dh = self.h.weighted_degree(WeightVector(w)) if self.h else 0
        self.scale = self.r // gcd(self.r, dh)
        w = tuple(v * self.scale for v in w)
        dh *= self.scale
        self.a = dh // self.r
        x = pres.reduction_var
        self.base_weights = WeightVector(w)
        self.weights = WeightVector(w[:x] + (self.a,) + w[x + 1 :])
        self.h_degree = dh

    def degree(self, g: Poly | RingElement) -> int:
        pres = self.presentation
        g = pres.normal_form(g.nf if isinstance(g, RingElement) else g)
        if not g:
            raise ZeroElement("degree of zero")
        parts = g.coefficients_in(pres.reduction_var)
        return max(gj.weighted_degree(self.base_weights) + j * self.a for j, gj in parts.items())

    def top(self, g: Poly | RingElement) -> Poly:
        pres = self.presentation
        g = pres.normal_form(g.nf if isinstance(g, RingElement) else g)
        if not g:
            raise ZeroElement("rho of zero")
        return g.top_component(self.weights)


def filtration_degree(pres: RingPresentation, base_weights, g: Poly | RingElement) -> int:
    return FiltrationDegree(pres, base_weights).degree(g)


def associated_graded_presentation(
    pres: RingPresentation, base_weights
) -> tuple[RingPresentation, bool]:
    """Presentation of ``gr`` with relation ``x^r + top(h)``.

    Returns the presentation and whether primality of the new relation was
    actually checked (only the binomial and sum-of-powers shapes are).
    """
    fd = FiltrationDegree(pres, base_weights)
    h_top = fd.h.top_component(fd.weights) if fd.h else fd.h
    graded = make_xr_plus_h(pres.field, fd.r, h_top, var=pres.reduction_var, names=pres.names)
    if graded.is_domain is False:
        raise NonPrimeGradedRelation(f"x^{fd.r} + {h_top.render(pres.names)} is not prime")
    return graded, graded.is_domain is True


def rho(pres: RingPresentation, g: Poly | RingElement, weights: WeightVector | Sequence[int]) -> Poly:
    """Top homogeneous component of the normal form, for a homogeneous relation."""
    w = weights if isinstance(weights, WeightVector) else WeightVector(tuple(weights))
    if not pres.relation.is_homogeneous(w):
        raise RelationNotHomogeneous("relation is not homogeneous for these weights")
    g = pres.normal_form(g.nf if isinstance(g, RingElement) else g)
    if not g:
        raise ZeroElement("rho of zero")
    return g.top_component(w)


@dataclass
class HomogenizationReport:
    slope: Fraction
    achieved_by: list[tuple[int, int]]
    verification: VerificationReport
    homogeneous: bool
    nontrivial: bool


def homogenize_map(phi: ExpMap, weights: WeightVector | Sequence[int] | str = "standard") -> tuple[ExpMap, HomogenizationReport]:
    """Generator-wise homogenization of a verified nontrivial map.

    The slope is ``d = max (deg phi^(j)(x_i) - w_i) / j`` over nonzero
    coefficients; each image keeps only the components of degree
    ``w_i + j d``.  The candidate is always verified before being returned.
    """
    pres = phi.presentation
    if not phi.verified:
        if verify(phi).ok is False:
            raise UnverifiedMap("cannot homogenize a map that fails verification")
    if is_trivial(phi):
        raise TrivialMap("the map is trivial")
    if isinstance(weights, str):
        if weights != "standard" or pres.exponents is None:
            raise GradingError(f"unknown weights {weights!r}")
        weights = standard_grading(pres.exponents).weights
    w = weights if isinstance(weights, WeightVector) else WeightVector(tuple(weights))
    w = WeightVector(w.weights)
    if not pres.relation.is_homogeneous(w):
        raise RelationNotHomogeneous("relation is not homogeneous for these weights")

    gen_w = [pres.normal_form(pres.gen(i)).weighted_degree(w) for i in range(pres.n)]
    coeffs = [img.coefficients_in(pres.n) for img in phi.images]
    slopes: dict[tuple[int, int], Fraction] = {}
    for i, cs in enumerate(coeffs):
        for j, c in cs.items():
            if j >= 1:
                slopes[(i, j)] = Fraction(c.weighted_degree(w) - gen_w[i], j)
    d = max(slopes.values())
    achieved = sorted(k for k, v in slopes.items() if v == d)

    U = pres.U()
    images = []
    for i, cs in enumerate(coeffs):
        img = cs.get(0, pres.zero())
        for j, c in sorted(cs.items()):
            if j == 0:
                continue
            target = gen_w[i] + j * d
            if target.denominator != 1:
                continue
            comp = c.homogeneous_component(w, int(target))
            if comp:
                img = img + comp * U**j
        images.append(img)
    candidate = ExpMap(pres, images, label=f"homogenization of {phi.label or 'map'}")
    report = verify(candidate)
    if not report.ok:
        raise CandidateVerificationFailed(
            f"homogenized candidate failed verification: {report.describe(pres.names)}", report, candidate
        )
    wu = w.with_u(-d)
    homogeneous = all(img.is_homogeneous(wu) and (not img or img.weighted_degree(wu) == gen_w[i])
                      for i, img in enumerate(candidate.images))
    nontrivial = not is_trivial(candidate)
    return candidate, HomogenizationReport(d, achieved, report, homogeneous, nontrivial)


def monomial_surface_gradings(a: int, b: int, c: int) -> tuple[WeightVector, WeightVector]:
    """Two gradings making ``x^a + y^b z^c`` homogeneous: ``(c, 0, a)`` and ``(b, a, 0)``."""
    return WeightVector((c, 0, a)), WeightVector((b, a, 0))
