"""Exhaustive bounded search for exponential maps over small prime fields.

Candidates have the shape ``x_i -> x_i + sum_{j=1..D} c_ij U^j`` where each
``c_ij`` is an F_p-combination of normal-form monomials of total degree at
most a bound.  The constant ``U^0`` part is pinned by the evaluation axiom.

The coefficients are found level by level.  Once ``c_{*,<s}`` is fixed, the
conditions at ``U^s`` are affine-linear in ``c_{*,s}``:

* relation: ``sum_k dG/dx_k * c_ks + R_s = 0`` where ``R_s`` is the
  ``U^s`` coefficient of ``G`` evaluated on the images truncated below ``s``;
* comultiplication: ``C(s, l) c_is = phi^(l)(c_{i,s-l})`` for ``1 <= l < s``.

Each level is solved by Gaussian elimination over F_p and the affine
solution set is enumerated, so the tree only visits coefficient blocks that
satisfy every low-order identity.  Leaves are run through the full verifier.
Finding nothing says only that no map exists within the bounds.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field as dc_field
from itertools import combinations_with_replacement, product
from typing import Callable, Iterator, Sequence

from .classify import Verdict, classify
from .coeffs import FieldSpec, make_field
from .expmap import ExpMap, is_trivial, verify
from .poly import Poly
from .ring import RingPresentation, make_pham_brieskorn

__all__ = [
    "CrossCheckReport",
    "CrossCheckStatus",
    "SearchBounds",
    "SearchError",
    "SearchSize",
    "SearchSpaceTooLarge",
    "cross_check",
    "enumerate_maps",
    "search_size",
]

DEFAULT_CEILING = 2**32
MAX_SEARCH_PRIME = 5


class SearchError(ValueError):
    pass


class SearchSpaceTooLarge(SearchError):
    def __init__(self, message: str, size: int):
        super().__init__(message)
        self.size = size


@dataclass(frozen=True)
class SearchBounds:
    max_u_degree: int
    max_total_degree: int
    variable_mask: tuple[int, ...] | None = None
    ceiling: int = DEFAULT_CEILING
    # optional cap on visited tree nodes; None means run to completion
    max_nodes: int | None = None

    def __post_init__(self):
        if self.max_u_degree < 1:
            raise SearchError("max_u_degree must be >= 1")
        if self.max_total_degree < 0:
            raise SearchError("max_total_degree must be >= 0")


@dataclass(frozen=True)
class SearchSize:
    monomials: int
    unknowns_per_level: int
    levels: int
    block: int
    nominal: int


def _basis_monomials(pres: RingPresentation, bound: int) -> list[Poly]:
    """Normal-form monomials of total degree <= bound, in graded-lex order."""
    out = []
    n = pres.n
    for deg in range(bound + 1):
        for combo in combinations_with_replacement(range(n), deg):
            exps = [0] * n
            for v in combo:
                exps[v] += 1
            if exps[pres.reduction_var] >= pres.reduction_degree:
                continue
            out.append(Poly.monomial(pres.field, n, exps))
    return out


def _mask(pres: RingPresentation, bounds: SearchBounds) -> tuple[int, ...]:
    if bounds.variable_mask is None:
        return tuple(range(pres.n))
    mask = tuple(sorted(set(bounds.variable_mask)))
    if not mask or any(not 0 <= i < pres.n for i in mask):
        raise SearchError(f"bad variable mask {bounds.variable_mask}")
    return mask


def search_size(pres: RingPresentation, bounds: SearchBounds) -> SearchSize:
    p = pres.field.characteristic
    monos = len(_basis_monomials(pres, bounds.max_total_degree))
    per_level = monos * len(_mask(pres, bounds))
    return SearchSize(monos, per_level, bounds.max_u_degree, p**per_level, p ** (per_level * bounds.max_u_degree))


def _check_searchable(pres: RingPresentation, bounds: SearchBounds, max_prime: int) -> SearchSize:
    p = pres.field.characteristic
    if p == 0:
        raise SearchError("search needs a finite prime field")
    if p > max_prime:
        raise SearchError(f"search is limited to p <= {max_prime}")
    size = search_size(pres, bounds)
    if size.block > bounds.ceiling:
        raise SearchSpaceTooLarge(
            f"per-level block has {size.block} assignments, above the ceiling {bounds.ceiling}", size.block
        )
    return size


def _solve_affine(rows: list[list[int]], ncols: int, p: int) -> tuple[list[int], list[list[int]]] | None:
    """Solve ``A x = b`` mod p; rows are ``A | b``.  Returns (particular, kernel basis) or None."""
    pivots = []
    r = 0
    rows = [row[:] for row in rows]
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [v * inv % p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if rows[i][ncols]:
            return None
    x0 = [0] * ncols
    for i, c in enumerate(pivots):
        x0[c] = rows[i][ncols]
    free = [c for c in range(ncols) if c not in set(pivots)]
    kernel = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, c in enumerate(pivots):
            v[c] = -rows[i][fc] % p
        kernel.append(v)
    return x0, kernel


class _Searcher:
    def __init__(self, pres: RingPresentation, bounds: SearchBounds, progress: Callable | None):
        self.pres = pres
        self.bounds = bounds
        self.p = pres.field.characteristic
        self.mask = _mask(pres, bounds)
        self.monos = _basis_monomials(pres, bounds.max_total_degree)
        self.unknowns = [(k, mu) for k in self.mask for mu in self.monos]
        self.progress = progress
        self.nodes = 0
        G = pres.relation
        # column contribution of unknown (k, mu) to the relation equation
        self.w_cols = [pres.normal_form(G.derivative(k) * mu) for k, mu in self.unknowns]
        self.dG = {k: G.derivative(k) for k in self.mask}
        self.gens = pres.gens()

    def contains(self, images: Sequence[Poly]) -> bool:
        """Whether a map with these images lies in the bounded search space."""
        u = self.pres.n
        allowed = {next(iter(mu.terms)) for mu in self.monos}
        for i, img in enumerate(images):
            for j, c in img.coefficients_in(u).items():
                if j == 0:
                    if c != self.gens[i]:
                        return False
                elif j > self.bounds.max_u_degree or i not in self.mask or not set(c.terms) <= allowed:
                    return False
        return True

    def images(self, coeffs: list[dict[int, Poly]]) -> list[Poly]:
        U = self.pres.U()
        out = []
        for i in range(self.pres.n):
            img = self.gens[i]
            for j, c in sorted(coeffs[i].items()):
                if c:
                    img = img + c * U**j
            out.append(img)
        return out

    def level(self, coeffs: list[dict[int, Poly]], s: int):
        """Affine solution set for the level-s coefficients, or None."""
        pres, p = self.pres, self.p
        imgs = self.images(coeffs)
        u = pres.n
        r_s = pres.compose(pres.relation, imgs).coefficient_in(u, s)
        N = len(self.unknowns)
        eqs: dict[tuple, list[int]] = {}

        def row(tag) -> list[int]:
            if tag not in eqs:
                eqs[tag] = [0] * (N + 1)
            return eqs[tag]

        for col, poly in enumerate(self.w_cols):
            for key, c in poly.terms.items():
                row(("W", key))[col] = c
        for key, c in r_s.terms.items():
            row(("W", key))[N] = -c % p

        fld = pres.field
        nm = len(self.monos)
        for i in range(pres.n):
            for l in range(1, s):
                src = coeffs[i].get(s - l)
                rhs = pres.zero()
                if src:
                    img = pres.compose(src, imgs)
                    rhs = img.coefficient_in(u, l)
                b = fld.binomial(s, l)
                if b and i in self.mask:
                    for t, mu in enumerate(self.monos):
                        ((key, _),) = mu.terms.items()
                        row(("C", i, l, key))[self.mask.index(i) * nm + t] = b
                for key, c in rhs.terms.items():
                    row(("C", i, l, key))[N] = c
        return _solve_affine(list(eqs.values()), N, p)

    def final_level(self, coeffs: list[dict[int, Poly]], s: int):
        """Affine solution set for the top level ``s``.

        With every lower level fixed, any term carrying two top-level factors
        has (U, V)-degree at least ``2s``.  Below that the W and C residuals
        are affine in the top-level unknowns, and the linear part is the
        first-order term: ``dG/dx_k (images) * mu * U^s`` for W, and
        ``d(img_i)/dx_k (V-images) * mu * V^s`` plus, for ``i = k``,
        ``mu(V-images) U^s - mu (U + V)^s`` for C.
        """
        pres, p = self.pres, self.p
        u, v = pres.n, pres.n + 1
        limit = 2 * s
        imgs = self.images(coeffs)
        renamed = [im.rename_slot(u, v) for im in imgs]
        U, V = pres.U(), pres.V()
        Us, Vs, UVs = U**s, V**s, (U + V) ** s

        def low(f: Poly, tag: tuple, out: dict) -> None:
            for key, c in f.terms.items():
                if f.exponent(key, u) + f.exponent(key, v) < limit:
                    out[tag + (key,)] = c

        base: dict[tuple, int] = {}
        low(pres.compose(pres.relation, imgs), ("W",), base)
        u_plus_v = U + V
        for i in self.mask:
            diff = pres.compose(imgs[i], renamed) - pres.compose(imgs[i], [None] * pres.n, u=u_plus_v)
            low(diff, ("C", i), base)

        dG = {k: pres.compose(self.dG[k], imgs) for k in self.mask}
        dI = {
            (i, k): pres.compose(imgs[i].derivative(k), renamed)
            for i in self.mask
            for k in self.mask
            if imgs[i].involves(k)
        }
        cols = []
        for k, mu in self.unknowns:
            col: dict[tuple, int] = {}
            low(pres.normal_form(dG[k] * mu * Us), ("W",), col)
            mu_v = pres.compose(mu, renamed)
            for i in self.mask:
                d = pres.zero()
                if (i, k) in dI:
                    d = pres.normal_form(dI[(i, k)] * mu * Vs)
                if i == k:
                    d = d + pres.normal_form(mu_v * Us) - pres.normal_form(mu * UVs)
                low(d, ("C", i), col)
            cols.append(col)

        tags = sorted(set(base).union(*cols), key=repr)
        N = len(self.unknowns)
        rows = []
        for tag in tags:
            row = [col.get(tag, 0) % p for col in cols]
            row.append(-base.get(tag, 0) % p)
            rows.append(row)
        return _solve_affine(rows, N, p)

    def assign(self, vec: Sequence[int]) -> dict[int, Poly]:
        out: dict[int, Poly] = {}
        for (k, mu), v in zip(self.unknowns, vec):
            if v:
                out[k] = out.get(k, self.pres.zero()) + mu.scale(v)
        return out

    def run(self) -> Iterator[ExpMap]:
        n = self.pres.n
        D = self.bounds.max_u_degree
        p = self.p

        def rec(coeffs: list[dict[int, Poly]], s: int) -> Iterator[ExpMap]:
            if s > D:
                if all(not c for c in coeffs):
                    return
                phi = ExpMap(self.pres, self.images(coeffs), label="search result")
                if verify(phi).ok and not is_trivial(phi):
                    yield phi
                return
            sol = self.final_level(coeffs, s) if s == D else self.level(coeffs, s)
            if sol is None:
                return
            x0, kernel = sol
            if p ** len(kernel) > self.bounds.ceiling:
                raise SearchSpaceTooLarge(f"level {s} solution space has {p ** len(kernel)} points", p ** len(kernel))
            for combo in product(range(p), repeat=len(kernel)):
                vec = list(x0)
                for a, v in zip(combo, kernel):
                    if a:
                        vec = [(x + a * y) % p for x, y in zip(vec, v)]
                self.nodes += 1
                if self.bounds.max_nodes is not None and self.nodes > self.bounds.max_nodes:
                    raise SearchSpaceTooLarge(
                        f"search visited more than {self.bounds.max_nodes} nodes", self.nodes
                    )
                if self.progress is not None and self.nodes % 1000 == 0:
                    self.progress(self.nodes, s)
                level_c = self.assign(vec)
                nxt = [dict(c) for c in coeffs]
                for k, c in level_c.items():
                    nxt[k][s] = c
                yield from rec(nxt, s + 1)

        yield from rec([{} for _ in range(n)], 1)


def enumerate_maps(
    pres: RingPresentation,
    bounds: SearchBounds,
    progress: Callable[[int, int], None] | None = None,
    max_prime: int = MAX_SEARCH_PRIME,
) -> Iterator[ExpMap]:
    """Every verified nontrivial map of the bounded shape, in a fixed order."""
    _check_searchable(pres, bounds, max_prime)
    return _Searcher(pres, bounds, progress).run()


class CrossCheckStatus(str, enum.Enum):
    CONFIRMED = "CONFIRMED"
    CONSISTENT = "CONSISTENT"
    CONTRADICTION = "CONTRADICTION"


@dataclass
class CrossCheckReport:
    status: CrossCheckStatus
    verdict: Verdict
    found: list[ExpMap] = dc_field(default_factory=list)
    elapsed: float = 0.0
    size: SearchSize | None = None

    def summary(self) -> str:
        found = f"{len(self.found)} map(s) found" if self.found else "no map found within bounds"
        return f"{self.status.value}: verdict {self.verdict.status.value} ({self.verdict.rule}); {found}"


def cross_check(
    exponents: Sequence[int],
    p: int,
    bounds: SearchBounds,
    field: FieldSpec | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> CrossCheckReport:
    """Compare the classifier's verdict with a bounded search on the same ring."""
    field = field or make_field(p)
    start = time.perf_counter()
    verdict = classify(exponents, field)
    pres = make_pham_brieskorn(field, exponents)
    size = _check_searchable(pres, bounds, MAX_SEARCH_PRIME)
    target = None
    w = verdict.witness
    if w is not None and w.presentation.n == pres.n and w.presentation.same_ideal(pres):
        target = tuple(pres.normal_form(img) for img in w.images)
    searcher = _Searcher(pres, bounds, progress)
    if target is not None and not searcher.contains(target):
        target = None
    found = []
    status = CrossCheckStatus.CONSISTENT
    for phi in searcher.run():
        found.append(phi)
        if verdict.status.is_rigid:
            status = CrossCheckStatus.CONTRADICTION
            break
        if target is not None and phi.images == target:
            status = CrossCheckStatus.CONFIRMED
            break
        if target is None:
            # nothing left that could change the outcome
            break
    return CrossCheckReport(status, verdict, found, time.perf_counter() - start, size)
