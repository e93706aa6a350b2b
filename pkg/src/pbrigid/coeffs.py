"""Exact coefficient fields: the prime fields F_p and the rationals.

Field elements are stored as plain Python values so that the polynomial
kernels can work on them without wrapping: residues ``0 <= c < p`` for
``F_p`` and :class:`fractions.Fraction` for ``Q``.  :class:`FieldSpec` owns
every operation on those raw values, and :class:`Coefficient` is a thin
checked wrapper for callers that want operator syntax.

A ``FieldSpec`` also records two traits used by the classifier: whether the
field is declared algebraically closed, and whether it contains a square
root of -1.  For a concrete prime field the latter is computed; a declared
value describes an abstract field of that characteristic on which no
arithmetic beyond the prime field is performed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb

from sympy import isprime

__all__ = [
    "Coefficient",
    "DivisionByZero",
    "FieldError",
    "FieldMismatch",
    "FieldSpec",
    "InconsistentTrait",
    "InvalidCharacteristic",
    "SqrtSource",
    "coeff_arith",
    "make_field",
    "p_adic_valuation",
]


class FieldError(ValueError):
    pass


class InvalidCharacteristic(FieldError):
    pass


class InconsistentTrait(FieldError):
    pass


class FieldMismatch(FieldError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


class SqrtSource(str, enum.Enum):
    COMPUTED = "computed"
    DECLARED = "declared"
    CLOSURE = "closure"


def p_adic_valuation(n: int, p: int) -> int:
    """Exponent of the prime ``p`` in ``n`` (``n > 0``); 0 when ``p == 0``."""
    if n <= 0:
        raise ValueError("valuation needs a positive integer")
    if p == 0:
        return 0
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@lru_cache(maxsize=None)
def _sqrt_minus_one_mod(p: int) -> int:
    if p == 2:
        return 1
    # c^((p-1)/4) squares to -1 for any quadratic non-residue c
    c = 2
    while pow(c, (p - 1) // 2, p) != p - 1:
        c += 1
    root = pow(c, (p - 1) // 4, p)
    return min(root, p - root)


def _prime_field_has_sqrt_minus_one(p: int) -> bool:
    if p == 0:
        return False
    return p == 2 or p % 4 == 1


@dataclass(frozen=True)
class FieldSpec:
    characteristic: int
    algebraically_closed: bool = False
    sqrt_minus_one: bool = False
    sqrt_source: SqrtSource = SqrtSource.COMPUTED

    @property
    def p(self) -> int:
        return self.characteristic

    @property
    def is_concrete(self) -> bool:
        """True when the field is exactly the prime field F_p or Q."""
        return not self.algebraically_closed and self.sqrt_source == SqrtSource.COMPUTED

    def same_arithmetic(self, other: FieldSpec) -> bool:
        return self.characteristic == other.characteristic

    def describe(self) -> str:
        base = "Q" if self.characteristic == 0 else f"F_{self.characteristic}"
        if self.algebraically_closed:
            return f"closure of {base}"
        if self.sqrt_source == SqrtSource.DECLARED and self.sqrt_minus_one:
            return f"{base}-field containing sqrt(-1)"
        return base

    def traits(self) -> dict:
        return {
            "alg_closed": self.algebraically_closed,
            "sqrt_minus_one": self.sqrt_minus_one,
        }

    # -- raw element operations -------------------------------------------

    @cached_property
    def zero(self):
        return 0 if self.characteristic else Fraction(0)

    @cached_property
    def one(self):
        return 1 if self.characteristic else Fraction(1)

    def coerce(self, value):
        """Canonical representative of an int, Fraction or numeric string."""
        p = self.characteristic
        if isinstance(value, str):
            value = Fraction(value.strip())
        if p:
            if isinstance(value, Fraction):
                if value.denominator == 1:
                    return value.numerator % p
                den = value.denominator % p
                if den == 0:
                    raise DivisionByZero(f"denominator {value.denominator} vanishes in F_{p}")
                return value.numerator * pow(den, -1, p) % p
            return int(value) % p
        return Fraction(value)

    def add(self, a, b):
        return (a + b) % self.characteristic if self.characteristic else a + b

    def sub(self, a, b):
        return (a - b) % self.characteristic if self.characteristic else a - b

    def mul(self, a, b):
        return (a * b) % self.characteristic if self.characteristic else a * b

    def neg(self, a):
        return (-a) % self.characteristic if self.characteristic else -a

    def inv(self, a):
        if not a:
            raise DivisionByZero("inverse of zero")
        p = self.characteristic
        return pow(a, -1, p) if p else 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, k: int):
        p = self.characteristic
        if k < 0:
            return self.power(self.inv(a), -k)
        return pow(a, k, p) if p else a**k

    def binomial(self, n: int, k: int):
        """Binomial coefficient reduced into the field (Lucas for F_p)."""
        if k < 0 or k > n:
            return self.zero
        p = self.characteristic
        if not p:
            return Fraction(comb(n, k))
        out = 1
        while n or k:
            ni, ki = n % p, k % p
            if ki > ni:
                return 0
            out = out * comb(ni, ki) % p
            n //= p
            k //= p
        return out

    def render(self, a) -> str:
        if self.characteristic:
            return str(a)
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"

    def sqrt_minus_one_element(self):
        """A square root of -1 in the prime field, or None."""
        p = self.characteristic
        if not _prime_field_has_sqrt_minus_one(p):
            return None
        return _sqrt_minus_one_mod(p)


def make_field(p: int, alg_closed: bool = False, sqrt_minus_one: bool | None = None) -> FieldSpec:
    """Build a :class:`FieldSpec` with its traits resolved.

    ``sqrt_minus_one=None`` means "compute it from the prime field" unless the
    field is declared algebraically closed, in which case it is present.
    """
    if not isinstance(p, int) or p < 0 or (p > 0 and not isprime(p)):
        raise InvalidCharacteristic(f"characteristic must be 0 or a prime, got {p!r}")
    prime_has = _prime_field_has_sqrt_minus_one(p)
    if alg_closed:
        if sqrt_minus_one is False:
            raise InconsistentTrait("an algebraically closed field contains sqrt(-1)")
        return FieldSpec(p, True, True, SqrtSource.CLOSURE)
    if sqrt_minus_one is None:
        return FieldSpec(p, False, prime_has, SqrtSource.COMPUTED)
    if prime_has and not sqrt_minus_one:
        raise InconsistentTrait(f"F_{p} already contains a square root of -1")
    if sqrt_minus_one == prime_has:
        return FieldSpec(p, False, prime_has, SqrtSource.COMPUTED)
    return FieldSpec(p, False, True, SqrtSource.DECLARED)


@dataclass(frozen=True)
class Coefficient:
    field: FieldSpec
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", self.field.coerce(self.value))

    def _check(self, other: Coefficient):
        if not isinstance(other, Coefficient):
            return Coefficient(self.field, other)
        if not self.field.same_arithmetic(other.field):
            raise FieldMismatch(f"{self.field.describe()} vs {other.field.describe()}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return Coefficient(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other):
        other = self._check(other)
        return Coefficient(self.field, self.field.sub(self.value, other.value))

    def __mul__(self, other):
        other = self._check(other)
        return Coefficient(self.field, self.field.mul(self.value, other.value))

    def __neg__(self):
        return Coefficient(self.field, self.field.neg(self.value))

    def __truediv__(self, other):
        other = self._check(other)
        return Coefficient(self.field, self.field.div(self.value, other.value))

    def __pow__(self, k: int):
        return Coefficient(self.field, self.field.power(self.value, k))

    def inv(self) -> Coefficient:
        return Coefficient(self.field, self.field.inv(self.value))

    def __bool__(self):
        return bool(self.value)

    def __str__(self):
        return self.field.render(self.value)


def coeff_arith(a: Coefficient, b: Coefficient | None, op: str) -> Coefficient:
    """Apply ``op`` in {add, mul, neg, inv}; unary ops act on ``b`` if given, else ``a``."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -(b if b is not None else a)
    if op == "inv":
        target = b if b is not None else a
        if b is not None and not a.field.same_arithmetic(b.field):
            raise FieldMismatch("mixed fields")
        return target.inv()
    raise ValueError(f"unknown operation {op!r}")
