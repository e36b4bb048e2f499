"""Exact arithmetic in cyclotomic fields Q(zeta_m)."""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Any, Iterable

from sympy import Poly, cyclotomic_poly, symbols, totient

_X = symbols("x")


@lru_cache(maxsize=256)
def _cyclotomic(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, lowest degree first."""
    coeffs = Poly(cyclotomic_poly(m, _X), _X).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


@lru_cache(maxsize=256)
def _phi(m: int) -> int:
    return int(totient(m))


def _reduce(m: int, exponents: dict[int, Fraction]) -> tuple[Fraction, ...]:
    """Reduce sum(c_k zeta_m^k) to the power basis 1, zeta, ..., zeta^(phi(m)-1)."""
    phi_m = _phi(m)
    poly = [Fraction(0)] * m
    for k, c in exponents.items():
        poly[k % m] += c
    modulus = _cyclotomic(m)
    # Phi_m is monic of degree phi(m)
    for top in range(m - 1, phi_m - 1, -1):
        c = poly[top]
        if c == 0:
            continue
        shift = top - phi_m
        for i, mc in enumerate(modulus):
            if mc:
                poly[shift + i] -= c * mc
    return tuple(poly[:phi_m])


class CycloValue:
    """
    An element of Q(zeta_m), stored by its coordinates in the power basis.

    Binary operations lift both operands to Q(zeta_lcm).
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable[Any]):
        self.order = order
        values = tuple(Fraction(c) for c in coeffs)
        if len(values) != _phi(order):
            values = _reduce(order, dict(enumerate(values)))
        self.coeffs = values

    # Constructors

    @classmethod
    def from_exponents(cls, order: int, exponents: dict[int, Any]) -> CycloValue:
        return cls(order, _reduce(order, {k: Fraction(c) for k, c in exponents.items()}))

    @classmethod
    def rational(cls, x: Any) -> CycloValue:
        return cls(1, (Fraction(x),))

    @classmethod
    def zeta(cls, order: int, k: int = 1) -> CycloValue:
        return cls.from_exponents(order, {k % order: 1})

    @classmethod
    def coerce(cls, x: Any) -> CycloValue:
        if isinstance(x, CycloValue):
            return x
        return cls.rational(x)

    # Embeddings

    def lift(self, order: int) -> CycloValue:
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"cannot lift from order {self.order} to {order}")
        step = order // self.order
        return CycloValue.from_exponents(order, {k * step: c for k, c in enumerate(self.coeffs) if c})

    def _common(self, other: Any) -> tuple[CycloValue, CycloValue]:
        other = CycloValue.coerce(other)
        m = self.order * other.order // gcd(self.order, other.order)
        return self.lift(m), other.lift(m)

    # Ring operations

    def __add__(self, other: Any) -> CycloValue:
        a, b = self._common(other)
        return CycloValue(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> CycloValue:
        return CycloValue(self.order, [-c for c in self.coeffs])

    def __sub__(self, other: Any) -> CycloValue:
        return self + (-CycloValue.coerce(other))

    def __rsub__(self, other: Any) -> CycloValue:
        return CycloValue.coerce(other) - self

    def __mul__(self, other: Any) -> CycloValue:
        if not isinstance(other, CycloValue):
            scalar = Fraction(other)
            return CycloValue(self.order, [c * scalar for c in self.coeffs])
        a, b = self._common(other)
        product: dict[int, Fraction] = {}
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    product[i + j] = product.get(i + j, Fraction(0)) + x * y
        return CycloValue.from_exponents(a.order, product)

    __rmul__ = __mul__

    def galois(self, a: int) -> CycloValue:
        """Image under zeta -> zeta^a, gcd(a, m) = 1."""
        return CycloValue.from_exponents(
            self.order, {(k * a) % self.order: c for k, c in enumerate(self.coeffs) if c}
        )

    def conjugate(self) -> CycloValue:
        return self.galois(-1)

    def norm(self) -> Fraction:
        """Absolute norm to Q."""
        result: CycloValue = CycloValue.rational(1)
        for a in range(1, self.order + 1):
            if gcd(a, self.order) == 1:
                result = result * self.galois(a)
        return result.as_fraction()

    def inverse(self) -> CycloValue:
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero cyclotomic value")
        if self.is_rational():
            return CycloValue.rational(1 / self.coeffs[0])
        others: CycloValue = CycloValue.rational(1)
        for a in range(2, self.order + 1):
            if gcd(a, self.order) == 1:
                others = others * self.galois(a)
        total = others * self
        return others * (1 / total.as_fraction())

    def __truediv__(self, other: Any) -> CycloValue:
        if not isinstance(other, CycloValue):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other: Any) -> CycloValue:
        return CycloValue.coerce(other) * self.inverse()

    def __pow__(self, e: int) -> CycloValue:
        base = self if e >= 0 else self.inverse()
        result: CycloValue = CycloValue.rational(1)
        for _ in range(abs(e)):
            result = result * base
        return result

    # Predicates and views

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def to_complex(self) -> complex:
        return sum(
            (float(c) * cmath.exp(2j * cmath.pi * k / self.order) for k, c in enumerate(self.coeffs) if c),
            0j,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (CycloValue, int, Fraction)):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        if self.is_rational():
            return str(self.coeffs[0])
        parts: list[str] = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                body = f"zeta{self.order}^{k}" if mag == 1 else f"{mag}*zeta{self.order}^{k}"
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self) -> str:
        return f"CycloValue({self})"


ZERO = CycloValue.rational(0)
ONE = CycloValue.rational(1)
I = CycloValue.zeta(4)


def gauss_sum(p: int) -> CycloValue:
    """Quadratic Gauss sum sum_{a mod p} (a/p) zeta_p^a, p odd."""
    squares = {(a * a) % p for a in range(1, p)}
    return CycloValue.from_exponents(p, {a: (1 if a in squares else -1) for a in range(1, p)})


@lru_cache(maxsize=64)
def sqrt_prime(p: int) -> CycloValue:
    """The positive square root of a prime as a cyclotomic integer."""
    if p == 2:
        return CycloValue.zeta(8, 1) - CycloValue.zeta(8, 3)
    g = gauss_sum(p)
    if p % 4 == 1:
        return g
    return -(I * g)


def q_power(p: int, f: int, e2: int) -> CycloValue:
    """q^(e2/2) for q = p^f, exact."""
    total = f * e2
    whole = total // 2
    value = CycloValue.rational(Fraction(p) ** whole)
    if total % 2:
        value = value * sqrt_prime(p)
    return value
