"""Quadratic extensions E = F[X]/(X^2 - tX + d), the character eps_{E/F} and lambda(E/F, psi)."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any

from src.sl2_endoscopy.arith.cyclo import I, ONE, CycloValue, q_power
from src.sl2_endoscopy.arith.local_field import LocalElem, LocalField
from src.sl2_endoscopy.arith.parsing import split_key_values
from src.sl2_endoscopy.arith.squares import artin_schreier_reduce, is_square, nonsquare_unit
from src.sl2_endoscopy.config import settings
from src.sl2_endoscopy.utils.exceptions import (
    ExtensionError,
    KappaError,
    OracleSizeError,
    ParseError,
    PrecisionError,
)
from src.sl2_endoscopy.utils.logger import get_logger

logger = get_logger(__name__)


class ExtKind(str, enum.Enum):
    """Classification of a separable quadratic algebra over F."""

    SPLIT = "split"
    UNRAMIFIED = "unramified"
    RAMIFIED = "ramified"


def _unit_mod8(x: LocalElem) -> int:
    if x.relprec < 3:
        raise PrecisionError("hilbert_symbol", "2-adic unit needed modulo 8")
    return x.unit % 8


def hilbert_symbol(x: LocalElem, y: LocalElem) -> int:
    """
    The Hilbert symbol (x, y)_F in characteristic 0 or odd residue characteristic.

    Raises:
        ValueError: In characteristic 2
    """
    F = x.field
    if F.characteristic == 2:
        raise ValueError("Hilbert symbol closed form is unavailable in characteristic 2")
    if x.is_zero() or y.is_zero():
        raise PrecisionError("hilbert_symbol", "arguments must be nonzero")
    alpha, beta = x.val, y.val
    if F.p != 2:
        rf = F.residue
        sign = -1 if (alpha * beta * (F.q - 1) // 2) % 2 else 1
        return sign * rf.chi(x.leading_digit) ** (beta % 2) * rf.chi(y.leading_digit) ** (alpha % 2)
    u, w = _unit_mod8(x), _unit_mod8(y)

    def eps(a: int) -> int:
        return ((a - 1) // 2) % 2

    def omega(a: int) -> int:
        return ((a * a - 1) // 8) % 2

    exponent = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u)
    return -1 if exponent % 2 else 1


def _as_kind(c: LocalElem) -> ExtKind:
    """Kind of z^2 + z = c in characteristic 2."""
    reduced, _ = artin_schreier_reduce(c)
    if reduced.is_zero() or reduced.val > 0:
        return ExtKind.SPLIT
    if reduced.val < 0:
        return ExtKind.RAMIFIED
    rf = c.field.residue
    return ExtKind.SPLIT if rf.trace(reduced.residue()) == 0 else ExtKind.UNRAMIFIED


class QuadExt:
    """
    The quadratic algebra E = F[tau], tau^2 - t tau + d = 0.

    The presentation (t, d) must be integral. ``standard_basis`` records
    whether {1, tau} is an O-basis of O_E with tau a uniformizer (ramified) or
    with irreducible residue polynomial (unramified).
    """

    def __init__(self, base: LocalField, t: Any, d: Any, label: str | None = None):
        """
        Build and classify the extension.

        Args:
            base: Base field F
            t: Trace of tau
            d: Norm of tau
            label: Optional name used in reports

        Raises:
            ExtensionError: For non-integral, inseparable or degenerate presentations
        """
        self.base = base
        self.t = base.element(t)
        self.d = base.element(d)
        if not (self.t.is_integral() and self.d.is_integral()):
            raise ExtensionError("non-integral presentation; rescale tau so that t and d lie in O")
        if self.d.is_zero():
            raise ExtensionError("d = 0 makes X^2 - tX + d reducible with root 0")

        self.disc: LocalElem | None = None
        self.as_constant: LocalElem | None = None
        if base.characteristic == 2:
            if self.t.is_zero():
                raise ExtensionError("t = 0 gives an inseparable polynomial in characteristic 2")
            self.as_constant = self.d / (self.t * self.t)
            self.kind = _as_kind(self.as_constant)
        else:
            self.disc = self.t * self.t - 4 * self.d
            if self.disc.is_zero():
                raise ExtensionError("discriminant vanishes: X^2 - tX + d has a double root")
            self.kind = self._classify_disc(self.disc)

        self.label = label or f"ext:t={self.t_text},d={self.d_text}"
        self._norm_level: int | None = None
        self._norm_image: set[tuple[int, ...]] | None = None
        logger.info(
            f"Classified {self.label} over {base.name} as {self.kind.value}",
            extra={"field": base.spec, "kind": self.kind.value},
        )

    def _classify_disc(self, disc: LocalElem) -> ExtKind:
        F = self.base
        if disc.val % 2:
            return ExtKind.RAMIFIED
        if F.p != 2:
            return ExtKind.SPLIT if F.residue.is_square(disc.leading_digit) else ExtKind.UNRAMIFIED
        return {1: ExtKind.SPLIT, 5: ExtKind.UNRAMIFIED}.get(_unit_mod8(disc), ExtKind.RAMIFIED)

    # Presentation

    @property
    def t_text(self) -> str:
        return _element_text(self.t)

    @property
    def d_text(self) -> str:
        return _element_text(self.d)

    @property
    def q(self) -> int:
        return self.base.q

    @property
    def is_field(self) -> bool:
        return self.kind != ExtKind.SPLIT

    @property
    def ramification_index(self) -> int:
        return 2 if self.kind == ExtKind.RAMIFIED else 1

    @property
    def standard_basis(self) -> bool:
        if self.kind == ExtKind.RAMIFIED:
            return self.d.val == 1 and (self.t.is_zero() or self.t.val >= 1)
        if self.kind == ExtKind.UNRAMIFIED:
            rf = self.base.residue
            t0, d0 = self.t.residue(), self.d.residue()
            return all(rf.add(rf.sub(rf.mul(z, z), rf.mul(t0, z)), d0) != 0 for z in rf.elements)
        return True

    def require_standard_basis(self, operation: str) -> None:
        if not self.standard_basis:
            raise ExtensionError(f"{operation} needs a presentation with O_E = O + O tau")

    def element(self, a: Any, b: Any = 0) -> ExtElem:
        return ExtElem(self, self.base.element(a), self.base.element(b))

    @property
    def tau(self) -> ExtElem:
        return self.element(0, 1)

    # Class field character

    def epsilon(self, x: Any) -> int:
        """eps_{E/F}(x): +1 iff x is a norm from E."""
        x = self.base.element(x)
        if x.is_exact_zero():
            raise ValueError("eps is defined on F^x only")
        if x.is_zero():
            raise PrecisionError("epsilon", "argument is an inexact zero")
        if self.kind == ExtKind.SPLIT:
            return 1
        if self.base.characteristic != 2:
            return hilbert_symbol(x, self.disc)
        if self.kind == ExtKind.UNRAMIFIED:
            return -1 if x.val % 2 else 1
        return self._epsilon_wild(x)

    def _epsilon_wild(self, x: LocalElem) -> int:
        if self.d.val != 1:
            raise ExtensionError("eps in ramified characteristic 2 needs an Eisenstein presentation")
        unit = x / self.d**x.val
        level = self.norm_level()
        key = tuple(unit.digits(level))
        return 1 if key in self._norm_image else -1

    def norm_image(self, k: int) -> set[tuple[int, ...]]:
        """Digits modulo pi^k of N(O_E^x)."""
        F = self.base
        if F.q ** (2 * k) > settings.ORACLE_SIZE_GUARD:
            raise OracleSizeError("norm_image", F.q ** (2 * k), settings.ORACLE_SIZE_GUARD)
        t_raw = F.raw_from_digits(self.t.digits(k))
        d_raw = F.raw_from_digits(self.d.digits(k))
        residues = list(F.residue.elements)
        image: set[tuple[int, ...]] = set()
        for c_digits in product(residues, repeat=k):
            c = F.raw_from_digits(c_digits)
            for e_digits in product(residues, repeat=k):
                e = F.raw_from_digits(e_digits)
                if self.kind != ExtKind.RAMIFIED and c_digits[0] == 0 and e_digits[0] == 0:
                    continue
                if self.kind == ExtKind.RAMIFIED and c_digits[0] == 0:
                    continue
                n = F.raw_add(
                    F.raw_add(F.raw_mul(c, c, k), F.raw_mul(F.raw_mul(c, e, k), t_raw, k), k),
                    F.raw_mul(F.raw_mul(e, e, k), d_raw, k),
                    k,
                )
                image.add(tuple(F.raw_digits(n, k)))
        return image

    def norm_level(self) -> int:
        """Smallest level at which membership in the norm group is decided, cached per extension."""
        if self._norm_level is not None:
            return self._norm_level
        F = self.base
        # units are all norms unless E/F is ramified
        target = 2 if self.kind == ExtKind.RAMIFIED else 1
        previous: tuple[int, set] | None = None
        for k in range(1, settings.EPSILON_MAX_LEVEL + 1):
            image = self.norm_image(k)
            index = Fraction((F.q - 1) * F.q ** (k - 1), len(image))
            if index == target and previous is not None and previous[0] == target:
                self._norm_level, self._norm_image = k - 1, previous[1]
                logger.info(
                    f"Norm group of {self.label} stabilized at level {k - 1}",
                    extra={"field": F.spec, "level": k - 1},
                )
                return k - 1
            previous = (index, image)
        raise PrecisionError("norm_level", f"norm index did not stabilize by level {settings.EPSILON_MAX_LEVEL}")

    # Weil constant

    @property
    def lambda_canonical(self) -> bool:
        return not (self.kind == ExtKind.RAMIFIED and self.base.p == 2)

    def __repr__(self) -> str:
        return f"QuadExt({self.base.name}, {self.label}, {self.kind.value})"


def _element_text(x: LocalElem) -> str:
    text = str(x)
    return text.rsplit(" + O(", 1)[0] if " + O(" in text else text


class ExtElem:
    """The element a + b tau of E."""

    __slots__ = ("ext", "a", "b")

    def __init__(self, ext: QuadExt, a: LocalElem, b: LocalElem):
        self.ext = ext
        self.a = a
        self.b = b

    def _coerce(self, other: Any) -> ExtElem:
        if isinstance(other, ExtElem):
            return other
        return self.ext.element(other)

    def __add__(self, other: Any) -> ExtElem:
        y = self._coerce(other)
        return ExtElem(self.ext, self.a + y.a, self.b + y.b)

    __radd__ = __add__

    def __neg__(self) -> ExtElem:
        return ExtElem(self.ext, -self.a, -self.b)

    def __sub__(self, other: Any) -> ExtElem:
        return self + (-self._coerce(other))

    def __mul__(self, other: Any) -> ExtElem:
        y = self._coerce(other)
        E = self.ext
        bd = self.b * y.b
        return ExtElem(E, self.a * y.a - bd * E.d, self.a * y.b + self.b * y.a + bd * E.t)

    __rmul__ = __mul__

    def conjugate(self) -> ExtElem:
        return ExtElem(self.ext, self.a + self.b * self.ext.t, -self.b)

    def norm(self) -> LocalElem:
        E = self.ext
        return self.a * self.a + self.a * self.b * E.t + self.b * self.b * E.d

    def trace(self) -> LocalElem:
        return 2 * self.a + self.b * self.ext.t

    def inverse(self) -> ExtElem:
        n = self.norm().inverse()
        c = self.conjugate()
        return ExtElem(self.ext, c.a * n, c.b * n)

    def __truediv__(self, other: Any) -> ExtElem:
        return self * self._coerce(other).inverse()

    def __pow__(self, e: int) -> ExtElem:
        base = self if e >= 0 else self.inverse()
        result = self.ext.element(1)
        for _ in range(abs(e)):
            result = result * base
        return result

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (ExtElem, int, Fraction, LocalElem)):
            return NotImplemented
        diff = self - self._coerce(other)
        return diff.is_zero()

    __hash__ = None  # type: ignore[assignment]

    def key(self, k: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Digits of (a, b) modulo pi^k, for integral elements."""
        return tuple(self.a.digits(k)), tuple(self.b.digits(k))

    def __str__(self) -> str:
        return f"({_element_text(self.a)}) + ({_element_text(self.b)})*tau"

    def __repr__(self) -> str:
        return f"ExtElem({self})"


@dataclass(frozen=True)
class KappaChar:
    """A quadratic character of F^x: trivial (carrier None) or eps_{E/F}."""

    carrier: QuadExt | None = None

    @property
    def is_trivial(self) -> bool:
        return self.carrier is None or self.carrier.kind == ExtKind.SPLIT

    def __call__(self, x: Any) -> int:
        if self.carrier is None:
            return 1
        return self.carrier.epsilon(x)

    def matches(self, E: QuadExt) -> bool:
        """True iff this character is trivial or equals eps_{E/F}."""
        if self.is_trivial:
            return True
        return same_character(self.carrier, E)

    def require_allowed(self, E: QuadExt) -> None:
        if self.carrier is not None and self.carrier.base != E.base:
            raise KappaError("carrier lives over a different base field")

    @property
    def label(self) -> str:
        return "1" if self.carrier is None else f"eps[{self.carrier.label}]"


def same_character(E1: QuadExt, E2: QuadExt) -> bool:
    """Whether eps_{E1/F} = eps_{E2/F}."""
    if E1.kind == ExtKind.SPLIT or E2.kind == ExtKind.SPLIT:
        return E1.kind == E2.kind
    if E1.base.characteristic == 2:
        return _as_kind(E1.as_constant + E2.as_constant) == ExtKind.SPLIT
    return is_square(E1.disc * E2.disc)


# Canonical presentations

_Q2_RAMIFIED = [(0, -2), (0, 2), (0, -6), (0, 6), (2, 2), (2, 6)]


def ramified_variant_count(F: LocalField) -> int:
    if F.p != 2:
        return 2
    if F.characteristic == 0:
        return len(_Q2_RAMIFIED)
    return 1


def build_ext(F: LocalField, t: Any, d: Any, label: str | None = None) -> QuadExt:
    """QuadExt for X^2 - tX + d, classified on construction."""
    return QuadExt(F, t, d, label=label)


def canonical_ext(F: LocalField, kind: ExtKind | str, variant: int = 0) -> QuadExt:
    """Standard integral presentation of each kind of extension."""
    kind = ExtKind(kind)
    pi = F.uniformizer()
    if kind == ExtKind.SPLIT:
        return QuadExt(F, 1 + pi, pi, label="split")
    if kind == ExtKind.UNRAMIFIED:
        if F.p != 2:
            return QuadExt(F, 0, -nonsquare_unit(F), label="unramified")
        if F.characteristic == 0:
            return QuadExt(F, 1, 1, label="unramified")
        rf = F.residue
        c0 = next(c for c in rf.elements if rf.trace(c) == 1)
        return QuadExt(F, 1, F.residue_lift(c0), label="unramified")
    if variant >= ramified_variant_count(F):
        raise ExtensionError(f"{F.name} has {ramified_variant_count(F)} canonical ramified presentations")
    label = "ramified" if variant == 0 else f"ramified{variant + 1}"
    if F.p != 2:
        d = -pi if variant == 0 else -(nonsquare_unit(F) * pi)
        return QuadExt(F, 0, d, label=label)
    if F.characteristic == 0:
        t, d = _Q2_RAMIFIED[variant]
        return QuadExt(F, t, d, label=label)
    return QuadExt(F, pi, pi, label=label)


def parse_ext_spec(F: LocalField, text: str) -> QuadExt:
    """
    Parse 'split', 'unramified', 'ramified', 'ramifiedN' or 'ext:t=<elem>,d=<elem>'.

    Raises:
        ParseError: With the offset of the offending item
    """
    stripped = text.strip()
    if stripped in ("split", "unramified", "ramified"):
        return canonical_ext(F, stripped)
    if stripped.startswith("ramified") and stripped[len("ramified"):].isdigit():
        variant = int(stripped[len("ramified"):]) - 1
        try:
            return canonical_ext(F, ExtKind.RAMIFIED, variant)
        except ExtensionError as e:
            raise ParseError(text, len("ramified"), str(e), original_error=e) from e
    if not stripped.startswith("ext:"):
        raise ParseError(text, 0, "expected split|unramified|ramified[N]|ext:t=..,d=..")
    items = {item.key: item for item in split_key_values(stripped, 4)}
    for key in ("t", "d"):
        if key not in items:
            raise ParseError(text, len(stripped), f"missing {key}=")
    values = {}
    for key in ("t", "d"):
        item = items[key]
        try:
            values[key] = F.element(item.value)
        except ParseError as e:
            raise ParseError(text, item.position + e.position, str(e).splitlines()[0], original_error=e) from e
    try:
        return QuadExt(F, values["t"], values["d"])
    except ExtensionError as e:
        raise ParseError(text, 0, str(e), original_error=e) from e


def lambda_const(E: QuadExt, conductor: int = 0) -> CycloValue:
    """
    lambda(E/F, psi) for psi of conductor pi^conductor (0 is the standard character).

    A fourth root of unity with lambda^2 = eps(-1).
    """
    F = E.base
    if E.kind == ExtKind.SPLIT:
        value = ONE
    elif E.kind == ExtKind.UNRAMIFIED:
        value = ONE
    elif F.p != 2:
        rf = F.residue
        g = CycloValue.from_exponents(F.p, {})
        for u in rf.units:
            g = g + CycloValue.zeta(F.p, rf.trace(u)) * rf.chi(u)
        # eta(pi) G / sqrt(q), the Weil index of the norm form
        value = g * q_power(F.p, F.f, 1) / F.q * E.epsilon(F.uniformizer())
    else:
        sign = settings.LAMBDA_WILD_SIGN
        value = CycloValue.rational(sign) if E.epsilon(-1) == 1 else I * sign
        logger.warning(
            f"lambda for {E.label} over {F.name} uses the configured sign {sign}; the value is not canonical",
            extra={"field": F.spec, "lambda_sign": sign},
        )
    if conductor % 2 and E.epsilon(F.uniformizer()) == -1:
        value = -value
    return value
