"""Non-archimedean local fields at finite precision and their elements."""

from __future__ import annotations

import random
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Sequence

from src.sl2_endoscopy.arith.residue_field import ResidueField, get_residue_field
from src.sl2_endoscopy.utils.exceptions import (
    DivisionByZeroError,
    FieldConstructionError,
    NonIntegralError,
    PrecisionError,
)

Raw = Any


class LocalField(ABC):
    """
    A local field F with uniformizer pi and a working precision N.

    Subclasses implement arithmetic on raw windows: a raw value of size n is an
    element of O/pi^n.
    """

    kind: str

    def __init__(self, residue: ResidueField, prec: int):
        if prec < 1:
            raise FieldConstructionError(f"precision must be positive, got {prec}")
        self.residue = residue
        self.p = residue.p
        self.f = residue.f
        self.q = residue.q
        self.prec = prec

    @property
    @abstractmethod
    def characteristic(self) -> int:
        """0 for p-adic fields, p for Laurent series fields."""

    @property
    @abstractmethod
    def spec(self) -> str:
        """Spec string that parses back to this field."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Display name such as Q_3 or F_4((t))."""

    @property
    @abstractmethod
    def uniformizer_symbol(self) -> str:
        ...

    # Raw window arithmetic

    @abstractmethod
    def raw_reduce(self, u: Raw, n: int) -> Raw: ...

    @abstractmethod
    def raw_add(self, u: Raw, w: Raw, n: int) -> Raw: ...

    @abstractmethod
    def raw_neg(self, u: Raw, n: int) -> Raw: ...

    @abstractmethod
    def raw_mul(self, u: Raw, w: Raw, n: int) -> Raw: ...

    @abstractmethod
    def raw_inv(self, u: Raw, n: int) -> Raw: ...

    @abstractmethod
    def raw_val(self, u: Raw, n: int) -> int | None:
        """Index of the first nonzero digit, or None if u is 0 mod pi^n."""

    @abstractmethod
    def raw_shift(self, u: Raw, k: int, n: int) -> Raw:
        """Multiply by pi^k (k >= 0) and truncate to n digits."""

    @abstractmethod
    def raw_unshift(self, u: Raw, k: int, n: int) -> Raw:
        """Divide by pi^k, keeping n - k digits."""

    @abstractmethod
    def raw_digits(self, u: Raw, n: int) -> list[int]: ...

    @abstractmethod
    def raw_from_digits(self, digits: Sequence[int]) -> Raw: ...

    @abstractmethod
    def raw_from_int(self, k: int, n: int) -> Raw: ...

    def raw_sub(self, u: Raw, w: Raw, n: int) -> Raw:
        return self.raw_add(u, self.raw_neg(w, n), n)

    # Element constructors

    def zero(self, absprec: int | None = None) -> LocalElem:
        return LocalElem(self, None, None, 0, absprec)

    def one(self) -> LocalElem:
        return LocalElem(self, 0, self.raw_from_int(1, self.prec), self.prec)

    def uniformizer(self) -> LocalElem:
        return LocalElem(self, 1, self.raw_from_int(1, self.prec), self.prec)

    def residue_lift(self, d: int) -> LocalElem:
        """Lift of a residue element (as a single digit)."""
        if d == 0:
            return self.zero()
        return LocalElem(self, 0, self.raw_from_digits([d] + [0] * (self.prec - 1)), self.prec)

    def from_window(self, v: int, raw: Raw, n: int) -> LocalElem:
        """Element pi^v * raw where raw is known modulo pi^n."""
        raw = self.raw_reduce(raw, n)
        w = self.raw_val(raw, n)
        if w is None:
            return self.zero(v + n)
        return LocalElem(self, v + w, self.raw_unshift(raw, w, n), n - w)

    def from_digits(self, digits: Sequence[int], val: int = 0, relprec: int | None = None) -> LocalElem:
        """Element pi^val * sum(d_i pi^i), known to ``relprec`` digits (default: exact to N)."""
        n = self.prec if relprec is None else relprec
        padded = list(digits[:n]) + [0] * max(0, n - len(digits))
        return self.from_window(val, self.raw_from_digits(padded), n)

    @abstractmethod
    def from_fraction(self, x: Fraction) -> LocalElem: ...

    def element(self, value: Any) -> LocalElem:
        """Coerce an int, Fraction, spec string or LocalElem into this field."""
        if isinstance(value, LocalElem):
            if value.field != self:
                raise ValueError(f"element of {value.field.name} used in {self.name}")
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a field element")
        if isinstance(value, (int, Fraction)):
            return self.from_fraction(Fraction(value))
        if isinstance(value, str):
            from src.sl2_endoscopy.arith.parsing import parse_element

            return parse_element(self, value)
        raise TypeError(f"cannot convert {type(value).__name__} to an element of {self.name}")

    def random_integral(self, rng: random.Random, unit: bool = False) -> LocalElem:
        """Seeded random element of O (of O^x when ``unit``), exact to N digits."""
        digits = [rng.randrange(self.q) for _ in range(self.prec)]
        if unit and digits[0] == 0:
            digits[0] = rng.randrange(1, self.q)
        return self.from_digits(digits)

    def key(self) -> tuple:
        return (self.kind, self.p, self.f, self.residue.modulus, self.prec)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LocalField) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.spec})"


class PadicField(LocalField):
    """Q_p with units stored as integers modulo p^n."""

    kind = "Qp"

    def __init__(self, p: int, prec: int):
        super().__init__(get_residue_field(p, 1), prec)

    @property
    def characteristic(self) -> int:
        return 0

    @property
    def spec(self) -> str:
        return f"Qp:p={self.p},prec={self.prec}"

    @property
    def name(self) -> str:
        return f"Q_{self.p}"

    @property
    def uniformizer_symbol(self) -> str:
        return str(self.p)

    def raw_reduce(self, u: int, n: int) -> int:
        assert n >= 0, f"negative window {n}"
        return u % self.p**n

    def raw_add(self, u: int, w: int, n: int) -> int:
        return (u + w) % self.p**n

    def raw_neg(self, u: int, n: int) -> int:
        return (-u) % self.p**n

    def raw_mul(self, u: int, w: int, n: int) -> int:
        return (u * w) % self.p**n

    def raw_inv(self, u: int, n: int) -> int:
        return pow(u, -1, self.p**n)

    def raw_val(self, u: int, n: int) -> int | None:
        u %= self.p**n
        if u == 0:
            return None
        k = 0
        while u % self.p == 0:
            u //= self.p
            k += 1
        return k

    def raw_shift(self, u: int, k: int, n: int) -> int:
        return (u * self.p**k) % self.p**n

    def raw_unshift(self, u: int, k: int, n: int) -> int:
        return (u % self.p**n) // self.p**k

    def raw_digits(self, u: int, n: int) -> list[int]:
        u %= self.p**n
        digits = []
        for _ in range(n):
            digits.append(u % self.p)
            u //= self.p
        return digits

    def raw_from_digits(self, digits: Sequence[int]) -> int:
        value = 0
        for d in reversed(digits):
            value = value * self.p + d
        return value

    def raw_from_int(self, k: int, n: int) -> int:
        return k % self.p**n

    def from_fraction(self, x: Fraction) -> LocalElem:
        if x == 0:
            return self.zero()
        num, den = x.numerator, x.denominator
        v = 0
        while num % self.p == 0:
            num //= self.p
            v += 1
        while den % self.p == 0:
            den //= self.p
            v -= 1
        modulus = self.p**self.prec
        return LocalElem(self, v, (num * pow(den, -1, modulus)) % modulus, self.prec)


class LaurentField(LocalField):
    """F_q((t)) with units stored as tuples of residue digits."""

    kind = "Fq"

    def __init__(self, residue: ResidueField, prec: int):
        super().__init__(residue, prec)

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def spec(self) -> str:
        base = f"Fq:p={self.p},f={self.f},prec={self.prec}"
        if self.f > 1:
            base += f",modulus={self.residue.modulus_text}"
        return base

    @property
    def name(self) -> str:
        return f"F_{self.q}((t))"

    @property
    def uniformizer_symbol(self) -> str:
        return "t"

    def raw_reduce(self, u: tuple[int, ...], n: int) -> tuple[int, ...]:
        assert n >= 0, f"negative window {n}"
        if len(u) >= n:
            return tuple(u[:n])
        return tuple(u) + (0,) * (n - len(u))

    def raw_add(self, u, w, n):
        u, w = self.raw_reduce(u, n), self.raw_reduce(w, n)
        add = self.residue.add
        return tuple(add(a, b) for a, b in zip(u, w))

    def raw_neg(self, u, n):
        neg = self.residue.neg
        return tuple(neg(a) for a in self.raw_reduce(u, n))

    def raw_mul(self, u, w, n):
        u, w = self.raw_reduce(u, n), self.raw_reduce(w, n)
        add, mul = self.residue.add, self.residue.mul
        out = [0] * n
        for i, a in enumerate(u):
            if a == 0:
                continue
            for j in range(n - i):
                b = w[j]
                if b:
                    out[i + j] = add(out[i + j], mul(a, b))
        return tuple(out)

    def raw_inv(self, u, n):
        u = self.raw_reduce(u, n)
        rf = self.residue
        inv0 = rf.inv(u[0])
        out = [0] * n
        out[0] = inv0
        for k in range(1, n):
            acc = 0
            for j in range(1, k + 1):
                if u[j] and out[k - j]:
                    acc = rf.add(acc, rf.mul(u[j], out[k - j]))
            out[k] = rf.neg(rf.mul(inv0, acc))
        return tuple(out)

    def raw_val(self, u, n):
        for i, d in enumerate(self.raw_reduce(u, n)):
            if d:
                return i
        return None

    def raw_shift(self, u, k, n):
        return self.raw_reduce((0,) * k + tuple(u), n)

    def raw_unshift(self, u, k, n):
        return self.raw_reduce(u, n)[k:]

    def raw_digits(self, u, n):
        return list(self.raw_reduce(u, n))

    def raw_from_digits(self, digits):
        return tuple(digits)

    def raw_from_int(self, k, n):
        return self.raw_reduce((k % self.p,), n)

    def from_fraction(self, x: Fraction) -> LocalElem:
        if x.denominator % self.p == 0:
            raise ValueError(f"{x} has no image in a field of characteristic {self.p}")
        c = (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return self.residue_lift(c)

    def from_terms(self, terms: dict[int, int]) -> LocalElem:
        """Element sum(c_e t^e) from residue coefficients, exact to N digits."""
        support = [e for e, c in terms.items() if c]
        if not support:
            return self.zero()
        v = min(support)
        return self.from_digits([terms.get(v + i, 0) for i in range(self.prec)], val=v)


class LocalElem:
    """
    An element pi^val * unit of a local field, with the unit known modulo
    pi^relprec. Zero carries an absolute precision (None for an exact zero).

    Multiplication and inversion keep the smaller relative precision; addition
    keeps the smaller absolute precision and may lose leading digits to
    cancellation.
    """

    __slots__ = ("field", "val", "unit", "relprec", "zero_absprec")

    def __init__(
        self,
        field: LocalField,
        val: int | None,
        unit: Raw,
        relprec: int,
        zero_absprec: int | None = None,
    ):
        self.field = field
        self.val = val
        self.unit = unit
        self.relprec = relprec
        self.zero_absprec = zero_absprec

    # Predicates

    def is_zero(self) -> bool:
        return self.val is None

    def is_exact_zero(self) -> bool:
        return self.val is None and self.zero_absprec is None

    @property
    def absprec(self) -> int | None:
        if self.val is None:
            return self.zero_absprec
        return self.val + self.relprec

    def is_integral(self) -> bool:
        if self.val is None:
            return True
        return self.val >= 0

    def is_unit(self) -> bool:
        return self.val == 0

    @property
    def leading_digit(self) -> int:
        if self.val is None:
            raise PrecisionError("leading_digit", "zero has no leading digit")
        return self.field.raw_digits(self.unit, 1)[0]

    def unit_digits(self, n: int | None = None) -> list[int]:
        n = self.relprec if n is None else n
        if n > self.relprec:
            raise PrecisionError("unit_digits", f"{n} digits requested, {self.relprec} known")
        return self.field.raw_digits(self.unit, n)

    def digits(self, k: int) -> list[int]:
        """The first k pi-adic digits of an integral element (its image in O/pi^k)."""
        if self.val is None:
            if self.zero_absprec is not None and self.zero_absprec < k:
                raise PrecisionError("digits", f"zero known only modulo pi^{self.zero_absprec}")
            return [0] * k
        if self.val < 0:
            raise NonIntegralError(self.val)
        if self.val >= k:
            return [0] * k
        if self.absprec < k:
            raise PrecisionError("digits", f"{k} digits requested, element known modulo pi^{self.absprec}")
        return [0] * self.val + self.field.raw_digits(self.unit, k - self.val)

    def residue(self) -> int:
        """Image in the residue field."""
        return self.digits(1)[0]

    def unit_part(self) -> LocalElem:
        if self.val is None:
            raise PrecisionError("unit_part", "zero has no unit part")
        return LocalElem(self.field, 0, self.unit, self.relprec)

    def shift(self, k: int) -> LocalElem:
        """Multiply by pi^k."""
        if self.val is None:
            absprec = None if self.zero_absprec is None else self.zero_absprec + k
            return self.field.zero(absprec)
        return LocalElem(self.field, self.val + k, self.unit, self.relprec)

    def truncate(self, relprec: int) -> LocalElem:
        if self.val is None or relprec >= self.relprec:
            return self
        return LocalElem(self.field, self.val, self.field.raw_reduce(self.unit, relprec), relprec)

    # Arithmetic

    def _coerce(self, other: Any) -> LocalElem:
        if isinstance(other, LocalElem):
            if other.field != self.field:
                raise ValueError(f"mixing elements of {self.field.name} and {other.field.name}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.field.from_fraction(Fraction(other))
        return NotImplemented

    def __add__(self, other: Any) -> LocalElem:
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        x = self
        if x.is_exact_zero():
            return y
        if y.is_exact_zero():
            return x
        a1, a2 = x.absprec, y.absprec
        A = min(a1, a2)
        if x.val is None and y.val is None:
            return x.field.zero(A)
        if x.val is None:
            return y.truncate(A - y.val) if y.val < A else x.field.zero(A)
        if y.val is None:
            return x.truncate(A - x.val) if x.val < A else x.field.zero(A)
        F = x.field
        v = min(x.val, y.val)
        n = A - v
        return F.from_window(v, F.raw_add(x._window(v, n), y._window(v, n), n), n)

    def _window(self, v: int, n: int) -> Raw:
        """The digits of self in positions v .. v+n-1, as a raw unit of length n."""
        F = self.field
        gap = self.val - v
        if gap >= n:
            return F.raw_from_int(0, n)
        return F.raw_shift(F.raw_reduce(self.unit, n - gap), gap, n)

    __radd__ = __add__

    def __neg__(self) -> LocalElem:
        if self.val is None:
            return self
        return LocalElem(self.field, self.val, self.field.raw_neg(self.unit, self.relprec), self.relprec)

    def __sub__(self, other: Any) -> LocalElem:
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return self + (-y)

    def __rsub__(self, other: Any) -> LocalElem:
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return y + (-self)

    def __mul__(self, other: Any) -> LocalElem:
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        x = self
        F = x.field
        if x.is_exact_zero() or y.is_exact_zero():
            return F.zero()
        if x.val is None and y.val is None:
            return F.zero(x.zero_absprec + y.zero_absprec)
        if x.val is None:
            return F.zero(x.zero_absprec + y.val)
        if y.val is None:
            return F.zero(y.zero_absprec + x.val)
        r = min(x.relprec, y.relprec)
        return LocalElem(F, x.val + y.val, F.raw_mul(x.unit, y.unit, r), r)

    __rmul__ = __mul__

    def inverse(self) -> LocalElem:
        if self.is_exact_zero():
            raise DivisionByZeroError("inverse")
        if self.val is None:
            raise PrecisionError("inverse", f"operand is zero modulo pi^{self.zero_absprec}")
        return LocalElem(self.field, -self.val, self.field.raw_inv(self.unit, self.relprec), self.relprec)

    def __truediv__(self, other: Any) -> LocalElem:
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return self * y.inverse()

    def __rtruediv__(self, other: Any) -> LocalElem:
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        return y * self.inverse()

    def __pow__(self, e: int) -> LocalElem:
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = self.field.one()
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        y = self._coerce(other)
        if y is NotImplemented:
            return NotImplemented
        diff = self - y
        if not diff.is_zero():
            return False
        if diff.zero_absprec is not None:
            scale = min((e.val for e in (self, y) if e.val is not None), default=None)
            if scale is not None and diff.zero_absprec <= scale:
                raise PrecisionError(
                    "compare", f"operands agree only modulo pi^{diff.zero_absprec}, below valuation {scale}"
                )
        return True

    __hash__ = None  # type: ignore[assignment]

    # Rendering

    def __str__(self) -> str:
        F = self.field
        sym = F.uniformizer_symbol
        if self.val is None:
            return "0" if self.zero_absprec is None else f"O({sym}^{self.zero_absprec})"
        terms = []
        for i, d in enumerate(F.raw_digits(self.unit, self.relprec)):
            if d == 0:
                continue
            e = self.val + i
            if e == 0:
                terms.append(str(d))
                continue
            monomial = sym if e == 1 else f"{sym}^{e}"
            terms.append(monomial if d == 1 else f"{d}*{monomial}")
        body = " + ".join(terms)
        return f"{body} + O({sym}^{self.absprec})"

    def __repr__(self) -> str:
        return f"LocalElem({self.field.name}: {self})"
