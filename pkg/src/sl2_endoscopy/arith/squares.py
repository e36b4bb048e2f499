"""Square classes, square roots and quadratic equations over local fields."""

from __future__ import annotations

from src.sl2_endoscopy.arith.local_field import LocalElem, LocalField
from src.sl2_endoscopy.utils.exceptions import PrecisionError, ShalikaUnavailableError


def _is_q2(F: LocalField) -> bool:
    return F.p == 2 and F.characteristic == 0


def _is_char2(F: LocalField) -> bool:
    return F.characteristic == 2


def is_square(x: LocalElem) -> bool:
    """
    Decide x in (F^x)^2 from the known digits of x.

    Raises:
        PrecisionError: If the verdict depends on digits beyond the window
    """
    F = x.field
    if x.is_exact_zero():
        return True
    if x.is_zero():
        raise PrecisionError("is_square", "operand is an inexact zero")
    if x.val % 2:
        return False
    if F.p != 2:
        return F.residue.is_square(x.leading_digit)
    if _is_q2(F):
        if x.relprec < 3:
            raise PrecisionError("is_square", "a 2-adic unit must be known modulo 8")
        return x.unit % 8 == 1
    # characteristic 2: the unit must be a series in t^2
    if x.relprec < 2:
        raise PrecisionError("is_square", "the first odd digit of the unit is unknown")
    digits = F.raw_digits(x.unit, x.relprec)
    return all(d == 0 for d in digits[1::2])


def sqrt(x: LocalElem) -> LocalElem | None:
    """A square root of x, or None when x is not a square."""
    if not is_square(x):
        return None
    F = x.field
    if x.is_zero():
        return x
    half = x.val // 2
    r = x.relprec

    if F.p != 2:
        u = x.unit_part()
        y = F.residue_lift(F.residue.sqrt(u.leading_digit)).truncate(r)
        for _ in range(r.bit_length() + 2):
            y = (y + u / y) / 2
        return y.shift(half)

    if _is_q2(F):
        u = x.unit % 2**r
        y = 1
        for k in range(3, r):
            if (y * y - u) % 2 ** (k + 1):
                y += 2 ** (k - 1)
        return LocalElem(F, half, y % 2 ** (r - 1), r - 1)

    rf = F.residue
    digits = F.raw_digits(x.unit, r)
    root_digits = [rf.sqrt(d) for d in digits[0::2]]
    return F.from_digits(root_digits, val=half, relprec=(r + 1) // 2)


def square_class_count(F: LocalField, k: int) -> int:
    """
    Cardinality of F^x / (F^x)^2 (1 + pi^k O).

    Constant (4) in odd residue characteristic, 2, 4, 8, 8, ... for Q_2, and
    2 q^(k // 2) in characteristic 2.
    """
    if k < 1:
        raise ValueError("level k must be >= 1")
    if k > F.prec:
        raise PrecisionError("square_class_count", f"level {k} exceeds precision {F.prec}")
    if F.p != 2:
        return 4
    if _is_q2(F):
        return {1: 2, 2: 4}.get(k, 8)
    return 2 * F.q ** (k // 2)


def square_class_representatives(F: LocalField) -> list[LocalElem]:
    """Representatives of F^x/(F^x)^2."""
    if F.p != 2:
        nu = F.residue_lift(F.residue.first_nonsquare)
        pi = F.uniformizer()
        return [F.one(), nu, pi, nu * pi]
    if _is_q2(F):
        return [F.element(n) for n in (1, 3, 5, 7, 2, 6, 10, 14)]
    raise ShalikaUnavailableError(F.p)


def nonsquare_unit(F: LocalField) -> LocalElem:
    """Lift of the first non-square of the residue field (p odd)."""
    if F.p == 2:
        raise ValueError("every residue is a square in characteristic 2")
    return F.residue_lift(F.residue.first_nonsquare)


def artin_schreier_reduce(c: LocalElem) -> tuple[LocalElem, LocalElem]:
    """
    Reduce c modulo {s^2 + s} in characteristic 2.

    Returns (c', s) with c = c' + s^2 + s where c' is integral, zero, or has
    an odd negative leading exponent.
    """
    F = c.field
    if not _is_char2(F):
        raise ValueError("Artin-Schreier reduction needs characteristic 2")
    acc = F.zero()
    while not c.is_zero() and c.val < 0 and c.val % 2 == 0:
        root = F.residue.sqrt(c.leading_digit)
        s = F.residue_lift(root).shift(c.val // 2)
        c = c - s * s - s
        acc = acc + s
    return c, acc


def artin_schreier_root(c: LocalElem) -> LocalElem | None:
    """A solution z of z^2 + z = c in characteristic 2, or None."""
    F = c.field
    reduced, acc = artin_schreier_reduce(c)
    if reduced.is_zero():
        return acc
    if reduced.val < 0:
        return None
    rf = F.residue
    c0 = reduced.residue()
    z0 = next((z for z in rf.elements if rf.add(rf.mul(z, z), z) == c0), None)
    if z0 is None:
        return None
    z = F.residue_lift(z0)
    for _ in range(F.prec.bit_length() + 2):
        z = z * z + reduced
    return acc + z


def solve_quadratic(F: LocalField, beta: LocalElem, gamma: LocalElem) -> LocalElem | None:
    """A root of X^2 + beta X + gamma in F, or None."""
    beta, gamma = F.element(beta), F.element(gamma)
    if not _is_char2(F):
        disc = beta * beta - 4 * gamma
        if disc.is_zero():
            return -beta / 2
        s = sqrt(disc)
        if s is None:
            return None
        return (s - beta) / 2
    if beta.is_zero():
        return sqrt(gamma)
    y = artin_schreier_root(gamma / (beta * beta))
    if y is None:
        return None
    return beta * y
