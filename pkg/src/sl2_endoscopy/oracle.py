"""
Brute-force oracles over finite quotients O/pi^k and O_E/pi^k.

Each oracle enumerates and never calls the closed forms it is used to check.
All of them refuse to run past ``ORACLE_SIZE_GUARD`` elements.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from src.sl2_endoscopy.arith.local_field import LocalElem, LocalField
from src.sl2_endoscopy.config import settings
from src.sl2_endoscopy.matrices import Mat2, TestFunction
from src.sl2_endoscopy.quad_ext import ExtKind, KappaChar, QuadExt
from src.sl2_endoscopy.utils.exceptions import OracleSizeError
from src.sl2_endoscopy.utils.logger import get_logger

logger = get_logger(__name__)


def _guard(name: str, size: int) -> None:
    if size > settings.ORACLE_SIZE_GUARD:
        raise OracleSizeError(name, size, settings.ORACLE_SIZE_GUARD)


class FiniteQuotientRing:
    """
    O/pi^k with full addition and multiplication tables.

    Elements are indices 0 .. q^k - 1 of the digit tuples in lexicographic order.
    """

    def __init__(self, F: LocalField, k: int):
        if k < 1 or k > F.prec:
            raise ValueError(f"level must lie in 1..{F.prec}")
        self.field = F
        self.k = k
        self.size = F.q**k
        _guard("FiniteQuotientRing", self.size * self.size)
        self.digits = list(product(F.residue.elements, repeat=k))
        self.index = {d: i for i, d in enumerate(self.digits)}
        raws = [F.raw_from_digits(d) for d in self.digits]
        self.add_table = [[self._lookup(F.raw_add(x, y, k)) for y in raws] for x in raws]
        self.mul_table = [[self._lookup(F.raw_mul(x, y, k)) for y in raws] for x in raws]
        self.zero = self.index[tuple([0] * k)]
        self.one = self.index[tuple([1] + [0] * (k - 1))]
        self.neg = [row.index(self.zero) for row in self.add_table]
        self.units = [i for i, d in enumerate(self.digits) if d[0] != 0]
        logger.debug(f"Built O/pi^{k} over {F.name} with {self.size} elements", extra={"level": k, "size": self.size})

    def _lookup(self, raw) -> int:
        return self.index[tuple(self.field.raw_digits(raw, self.k))]

    def add(self, x: int, y: int) -> int:
        return self.add_table[x][y]

    def mul(self, x: int, y: int) -> int:
        return self.mul_table[x][y]

    def sub(self, x: int, y: int) -> int:
        return self.add_table[x][self.neg[y]]

    def of(self, x: LocalElem) -> int:
        return self.index[tuple(x.digits(self.k))]

    def lift(self, i: int) -> LocalElem:
        return self.field.from_digits(self.digits[i])


class _ExtQuotient:
    """O_E/pi^k = (O/pi^k)[tau] on pairs (c, d) meaning c + d tau."""

    def __init__(self, E: QuadExt, k: int):
        E.require_standard_basis("oracle")
        self.ring = FiniteQuotientRing(E.base, k)
        self.t = self.ring.of(E.t)
        self.d = self.ring.of(E.d)
        self.ramified = E.kind == ExtKind.RAMIFIED

    def mul(self, x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
        R = self.ring
        bd = R.mul(x[1], y[1])
        return (
            R.sub(R.mul(x[0], y[0]), R.mul(bd, self.d)),
            R.add(R.add(R.mul(x[0], y[1]), R.mul(x[1], y[0])), R.mul(bd, self.t)),
        )

    def norm(self, x: tuple[int, int]) -> int:
        R = self.ring
        c, e = x
        return R.add(R.add(R.mul(c, c), R.mul(R.mul(c, e), self.t)), R.mul(R.mul(e, e), self.d))

    def units(self) -> list[tuple[int, int]]:
        R = self.ring
        units = []
        for c, e in product(range(R.size), repeat=2):
            lead_c, lead_e = R.digits[c][0], R.digits[e][0]
            if self.ramified and lead_c == 0:
                continue
            if lead_c == 0 and lead_e == 0:
                continue
            units.append((c, e))
        return units


def oracle_value_index(E: QuadExt) -> int:
    """
    [E^x : F^x O_E^x], counted as the parities of v(N(c + d tau)) over residue lifts
    c, d not both zero. Some such element is a uniformizer of E.
    """
    F = E.base
    lifts = [F.zero()] + [F.residue_lift(a) for a in F.residue.units]
    parities = {
        E.element(c, d).norm().val % 2 for c, d in product(lifts, lifts) if not (c.is_zero() and d.is_zero())
    }
    return len(parities)


def oracle_unit_quotient(E: QuadExt, m: int) -> int:
    """Order of E^x / F^x (1 + pi^m O_E), by counting orbits of O^x on (O_E/pi^m)^x."""
    if E.kind == ExtKind.SPLIT:
        raise ValueError("oracle_unit_quotient expects a field")
    e = oracle_value_index(E)
    if m == 0:
        # O_E / pi^0 is the zero ring: a single orbit
        return e
    F = E.base
    _guard("oracle_unit_quotient", F.q ** (3 * m))
    Q = _ExtQuotient(E, m)
    R = Q.ring
    seen: set[tuple[int, int]] = set()
    orbits = 0
    for x in Q.units():
        if x in seen:
            continue
        orbits += 1
        for s in R.units:
            seen.add((R.mul(s, x[0]), R.mul(s, x[1])))
    return e * orbits


def oracle_norm_membership(E: QuadExt, x: LocalElem, k: int) -> bool:
    """Whether x lies in N(E^x), decided modulo pi^k on the unit part."""
    if x.is_zero():
        raise ValueError("x must be nonzero")
    if E.kind == ExtKind.SPLIT:
        return True
    F = E.base
    _guard("oracle_norm_membership", F.q ** (2 * k))
    if E.kind == ExtKind.UNRAMIFIED:
        if x.val % 2:
            return False
        unit = x / F.uniformizer() ** x.val
    else:
        unit = x / E.d**x.val
    Q = _ExtQuotient(E, k)
    target = Q.ring.of(unit)
    return any(Q.norm(y) == target for y in Q.units())


def _mat_indices(R: FiniteQuotientRing, M: Mat2) -> tuple[int, int, int, int]:
    return tuple(R.of(e) for e in M.entries)  # type: ignore[return-value]


def oracle_conjugacy(M1: Mat2, M2: Mat2, k: int, group: str = "SL") -> bool:
    """Whether g M1 = M2 g for some g in SL(2, O/pi^k) (or GL when group='GL')."""
    if group not in ("SL", "GL"):
        raise ValueError("group must be 'SL' or 'GL'")
    R = FiniteQuotientRing(M1.field, k)
    _guard("oracle_conjugacy", R.size**4)
    a1, b1, c1, d1 = _mat_indices(R, M1)
    a2, b2, c2, d2 = _mat_indices(R, M2)
    unit_set = set(R.units)
    mul, add, sub = R.mul, R.add, R.sub
    for w, x, y, z in product(range(R.size), repeat=4):
        det = sub(mul(w, z), mul(x, y))
        if group == "SL" and det != R.one:
            continue
        if group == "GL" and det not in unit_set:
            continue
        # g = [[w, x], [y, z]]
        if (
            add(mul(w, a1), mul(x, c1)) == add(mul(a2, w), mul(b2, y))
            and add(mul(w, b1), mul(x, d1)) == add(mul(a2, x), mul(b2, z))
            and add(mul(y, a1), mul(z, c1)) == add(mul(c2, w), mul(d2, y))
            and add(mul(y, b1), mul(z, d1)) == add(mul(c2, x), mul(d2, z))
        ):
            return True
    return False


def oracle_square_class_count(F: LocalField, k: int) -> int:
    """|F^x / (F^x)^2 (1 + pi^k O)| = 2 |(O/pi^k)^x / squares|."""
    R = FiniteQuotientRing(F, k)
    squares = {R.mul(u, u) for u in R.units}
    return 2 * len(R.units) // len(squares)


def oracle_char2_squares(F: LocalField, k: int) -> set[tuple[int, ...]]:
    """Digit tuples modulo pi^k of squares of units."""
    R = FiniteQuotientRing(F, k)
    return {R.digits[R.mul(u, u)] for u in R.units}


def _spread(F: LocalField, top: int, depth: int) -> list[LocalElem]:
    """Representatives of pi^-top O / pi^depth O as exact elements."""
    _guard("spread", F.q ** (top + depth))
    reps = []
    for digits in product(F.residue.elements, repeat=top + depth):
        reps.append(F.from_digits(digits, val=-top) if any(digits) else F.zero())
    return reps


def oracle_unipotent_sum(F: LocalField, kappa: KappaChar, f: TestFunction, depth: int) -> Fraction:
    """
    Sum of kappa(n) f(u(n)) q^-depth over n in pi^-r_max O / pi^depth O with v(n) < depth.

    The ball pi^depth O is left out.
    """
    q = F.q
    total = Fraction(0)
    for n in _spread(F, f.r_max, depth):
        if n.is_zero() or n.val >= depth:
            continue
        r = max(0, -n.val)
        total += kappa(n) * f.coeff(r)
    return total / q**depth


def oracle_split_transfer(F: LocalField, f: TestFunction, a: LocalElem, depth: int | None = None) -> Fraction:
    """
    Sum of f([[a, n], [0, 1/a]]) over classes n in pi^-R O / pi^L O, each of mass q^-L.

    Exact once L >= |v(a)| and R >= r_max.
    """
    L = abs(a.val) if depth is None else depth
    top = max(f.r_max, abs(a.val))
    total = Fraction(0)
    for n in _spread(F, top, L):
        low = min(a.val, -a.val) if n.is_zero() else min(a.val, -a.val, n.val)
        total += f.coeff(-low)
    return total / F.q**L
