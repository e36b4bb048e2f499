"""Finite residue fields F_q = F_p[x]/(modulus) with table arithmetic."""

from functools import cached_property, lru_cache
from itertools import product

from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_rem, gf_strip

from src.sl2_endoscopy.config import settings
from src.sl2_endoscopy.utils.exceptions import FieldConstructionError
from src.sl2_endoscopy.utils.logger import get_logger

logger = get_logger(__name__)


def _first_irreducible(p: int, f: int) -> tuple[int, ...]:
    """Return the first monic irreducible polynomial of degree f (coefficients high to low)."""
    if f == 1:
        return (1, 0)
    for tail in product(range(p), repeat=f):
        candidate = [1, *tail]
        if gf_irreducible_p(candidate, p, ZZ):
            return tuple(candidate)
    raise FieldConstructionError(f"no irreducible polynomial of degree {f} over F_{p}")


def render_modulus(modulus: tuple[int, ...]) -> str:
    """Render a modulus as 'x^2+x+1'."""
    degree = len(modulus) - 1
    terms = []
    for i, c in enumerate(modulus):
        e = degree - i
        if c == 0:
            continue
        monomial = "1" if e == 0 else ("x" if e == 1 else f"x^{e}")
        if e == 0:
            terms.append(str(c))
        elif c == 1:
            terms.append(monomial)
        else:
            terms.append(f"{c}*{monomial}")
    return "+".join(terms)


class ResidueField:
    """
    The finite field F_q, q = p^f.

    Elements are the integers 0..q-1; the base-p digits of an element are the
    coefficients of its polynomial representative (lowest degree first).
    """

    def __init__(self, p: int, f: int = 1, modulus: tuple[int, ...] | None = None):
        """
        Build the field and its arithmetic tables.

        Args:
            p: Residue characteristic
            f: Degree over F_p
            modulus: Monic irreducible polynomial of degree f, high to low

        Raises:
            FieldConstructionError: If p is not prime, f < 1, q is too large
                or the modulus is not irreducible of degree f
        """
        if not isprime(p):
            raise FieldConstructionError(f"p={p} is not prime")
        if f < 1:
            raise FieldConstructionError(f"extension degree f={f} must be >= 1")
        q = p**f
        if q > settings.MAX_RESIDUE_FIELD_SIZE:
            raise FieldConstructionError(
                f"q={q} exceeds MAX_RESIDUE_FIELD_SIZE={settings.MAX_RESIDUE_FIELD_SIZE}"
            )

        if modulus is None:
            modulus = _first_irreducible(p, f)
        else:
            stripped = gf_strip([c % p for c in modulus])
            if len(stripped) != f + 1:
                raise FieldConstructionError(
                    f"modulus {render_modulus(tuple(stripped))} does not have degree {f}"
                )
            lead_inv = pow(stripped[0], -1, p)
            stripped = [(c * lead_inv) % p for c in stripped]
            if f > 1 and not gf_irreducible_p(stripped, p, ZZ):
                raise FieldConstructionError(
                    f"modulus {render_modulus(tuple(stripped))} is reducible over F_{p}"
                )
            modulus = tuple(stripped)

        self.p = p
        self.f = f
        self.q = q
        self.modulus = tuple(modulus)
        self._build_tables()
        logger.debug(f"Built residue field F_{q}", extra={"p": p, "f": f})

    def _to_poly(self, a: int) -> list[int]:
        coeffs = []
        for _ in range(self.f):
            coeffs.append(a % self.p)
            a //= self.p
        return gf_strip(coeffs[::-1])

    def _from_poly(self, poly: list[int]) -> int:
        value = 0
        for c in poly:
            value = value * self.p + c
        return value

    def _build_tables(self) -> None:
        p, q = self.p, self.q
        digits = [[(a // p**i) % p for i in range(self.f)] for a in range(q)]
        weights = [p**i for i in range(self.f)]

        self._add = [
            [sum(((da[i] + db[i]) % p) * weights[i] for i in range(self.f)) for db in digits]
            for da in digits
        ]
        self._neg = [sum(((-d) % p) * weights[i] for i, d in enumerate(da)) for da in digits]

        if self.f == 1:
            self._mul = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            modulus = list(self.modulus)
            polys = [self._to_poly(a) for a in range(q)]
            self._mul = [[0] * q for _ in range(q)]
            for a in range(1, q):
                for b in range(a, q):
                    prod = gf_rem(gf_mul(polys[a], polys[b], p, ZZ), modulus, p, ZZ)
                    value = self._from_poly(prod)
                    self._mul[a][b] = value
                    self._mul[b][a] = value

        self._inv = [0] * q
        for a in range(1, q):
            row = self._mul[a]
            self._inv[a] = row.index(1)

    # Arithmetic

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in the residue field")
        return self._inv[a]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        result = 1
        while e:
            if e & 1:
                result = self._mul[result][a]
            a = self._mul[a][a]
            e >>= 1
        return result

    def from_int(self, k: int) -> int:
        """Image of an integer in the prime subfield."""
        return k % self.p

    @property
    def elements(self) -> range:
        return range(self.q)

    @property
    def units(self) -> range:
        return range(1, self.q)

    # Structure

    @cached_property
    def generator(self) -> int:
        """A generator of the cyclic group F_q^x."""
        if self.q == 2:
            return 1
        primes = list(factorint(self.q - 1))
        for g in range(2, self.q):
            if all(self.pow(g, (self.q - 1) // ell) != 1 for ell in primes):
                return g
        raise FieldConstructionError(f"no generator found for F_{self.q}")

    @cached_property
    def log_table(self) -> dict[int, int]:
        """Discrete logarithm to the base ``generator``."""
        table: dict[int, int] = {}
        x = 1
        for k in range(self.q - 1):
            table[x] = k
            x = self._mul[x][self.generator]
        return table

    @cached_property
    def _sqrt_table(self) -> dict[int, int]:
        table: dict[int, int] = {0: 0}
        for x in self.units:
            table.setdefault(self._mul[x][x], x)
        return table

    def is_square(self, a: int) -> bool:
        if self.p == 2:
            return True
        return a in self._sqrt_table

    def sqrt(self, a: int) -> int | None:
        """A square root of a, or None."""
        if self.p == 2:
            return self.pow(a, self.q // 2)
        return self._sqrt_table.get(a)

    def chi(self, a: int) -> int:
        """Quadratic character of F_q^x (0 at 0; identically 1 in characteristic 2)."""
        if a == 0:
            return 0
        if self.p == 2:
            return 1
        return 1 if a in self._sqrt_table else -1

    @cached_property
    def first_nonsquare(self) -> int | None:
        if self.p == 2:
            return None
        return next(a for a in self.units if a not in self._sqrt_table)

    def trace(self, a: int) -> int:
        """Absolute trace Tr_{F_q/F_p}(a), as an integer 0..p-1."""
        total = 0
        x = a
        for _ in range(self.f):
            total = self._add[total][x]
            x = self.pow(x, self.p)
        return total

    @property
    def modulus_text(self) -> str:
        return render_modulus(self.modulus)

    def __repr__(self) -> str:
        if self.f == 1:
            return f"ResidueField(F_{self.p})"
        return f"ResidueField(F_{self.q}, modulus={self.modulus_text})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ResidueField) and (self.p, self.f, self.modulus) == (
            other.p,
            other.f,
            other.modulus,
        )

    def __hash__(self) -> int:
        return hash((self.p, self.f, self.modulus))


@lru_cache(maxsize=64)
def get_residue_field(p: int, f: int = 1, modulus: tuple[int, ...] | None = None) -> ResidueField:
    """Cached constructor; identical parameters share tables."""
    return ResidueField(p, f, modulus)
