"""Parsers for field specs and element notation, with positional diagnostics."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import Poly, symbols
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from src.sl2_endoscopy.arith.local_field import LaurentField, LocalElem, LocalField, PadicField
from src.sl2_endoscopy.arith.residue_field import get_residue_field
from src.sl2_endoscopy.utils.exceptions import FieldConstructionError, ParseError

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z]+)|(?P<op>[-+*^]))")
_X = symbols("x")


@dataclass(frozen=True)
class KeyValue:
    """One ``key=value`` item of a comma-separated spec, with its offset."""

    key: str
    value: str
    position: int


def split_key_values(text: str, start: int = 0) -> list[KeyValue]:
    """Split 'a=1,b=2' into items, remembering where each value starts."""
    items: list[KeyValue] = []
    pos = start
    for chunk in text[start:].split(","):
        if "=" not in chunk:
            raise ParseError(text, pos, f"expected key=value, found {chunk!r}")
        key, value = chunk.split("=", 1)
        items.append(KeyValue(key.strip(), value.strip(), pos + len(key) + 1))
        pos += len(chunk) + 1
    return items


def _parse_int(text: str, item: KeyValue) -> int:
    try:
        return int(item.value)
    except ValueError as e:
        raise ParseError(text, item.position, f"{item.key} must be an integer", original_error=e) from e


def parse_modulus(text: str, p: int, position: int = 0, source: str | None = None) -> tuple[int, ...]:
    """Parse 'x^2+x+1' into integer coefficients (high to low) reduced mod p."""
    source = source if source is not None else text
    try:
        expr = parse_expr(text, transformations=standard_transformations + (convert_xor,))
        poly = Poly(expr, _X)
    except Exception as e:
        raise ParseError(source, position, f"modulus {text!r} is not a polynomial in x", original_error=e) from e
    return tuple(int(c) % p for c in poly.all_coeffs())


@lru_cache(maxsize=64)
def parse_field_spec(text: str) -> LocalField:
    """
    Parse 'Qp:p=<p>,prec=<N>' or 'Fq:p=<p>,f=<f>,prec=<N>[,modulus=<poly>]'.

    Raises:
        ParseError: With the offset of the offending item
    """
    if ":" not in text:
        raise ParseError(text, 0, "expected 'Qp:...' or 'Fq:...'")
    kind, _ = text.split(":", 1)
    kind = kind.strip()
    items = split_key_values(text, len(kind) + 1)
    values = {item.key: item for item in items}

    allowed = {"Qp": {"p", "prec"}, "Fq": {"p", "f", "prec", "modulus"}}
    if kind not in allowed:
        raise ParseError(text, 0, f"unknown field kind {kind!r}")
    for item in items:
        if item.key not in allowed[kind]:
            raise ParseError(text, item.position - len(item.key) - 1, f"unknown key {item.key!r}")
    for required in ("p", "prec"):
        if required not in values:
            raise ParseError(text, len(text), f"missing {required}=")

    p = _parse_int(text, values["p"])
    prec = _parse_int(text, values["prec"])
    try:
        if kind == "Qp":
            return PadicField(p, prec)
        f = _parse_int(text, values["f"]) if "f" in values else 1
        modulus = None
        if "modulus" in values:
            item = values["modulus"]
            modulus = parse_modulus(item.value, p, item.position, text)
        return LaurentField(get_residue_field(p, f, modulus), prec)
    except FieldConstructionError as e:
        raise ParseError(text, values["p"].position, str(e), original_error=e) from e


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        match = _TOKEN.match(stripped, pos)
        if not match or match.end() == pos:
            raise ParseError(text, pos, "unexpected character")
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append((kind, match.group(kind), start))
        pos = match.end()
    return tokens


def parse_element(F: LocalField, text: str) -> LocalElem:
    """
    Parse an element of F, exact to the working precision.

    Q_p accepts rational numbers and powers of 'pi' (an alias for p), e.g.
    '-1/2 + 3*pi^2'. Laurent fields accept residue-indexed coefficients times
    powers of 't' (or 'pi'), e.g. '3*t^2 + t^-1'.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError(text, 0, "empty element")
    atoms = {"pi"} | ({"t"} if isinstance(F, LaurentField) else set())

    i = 0
    terms: list[tuple[int, Fraction, int, int]] = []  # (sign, coeff, exponent, position)

    def expect_int() -> int:
        nonlocal i
        sign = 1
        if i < len(tokens) and tokens[i][:2] == ("op", "-"):
            sign = -1
            i += 1
        if i >= len(tokens) or tokens[i][0] != "num" or "/" in tokens[i][1]:
            raise ParseError(text, tokens[i][2] if i < len(tokens) else len(text), "expected an integer exponent")
        value = int(tokens[i][1])
        i += 1
        return sign * value

    sign = 1
    if tokens[0][:2] in (("op", "-"), ("op", "+")):
        sign = -1 if tokens[0][1] == "-" else 1
        i = 1
    while True:
        if i >= len(tokens):
            raise ParseError(text, len(text), "expected a term")
        kind, value, pos = tokens[i]
        coeff = Fraction(1)
        exponent = 0
        if kind == "num":
            coeff = Fraction(value)
            i += 1
            if i < len(tokens) and tokens[i][:2] == ("op", "*"):
                i += 1
                if i >= len(tokens) or tokens[i][0] != "name":
                    raise ParseError(text, tokens[i][2] if i < len(tokens) else len(text), "expected a power of the uniformizer")
                kind, value, pos = tokens[i]
            else:
                kind = None
        if kind == "name":
            if value not in atoms:
                raise ParseError(text, pos, f"unknown symbol {value!r}; expected one of {sorted(atoms)}")
            i += 1
            exponent = 1
            if i < len(tokens) and tokens[i][:2] == ("op", "^"):
                i += 1
                exponent = expect_int()
        elif kind is not None:
            raise ParseError(text, pos, f"unexpected {value!r}")
        terms.append((sign, coeff, exponent, pos))
        if i >= len(tokens):
            break
        kind, value, pos = tokens[i]
        if kind != "op" or value not in "+-":
            raise ParseError(text, pos, f"expected '+' or '-', found {value!r}")
        sign = 1 if value == "+" else -1
        i += 1

    if isinstance(F, PadicField):
        total = sum((s * c * Fraction(F.p) ** e for s, c, e, _ in terms), Fraction(0))
        return F.from_fraction(total)

    rf = F.residue
    coefficients: dict[int, int] = {}
    for s, c, e, pos in terms:
        if c.denominator != 1 or c.numerator >= F.q:
            raise ParseError(text, pos, f"coefficient {c} is not a residue index 0..{F.q - 1}")
        digit = int(c)
        if s < 0:
            digit = rf.neg(digit)
        coefficients[e] = rf.add(coefficients.get(e, 0), digit)
    return F.from_terms(coefficients)
