"""2x2 matrix models: torus embeddings, Hecke-cell test functions and rational classes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator

from src.sl2_endoscopy.arith.local_field import LocalElem, LocalField
from src.sl2_endoscopy.quad_ext import ExtElem, ExtKind, QuadExt
from src.sl2_endoscopy.utils.exceptions import (
    ExtensionError,
    ParseError,
    PrecisionError,
    RegularityError,
)


class Mat2:
    """The matrix [[a, b], [c, d]] over a local field."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: LocalElem, b: LocalElem, c: LocalElem, d: LocalElem):
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def of(cls, F: LocalField, a: Any, b: Any, c: Any, d: Any) -> Mat2:
        return cls(F.element(a), F.element(b), F.element(c), F.element(d))

    @classmethod
    def identity(cls, F: LocalField) -> Mat2:
        return cls.of(F, 1, 0, 0, 1)

    @classmethod
    def diag(cls, x: LocalElem, y: LocalElem) -> Mat2:
        F = x.field
        return cls(x, F.zero(), F.zero(), F.element(y))

    @property
    def field(self) -> LocalField:
        return self.a.field

    @property
    def entries(self) -> tuple[LocalElem, LocalElem, LocalElem, LocalElem]:
        return (self.a, self.b, self.c, self.d)

    def __mul__(self, other: Mat2) -> Mat2:
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def det(self) -> LocalElem:
        return self.a * self.d - self.b * self.c

    def trace(self) -> LocalElem:
        return self.a + self.d

    def inverse(self) -> Mat2:
        inv_det = self.det().inverse()
        return Mat2(self.d * inv_det, -self.b * inv_det, -self.c * inv_det, self.a * inv_det)

    def conjugate_by(self, g: Mat2) -> Mat2:
        """g^-1 M g."""
        return g.inverse() * self * g

    def min_valuation(self) -> int:
        """Smallest entry valuation, decided at the available precision."""
        known = [e.val for e in self.entries if not e.is_zero()]
        if not known:
            raise PrecisionError("min_valuation", "all entries vanish at the working precision")
        low = min(known)
        for e in self.entries:
            if e.is_zero() and e.zero_absprec is not None and e.zero_absprec < low:
                raise PrecisionError("min_valuation", f"an entry is only known modulo pi^{e.zero_absprec}")
        return low

    def is_integral(self) -> bool:
        return self.min_valuation() >= 0

    def digits(self, k: int) -> tuple[tuple[int, ...], ...]:
        """Entries modulo pi^k, row by row."""
        return tuple(tuple(e.digits(k)) for e in self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mat2):
            return NotImplemented
        return all(x == y for x, y in zip(self.entries, other.entries))

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        texts = [str(e) for e in self.entries]
        return f"[[{texts[0]}, {texts[1]}], [{texts[2]}, {texts[3]}]]"

    def __repr__(self) -> str:
        return f"Mat2({self})"


@dataclass(frozen=True)
class TestFunction:
    """
    f = sum_r coeff_r * 1_{K diag(pi^r, pi^-r) K}, restricted to SL(2, F).

    The r = 0 cell alone is the unit 1_K.
    """

    __test__ = False  # not a pytest class

    cells: tuple[tuple[int, Fraction], ...] = field(default=((0, Fraction(1)),))

    def __post_init__(self) -> None:
        merged: dict[int, Fraction] = {}
        for r, c in self.cells:
            if r < 0:
                raise ValueError(f"cell index must be non-negative, got {r}")
            merged[r] = merged.get(r, Fraction(0)) + Fraction(c)
        object.__setattr__(self, "cells", tuple(sorted((r, c) for r, c in merged.items() if c != 0)))

    @classmethod
    def unit(cls) -> TestFunction:
        return cls(((0, Fraction(1)),))

    @classmethod
    def cell(cls, r: int, coeff: Any = 1) -> TestFunction:
        return cls(((r, Fraction(coeff)),))

    @classmethod
    def parse(cls, text: str) -> TestFunction:
        """Parse '0:1,1:-1/2' (cell:coefficient pairs) or the alias 'unit'."""
        if text.strip() in ("unit", "1_K"):
            return cls.unit()
        cells = []
        pos = 0
        for chunk in text.split(","):
            if ":" not in chunk:
                raise ParseError(text, pos, "expected <cell>:<coefficient>")
            r_text, c_text = chunk.split(":", 1)
            try:
                r = int(r_text)
            except ValueError as e:
                raise ParseError(text, pos, f"cell index {r_text.strip()!r} is not an integer", original_error=e) from e
            if r < 0:
                raise ParseError(text, pos, "cell index must be non-negative")
            try:
                c = Fraction(c_text.strip())
            except (ValueError, ZeroDivisionError) as e:
                raise ParseError(
                    text, pos + len(r_text) + 1, f"coefficient {c_text.strip()!r} is not rational", original_error=e
                ) from e
            cells.append((r, c))
            pos += len(chunk) + 1
        return cls(tuple(cells))

    @property
    def r_max(self) -> int:
        return max((r for r, _ in self.cells), default=0)

    def coeff(self, r: int) -> Fraction:
        for cell_r, c in self.cells:
            if cell_r == r:
                return c
        return Fraction(0)

    def __iter__(self) -> Iterator[tuple[int, Fraction]]:
        return iter(self.cells)

    @property
    def label(self) -> str:
        if not self.cells:
            return "0"
        return ",".join(f"{r}:{c}" for r, c in self.cells)

    def __str__(self) -> str:
        return self.label


def hecke_eval(f: TestFunction, M: Mat2) -> Fraction:
    """
    Value of f at M in SL(2, F): the cell of M is r = -(min entry valuation).

    Raises:
        ValueError: If det M is not 1 at the available precision
        PrecisionError: If the minimal valuation is not decided
    """
    if not (M.det() - 1).is_zero():
        raise ValueError("hecke_eval needs det M = 1")
    return f.coeff(-M.min_valuation())


def embed(x: ExtElem) -> Mat2:
    """Matrix of multiplication by x = a + b tau in the basis {1, tau}."""
    E = x.ext
    return Mat2(x.a, -(x.b * E.d), x.b, x.a + x.b * E.t)


def embed_torus_elem(E: QuadExt, x: ExtElem, sl: bool = True) -> Mat2:
    """Embedding into SL(2) (N(x) = 1 required) or GL(2)."""
    if sl and not (x.norm() - 1).is_zero():
        raise ValueError("embedding into SL(2) needs N(x) = 1")
    return embed(x)


def marker(E: QuadExt, M: Mat2) -> int:
    """Rational-class marker eps_{E/F}(lower-left entry) of a regular elliptic matrix."""
    if M.c.is_zero():
        raise RegularityError("marker")
    return E.epsilon(M.c)


@dataclass(frozen=True)
class ConjClassId:
    """A rational conjugacy class inside a regular elliptic stable class."""

    trace: str
    det: str
    marker: int


@dataclass
class StableClassSplit:
    """The two rational classes inside the stable class of t."""

    classes: list[ConjClassId]
    representatives: list[Mat2]
    nonnorm: LocalElem


def first_nonnorm(E: QuadExt) -> LocalElem:
    """
    First s with eps(s) = -1 among residue-digit units, then pi times those.

    In residue characteristic 2 the residue digits can all be norms (Q_2(i)),
    so the search continues through units d (1 + e pi^j) up to the norm level.
    """
    F = E.base
    lifts = [F.residue_lift(d) for d in F.residue.units]

    def candidates() -> Iterator[LocalElem]:
        yield from (d.shift(shift) for shift in (0, 1) for d in lifts)
        depth = E.norm_level() if E.is_field else 0
        for j in range(1, depth + 1):
            for e in lifts:
                u = F.one() + e.shift(j)
                yield from ((d * u).shift(shift) for shift in (0, 1) for d in lifts)

    for s in candidates():
        if E.epsilon(s) == -1:
            return s
    raise ExtensionError(f"no non-norm found for {E.label}")


def stable_class_split(E: QuadExt, t: ExtElem) -> StableClassSplit:
    """
    Representatives of the two rational classes in the stable class of t,
    ordered with marker +1 first.
    """
    if E.kind == ExtKind.SPLIT:
        raise ExtensionError("a split torus has a single rational class")
    if t.b.is_zero():
        raise RegularityError("stable_class_split")
    M = embed_torus_elem(E, t)
    s = first_nonnorm(E)
    twisted = Mat2(M.a, M.b / s, M.c * s, M.d)
    reps = [M, twisted] if E.epsilon(t.b) == 1 else [twisted, M]
    trace, det = str(M.trace()), str(M.det())
    classes = [ConjClassId(trace, det, 1), ConjClassId(trace, det, -1)]
    return StableClassSplit(classes=classes, representatives=reps, nonnorm=s)
