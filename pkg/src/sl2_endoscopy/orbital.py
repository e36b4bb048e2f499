"""Orbital, stable and kappa-orbital integrals on SL(2) via the cell decomposition over m = v(mu)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from src.sl2_endoscopy.arith.cyclo import CycloValue
from src.sl2_endoscopy.arith.local_field import LocalElem, LocalField
from src.sl2_endoscopy.matrices import Mat2, TestFunction, hecke_eval
from src.sl2_endoscopy.quad_ext import ExtElem, ExtKind, KappaChar, QuadExt
from src.sl2_endoscopy.utils.exceptions import ExtensionError, KappaError, RegularityError
from src.sl2_endoscopy.utils.logger import get_logger

logger = get_logger(__name__)

NORMALIZATION = "vol(O_F)=1, vol(O_E)=1"


@dataclass(frozen=True)
class OrbitalCell:
    """One term C(pi^-m) * kappa-weight * f(Y_m) of the cell sum."""

    m: int
    measure: Fraction
    sign: int
    f_value: Fraction

    @property
    def contribution(self) -> Fraction:
        return self.measure * self.sign * self.f_value


@dataclass
class OrbitalReport:
    """Exact value of an orbital integral with its cell-by-cell decomposition."""

    value: CycloValue
    cells: list[OrbitalCell] = field(default_factory=list)
    kappa: str = "1"
    vanishing: bool = False
    normalization: str = NORMALIZATION


def measure_constant(E: QuadExt, m: int) -> Fraction:
    """C(pi^-m): the order of E^x / F^x E(pi^-m)."""
    if E.kind == ExtKind.SPLIT:
        raise ExtensionError("measure constants are defined for elliptic tori; use split_orbital")
    if m < 0:
        raise ValueError("m must be non-negative")
    q = E.q
    if E.kind == ExtKind.UNRAMIFIED:
        return Fraction(1) if m == 0 else (1 + Fraction(1, q)) * q**m
    return Fraction(2 * q**m)


def kappa_weight(kappa: KappaChar, E: QuadExt, m: int) -> int:
    """Average of kappa over the shell pi^-m O^x (0 when kappa is not eps_E or trivial)."""
    if kappa.is_trivial:
        return 1
    if not kappa.matches(E):
        return 0
    return _own_weight(kappa, m)


def _own_weight(kappa: KappaChar, m: int) -> int:
    if kappa.is_trivial:
        return 1
    if kappa.carrier.kind == ExtKind.UNRAMIFIED:
        return -1 if m % 2 else 1
    return 0


def _check_regular(E: QuadExt, t: ExtElem, operation: str) -> None:
    if E.kind == ExtKind.SPLIT:
        raise ExtensionError(f"{operation} expects an elliptic torus; use split_orbital for split E")
    if t.b.is_zero():
        raise RegularityError(operation)
    E.require_standard_basis(operation)


def cell_matrix(E: QuadExt, t: ExtElem, m: int) -> Mat2:
    """Y_m = [[a, -b pi^m d], [b pi^-m, a + b t]]."""
    return Mat2(t.a, -(t.b * E.d).shift(m), t.b.shift(-m), t.a + t.b * E.t)


def orbital(E: QuadExt, t: ExtElem, f: TestFunction, kappa: KappaChar | None = None) -> OrbitalReport:
    """
    O^kappa(t, f) = sum_m C(pi^-m) * w_kappa(m) * f(Y_m) for m = 0 .. v(b) + r_max.

    Raises:
        RegularityError: If t is central
        KappaError: If kappa lives over another base field
    """
    kappa = kappa or KappaChar()
    _check_regular(E, t, "orbital")
    if kappa.carrier is not None and kappa.carrier.base != E.base:
        raise KappaError("carrier lives over a different base field")

    vanishing = not kappa.matches(E)
    top = t.b.val + f.r_max
    cells = []
    total = Fraction(0)
    for m in range(0, top + 1):
        C = measure_constant(E, m)
        sign = kappa_weight(kappa, E, m)
        value = hecke_eval(f, cell_matrix(E, t, m))
        cell = OrbitalCell(m=m, measure=C, sign=sign, f_value=value)
        cells.append(cell)
        total += cell.contribution
    logger.debug(
        f"Orbital integral over {len(cells)} cells on {E.label}",
        extra={"ext": E.label, "kappa": kappa.label, "cells": len(cells), "f": f.label},
    )
    return OrbitalReport(value=CycloValue.rational(total), cells=cells, kappa=kappa.label, vanishing=vanishing)


def stable_orbital(E: QuadExt, t: ExtElem, f: TestFunction) -> Fraction:
    """O^1(t, f)."""
    return orbital(E, t, f).value.as_fraction()


def epsilon_orbital(E: QuadExt, t: ExtElem, f: TestFunction) -> Fraction:
    """O^eps(t, f), without the eps(b) factor carried by the transfer factor."""
    return orbital(E, t, f, KappaChar(E)).value.as_fraction()


def rational_orbital(E: QuadExt, t: ExtElem, f: TestFunction, marker: int | None = None) -> Fraction:
    """
    Orbital integral over the rational class with the given marker.

    The standard embedding of t has marker eps(b), so O(t, f) = (O^1 + O^eps) / 2.
    """
    b_sign = E.epsilon(t.b)
    marker = b_sign if marker is None else marker
    if marker not in (1, -1):
        raise ValueError("marker must be +1 or -1")
    return (stable_orbital(E, t, f) + marker * b_sign * epsilon_orbital(E, t, f)) / 2


def unipotent_kappa_orbital(F: LocalField, z: int, kappa: KappaChar, f: TestFunction) -> CycloValue:
    """
    O^kappa(z nu, f) = integral over F of kappa(n) f([[z, zn], [0, z]]) dn, vol(O) = 1.

    The shell v(n) = -r contributes coeff_r q^r (1 - 1/q) times the kappa average.
    """
    if z not in (1, -1):
        raise ValueError("z must be +1 or -1")
    if kappa.carrier is not None and kappa.carrier.base != F:
        raise KappaError("carrier lives over a different base field")
    q = F.q
    zero_shell = _integral_over_O(kappa, q)
    total = Fraction(0)
    for r in range(0, f.r_max + 1):
        M = Mat2(F.element(z), F.element(z).shift(-r) if r else F.zero(), F.zero(), F.element(z))
        value = hecke_eval(f, M)
        if value == 0:
            continue
        if r == 0:
            total += value * zero_shell
        else:
            total += value * q**r * (1 - Fraction(1, q)) * _own_weight(kappa, r)
    return CycloValue.rational(total)


def _integral_over_O(kappa: KappaChar, q: int) -> Fraction:
    if kappa.is_trivial:
        return Fraction(1)
    if kappa.carrier.kind == ExtKind.UNRAMIFIED:
        return Fraction(q - 1, q + 1)
    return Fraction(0)


def split_orbital(E: QuadExt, a: LocalElem, f: TestFunction) -> Fraction:
    """O(diag(a, 1/a), f) = f^E(a) / |a - 1/a| for a split torus."""
    from src.sl2_endoscopy.transfer import split_transfer

    if E.kind != ExtKind.SPLIT:
        raise ExtensionError("split_orbital expects a split torus")
    diff = a - a.inverse()
    if diff.is_zero():
        raise RegularityError("split_orbital")
    return split_transfer(f, a) * Fraction(E.q) ** diff.val
