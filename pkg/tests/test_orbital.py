from __future__ import annotations

from fractions import Fraction

import pytest

from src.sl2_endoscopy.matrices import TestFunction
from src.sl2_endoscopy.orbital import (
    epsilon_orbital,
    kappa_weight,
    measure_constant,
    orbital,
    rational_orbital,
    split_orbital,
    stable_orbital,
    unipotent_kappa_orbital,
)
from src.sl2_endoscopy.quad_ext import KappaChar, canonical_ext
from src.sl2_endoscopy.transfer import torus_sequence
from src.sl2_endoscopy.utils.exceptions import ExtensionError, KappaError, RegularityError
from tests.conftest import make_ext

UNIT = TestFunction.unit()


def unramified_stable(q: int, n: int) -> Fraction:
    return 1 + sum(((1 + Fraction(1, q)) * q**m for m in range(1, n + 1)), Fraction(0))


def unramified_epsilon(q: int, n: int) -> Fraction:
    return 1 + sum(((-1) ** m * (1 + Fraction(1, q)) * q**m for m in range(1, n + 1)), Fraction(0))


def test_measure_constants(q3_unramified, q3_ramified):
    assert measure_constant(q3_unramified, 0) == 1
    assert measure_constant(q3_unramified, 1) == 4
    assert measure_constant(q3_unramified, 2) == 12
    assert measure_constant(q3_ramified, 0) == 2
    assert measure_constant(q3_ramified, 2) == 18
    with pytest.raises(ValueError):
        measure_constant(q3_ramified, -1)
    with pytest.raises(ExtensionError):
        measure_constant(make_ext("Q3", "split"), 0)


@pytest.mark.parametrize("field", ["Q3", "Q5"])
@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_unramified_unit_orbitals_match_closed_forms(field, n):
    E = make_ext(field, "unramified")
    t = torus_sequence(E, n)
    assert stable_orbital(E, t, UNIT) == unramified_stable(E.q, n)
    assert epsilon_orbital(E, t, UNIT) == unramified_epsilon(E.q, n)


@pytest.mark.parametrize("n", [0, 2, 4])
def test_characteristic_two_unramified_orbitals(f2_unramified, n):
    t = torus_sequence(f2_unramified, n)
    assert stable_orbital(f2_unramified, t, UNIT) == unramified_stable(2, n)
    assert epsilon_orbital(f2_unramified, t, UNIT) == (-2) ** n


@pytest.mark.parametrize("n", [0, 1, 2])
def test_ramified_unit_orbitals(q3_ramified, n):
    t = torus_sequence(q3_ramified, n)
    assert stable_orbital(q3_ramified, t, UNIT) == 3 ** (n + 1) - 1
    assert epsilon_orbital(q3_ramified, t, UNIT) == 0


def test_report_lists_cells(q3_unramified):
    t = torus_sequence(q3_unramified, 2)
    report = orbital(q3_unramified, t, TestFunction.cell(1))
    assert [cell.m for cell in report.cells] == [0, 1, 2, 3]
    assert report.value == sum((cell.contribution for cell in report.cells), Fraction(0))
    assert report.kappa == "1"
    assert not report.vanishing


def test_unrelated_kappa_vanishes(q3_ramified, q3_unramified):
    t = torus_sequence(q3_ramified, 1)
    report = orbital(q3_ramified, t, UNIT, KappaChar(q3_unramified))
    assert report.vanishing
    assert report.value == 0
    assert kappa_weight(KappaChar(q3_unramified), q3_ramified, 1) == 0
    assert kappa_weight(KappaChar(q3_unramified), q3_unramified, 1) == -1


def test_rational_orbitals_stabilize(q3_unramified):
    t = torus_sequence(q3_unramified, 2)
    f = TestFunction(((0, 1), (1, Fraction(1, 2))))
    plus = rational_orbital(q3_unramified, t, f, 1)
    minus = rational_orbital(q3_unramified, t, f, -1)
    assert plus + minus == stable_orbital(q3_unramified, t, f)
    b_sign = q3_unramified.epsilon(t.b)
    assert (plus - minus) * b_sign == epsilon_orbital(q3_unramified, t, f)
    with pytest.raises(ValueError):
        rational_orbital(q3_unramified, t, f, 0)


def test_orbitals_refuse_bad_inputs(q3_unramified, q3_ramified, f2):
    with pytest.raises(RegularityError):
        orbital(q3_unramified, q3_unramified.element(1), UNIT)
    split = make_ext("Q3", "split")
    with pytest.raises(ExtensionError):
        orbital(split, split.element(1, 1), UNIT)
    t = torus_sequence(q3_ramified, 0)
    with pytest.raises(KappaError):
        orbital(q3_ramified, t, UNIT, KappaChar(canonical_ext(f2, "unramified")))


@pytest.mark.parametrize(
    "kappa_kind, f, expected",
    [
        (None, UNIT, Fraction(1)),
        ("unramified", UNIT, Fraction(1, 2)),
        ("ramified", UNIT, Fraction(0)),
        (None, TestFunction.cell(1), Fraction(2)),
        ("unramified", TestFunction.cell(1), Fraction(-2)),
        ("unramified", TestFunction.cell(2), Fraction(6)),
    ],
)
def test_unipotent_kappa_orbitals(q3, kappa_kind, f, expected):
    kappa = KappaChar() if kappa_kind is None else KappaChar(canonical_ext(q3, kappa_kind))
    assert unipotent_kappa_orbital(q3, 1, kappa, f) == expected
    assert unipotent_kappa_orbital(q3, -1, kappa, f) == expected


def test_unipotent_orbital_needs_a_central_sign(q3):
    with pytest.raises(ValueError):
        unipotent_kappa_orbital(q3, 2, KappaChar(), UNIT)


def test_split_orbitals(q3):
    E = canonical_ext(q3, "split")
    assert split_orbital(E, q3.element(2), UNIT) == 3
    assert split_orbital(E, q3.uniformizer(), UNIT) == 0
    assert split_orbital(E, q3.uniformizer(), TestFunction.cell(1)) == 1
    with pytest.raises(RegularityError):
        split_orbital(E, q3.one(), UNIT)
    with pytest.raises(ExtensionError):
        split_orbital(make_ext("Q3", "ramified"), q3.element(2), UNIT)
