from __future__ import annotations

from fractions import Fraction

import pytest

from src.sl2_endoscopy.arith.parsing import parse_element, parse_field_spec, split_key_values
from src.sl2_endoscopy.matrices import TestFunction
from src.sl2_endoscopy.utils.exceptions import ParseError


def test_padic_spec():
    F = parse_field_spec("Qp:p=3,prec=12")
    assert (F.p, F.f, F.q, F.prec) == (3, 1, 3, 12)
    assert F.name == "Q_3"


def test_laurent_spec_with_modulus():
    F = parse_field_spec("Fq:p=3,f=2,prec=8,modulus=x^2+1")
    assert F.q == 9
    assert F.residue.modulus == (1, 0, 1)


def test_field_specs_are_cached():
    assert parse_field_spec("Qp:p=5,prec=6") is parse_field_spec("Qp:p=5,prec=6")


@pytest.mark.parametrize(
    "text,position",
    [
        ("Zp:p=3,prec=4", 0),
        ("Qp3", 0),
        ("Qp:p=3", 6),
        ("Qp:p=4,prec=5", 5),
        ("Qp:p=3,prec=x", 12),
        ("Qp:p=3,prec=4,f=2", 14),
    ],
)
def test_malformed_field_specs_point_at_the_problem(text, position):
    with pytest.raises(ParseError) as info:
        parse_field_spec(text)
    assert info.value.position == position
    assert info.value.text == text


def test_reducible_modulus_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_field_spec("Fq:p=2,f=2,prec=8,modulus=x^2+1")


def test_key_values_remember_offsets():
    items = split_key_values("Qp:p=3,prec=12", 3)
    assert [(i.key, i.value, i.position) for i in items] == [("p", "3", 5), ("prec", "12", 12)]


def test_padic_elements(q3):
    assert parse_element(q3, "-1/2 + 3*pi^2") == Fraction(-1, 2) + 27
    assert parse_element(q3, "pi^-1") == Fraction(1, 3)
    assert parse_element(q3, "2") == 2


def test_laurent_elements(f2, f4):
    x = parse_element(f2, "1 + t + t^3")
    assert x.unit_digits(4) == [1, 1, 0, 1]
    assert parse_element(f4, "2*t - 2*t") == 0
    assert parse_element(f2, "pi") == parse_element(f2, "t")


@pytest.mark.parametrize("text,position", [("t", 0), ("1 + x", 4), ("", 0), ("2 *", 3)])
def test_malformed_padic_elements(q3, text, position):
    with pytest.raises(ParseError) as info:
        parse_element(q3, text)
    assert info.value.position == position


def test_laurent_coefficients_must_be_residue_indices(f2):
    with pytest.raises(ParseError):
        parse_element(f2, "3*t^2")


def test_test_function_specs():
    f = TestFunction.parse("0:1,1:-1/2")
    assert f.cells == ((0, Fraction(1)), (1, Fraction(-1, 2)))
    assert f.r_max == 1
    assert TestFunction.parse("unit") == TestFunction.unit()
    assert TestFunction.parse("2:1,2:1").coeff(2) == 2


@pytest.mark.parametrize("text,position", [("1:x", 2), ("a:1", 0), ("0:1,5", 4), ("-1:1", 0)])
def test_malformed_test_functions(text, position):
    with pytest.raises(ParseError) as info:
        TestFunction.parse(text)
    assert info.value.position == position
