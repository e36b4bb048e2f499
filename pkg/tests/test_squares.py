from __future__ import annotations

import pytest

from src.sl2_endoscopy.arith.squares import (
    artin_schreier_reduce,
    artin_schreier_root,
    is_square,
    nonsquare_unit,
    solve_quadratic,
    sqrt,
    square_class_count,
    square_class_representatives,
)
from src.sl2_endoscopy.oracle import oracle_square_class_count
from src.sl2_endoscopy.utils.exceptions import PrecisionError, ShalikaUnavailableError
from tests.conftest import make_field


@pytest.mark.parametrize(
    "name,value,expected",
    [
        ("Q3", "7", True),
        ("Q3", "2", False),
        ("Q3", "3", False),
        ("Q3", "9", True),
        ("Q2", "17", True),
        ("Q2", "5", False),
        ("Q2", "4", True),
        ("Q2", "2", False),
        ("F2", "1 + t^2", True),
        ("F2", "1 + t", False),
        ("F2", "t^2 + t^4", True),
    ],
)
def test_is_square(name, value, expected):
    F = make_field(name)
    assert is_square(F.element(value)) is expected


@pytest.mark.parametrize("name,value", [("Q3", "7"), ("Q5", "-1"), ("Q2", "17"), ("F2", "1 + t^2 + t^4"), ("F4", "2 + t^2")])
def test_sqrt_squares_back(name, value):
    F = make_field(name)
    x = F.element(value)
    root = sqrt(x)
    assert root is not None
    assert root * root == x


def test_sqrt_of_a_non_square_is_none(q3):
    assert sqrt(q3.element(2)) is None


def test_two_adic_units_need_three_digits(q2):
    with pytest.raises(PrecisionError):
        is_square(q2.from_digits([1, 0], relprec=2))


@pytest.mark.parametrize(
    "name,k,expected",
    [("Q3", 1, 4), ("Q3", 3, 4), ("Q2", 1, 2), ("Q2", 2, 4), ("Q2", 3, 8), ("Q2", 5, 8), ("F2", 1, 2), ("F2", 2, 4), ("F2", 3, 4), ("F2", 4, 8), ("F4", 2, 8)],
)
def test_square_class_count(name, k, expected):
    assert square_class_count(make_field(name), k) == expected


@pytest.mark.parametrize("name,k", [("Q3", 1), ("Q3", 2), ("Q2", 1), ("Q2", 2), ("Q2", 3), ("F2", 1), ("F2", 2), ("F2", 3), ("F2", 4)])
def test_square_class_count_matches_enumeration(name, k):
    F = make_field(name)
    assert square_class_count(F, k) == oracle_square_class_count(F, k)


def test_square_class_count_grows_in_characteristic_two(f2):
    counts = [square_class_count(f2, k) for k in range(1, 9)]
    assert counts == sorted(counts)
    assert counts[-1] > counts[0]


def test_square_class_representatives(q3, q2, f2):
    reps = square_class_representatives(q3)
    assert len(reps) == 4
    assert sum(is_square(x) for x in reps) == 1
    assert len(square_class_representatives(q2)) == 8
    with pytest.raises(ShalikaUnavailableError):
        square_class_representatives(f2)


def test_nonsquare_unit(q3):
    u = nonsquare_unit(q3)
    assert u.is_unit() and not is_square(u)


def test_artin_schreier_reduction_keeps_odd_poles(f2):
    c = f2.element("t^-2 + t^-1")
    reduced, s = artin_schreier_reduce(c)
    assert reduced + s * s + s == c
    assert reduced.is_zero() or reduced.val >= 0 or reduced.val % 2 == 1


def test_artin_schreier_root(f2, f4):
    z = f2.element("t + t^3")
    root = artin_schreier_root(z * z + z)
    assert root is not None
    assert root * root + root == z * z + z
    # z^2 + z = 1 has no root in F_2, so 1 is not of the form z^2 + z over F_2((t))
    assert artin_schreier_root(f2.element(1)) is None
    assert artin_schreier_root(f4.element(1)) is not None


@pytest.mark.parametrize("name", ["Q3", "Q5", "F2"])
def test_solve_quadratic(name):
    F = make_field(name)
    # X^2 - 3X + 2 = (X - 1)(X - 2)
    root = solve_quadratic(F, F.element(-3), F.element(2))
    assert root is not None
    assert root * root - 3 * root + 2 == 0
