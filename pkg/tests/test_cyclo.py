from __future__ import annotations

from fractions import Fraction

import pytest

from src.sl2_endoscopy.arith.cyclo import I, ONE, ZERO, CycloValue, gauss_sum, q_power, sqrt_prime


def test_rationals_compare_with_ints_and_fractions():
    assert CycloValue.rational(Fraction(4, 3)) == Fraction(4, 3)
    assert CycloValue.rational(2) == 2
    assert str(CycloValue.rational(Fraction(-4, 3))) == "-4/3"


@pytest.mark.parametrize("m", [3, 4, 5, 8, 12])
def test_roots_of_unity_have_the_right_order(m):
    z = CycloValue.zeta(m)
    assert z**m == 1
    assert all(z**k != 1 for k in range(1, m))


@pytest.mark.parametrize("m", [3, 5, 8])
def test_sum_of_primitive_powers_is_the_mobius_value(m):
    total = sum((CycloValue.zeta(m, k) for k in range(m)), ZERO)
    assert total == 0


def test_i_squared_is_minus_one():
    assert I * I == -1
    assert I.conjugate() == -I
    assert (I * 3).norm() == 9


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_sqrt_prime_squares_to_p(p):
    assert sqrt_prime(p) * sqrt_prime(p) == p


@pytest.mark.parametrize("p", [3, 5, 7])
def test_gauss_sum_squares_to_plus_or_minus_p(p):
    g = gauss_sum(p)
    assert g * g == (p if p % 4 == 1 else -p)


def test_q_power_half_integral_exponents():
    assert q_power(3, 1, 2) == 3
    assert q_power(3, 1, -2) == Fraction(1, 3)
    assert q_power(2, 2, 1) == 2
    assert q_power(3, 1, 1) * q_power(3, 1, 1) == 3
    assert q_power(3, 1, -1) * q_power(3, 1, 1) == 1


def test_inverse_and_division_across_orders():
    x = CycloValue.zeta(8) - CycloValue.zeta(8, 3)
    assert x * x.inverse() == 1
    assert (x / x) == ONE
    assert (x * I) / I == x
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_lifting_preserves_values():
    z3 = CycloValue.zeta(3)
    assert z3.lift(12) == z3
    assert CycloValue.zeta(12, 4) == z3


def test_to_complex_is_approximate_but_close():
    value = sqrt_prime(2).to_complex()
    assert abs(value - 2**0.5) < 1e-12


def test_as_fraction_rejects_irrationals():
    with pytest.raises(ValueError):
        I.as_fraction()
    assert CycloValue.rational(Fraction(1, 2)).as_fraction() == Fraction(1, 2)


def test_string_form_of_sqrt_two():
    assert str(sqrt_prime(2)) == "zeta8^1 - zeta8^3"
