from __future__ import annotations

from fractions import Fraction

import pytest

from src.sl2_endoscopy.config import settings
from src.sl2_endoscopy.matrices import Mat2, TestFunction, embed, stable_class_split
from src.sl2_endoscopy.oracle import (
    FiniteQuotientRing,
    oracle_char2_squares,
    oracle_conjugacy,
    oracle_norm_membership,
    oracle_split_transfer,
    oracle_unipotent_sum,
    oracle_unit_quotient,
    oracle_value_index,
)
from src.sl2_endoscopy.orbital import measure_constant, unipotent_kappa_orbital
from src.sl2_endoscopy.quad_ext import KappaChar, canonical_ext
from src.sl2_endoscopy.transfer import split_transfer, torus_sequence
from src.sl2_endoscopy.utils.exceptions import OracleSizeError
from tests.conftest import make_ext, make_field


def test_finite_quotient_ring(q3):
    R = FiniteQuotientRing(q3, 2)
    assert R.size == 9
    assert len(R.units) == 6
    two = R.of(q3.element(2))
    assert R.mul(two, two) == R.of(q3.element(4))
    assert R.add(R.one, R.neg[R.one]) == R.zero
    assert R.lift(two) == 2
    with pytest.raises(ValueError):
        FiniteQuotientRing(q3, 0)


@pytest.mark.parametrize("field, kind", [("Q3", "unramified"), ("Q3", "ramified"), ("F2", "unramified"), ("F2", "ramified")])
@pytest.mark.parametrize("m", [0, 1, 2])
def test_unit_quotient_matches_measure_constants(field, kind, m):
    E = make_ext(field, kind)
    assert oracle_unit_quotient(E, m) == measure_constant(E, m)


@pytest.mark.parametrize("variant", range(6))
def test_value_index_of_ramified_q2_extensions(variant):
    E = make_ext("Q2", "ramified", variant)
    assert oracle_value_index(E) == 2
    assert oracle_unit_quotient(E, 0) == measure_constant(E, 0)


@pytest.mark.parametrize("field", ["Q2", "Q5", "F4"])
def test_value_index_of_unramified_extensions(field):
    assert oracle_value_index(make_ext(field, "unramified")) == 1


def test_unit_quotient_needs_a_field(q3):
    with pytest.raises(ValueError):
        oracle_unit_quotient(canonical_ext(q3, "split"), 1)


@pytest.mark.parametrize("field, kind", [("Q3", "unramified"), ("Q3", "ramified"), ("Q5", "ramified"), ("F2", "ramified")])
def test_norm_membership_matches_epsilon(field, kind):
    E = make_ext(field, kind)
    F = E.base
    k = E.norm_level()
    for shift in (0, 1):
        for d in F.residue.units:
            x = F.residue_lift(d).shift(shift)
            assert oracle_norm_membership(E, x, k) == (E.epsilon(x) == 1)


def test_norm_membership_at_the_conductor(f2):
    E = canonical_ext(f2, "ramified")
    assert oracle_norm_membership(E, f2.element("1 + t^2"), 2)
    assert not oracle_norm_membership(E, f2.element("1 + t"), 2)


def test_conjugacy_of_identity(q3):
    one = Mat2.identity(q3)
    assert oracle_conjugacy(one, one, 1)
    assert not oracle_conjugacy(one, Mat2.of(q3, 1, 1, 0, 1), 1)


def test_conjugate_torus_elements_are_not_sl_conjugate_when_minus_one_is_not_a_norm(q3_ramified):
    E = q3_ramified
    assert E.epsilon(-1) == -1
    t = torus_sequence(E, 0)
    assert not oracle_conjugacy(embed(t), embed(t.conjugate()), 2)
    assert oracle_conjugacy(embed(t), embed(t.conjugate()), 2, "GL")


def test_rational_classes_are_stably_but_not_rationally_conjugate(q3_ramified):
    t = torus_sequence(q3_ramified, 0)
    first, second = stable_class_split(q3_ramified, t).representatives
    assert oracle_conjugacy(first, second, 2, "GL")
    assert not oracle_conjugacy(first, second, 2, "SL")


def test_conjugacy_group_argument(q3):
    one = Mat2.identity(q3)
    with pytest.raises(ValueError):
        oracle_conjugacy(one, one, 1, "PGL")


@pytest.mark.parametrize("name, k", [("F2", 1), ("F2", 2), ("F2", 3), ("F2", 4), ("F4", 2), ("F4", 3)])
def test_unit_squares_in_characteristic_two(name, k):
    F = make_field(name)
    squares = oracle_char2_squares(F, k)
    assert len(squares) == (F.q - 1) * F.q ** ((k + 1) // 2 - 1)
    assert all(not any(s[1::2]) for s in squares)


@pytest.mark.parametrize(
    "kappa_kind, f",
    [
        (None, TestFunction.unit()),
        ("unramified", TestFunction.unit()),
        ("unramified", TestFunction.cell(1)),
        ("ramified", TestFunction(((0, 1), (1, 2)))),
    ],
)
@pytest.mark.parametrize("depth", [1, 2])
def test_unipotent_sum_matches_closed_form(q3, kappa_kind, f, depth):
    kappa = KappaChar() if kappa_kind is None else KappaChar(canonical_ext(q3, kappa_kind))
    whole = unipotent_kappa_orbital(q3, 1, kappa, f).as_fraction()
    ball = unipotent_kappa_orbital(q3, 1, kappa, TestFunction.unit()).as_fraction()
    ball_part = ball * kappa(q3.one().shift(depth)) * f.coeff(0) / 3**depth
    assert oracle_unipotent_sum(q3, kappa, f, depth) == whole - ball_part


def test_unipotent_sum_small_case(q3):
    assert oracle_unipotent_sum(q3, KappaChar(), TestFunction.unit(), 2) == Fraction(8, 9)


@pytest.mark.parametrize("j", [-2, -1, 0, 1, 2])
@pytest.mark.parametrize("f", [TestFunction.unit(), TestFunction.cell(1), TestFunction(((0, 1), (2, Fraction(1, 3))))])
def test_split_transfer_matches_enumeration(q3, j, f):
    a = q3.one().shift(j)
    assert oracle_split_transfer(q3, f, a) == split_transfer(f, a)


def test_oracles_respect_the_size_guard(q3, monkeypatch):
    monkeypatch.setattr(settings, "ORACLE_SIZE_GUARD", 10)
    with pytest.raises(OracleSizeError):
        FiniteQuotientRing(q3, 2)
    with pytest.raises(OracleSizeError):
        oracle_unit_quotient(canonical_ext(q3, "unramified"), 1)
