from __future__ import annotations

from itertools import combinations

import pytest

from src.sl2_endoscopy.arith.cyclo import I
from src.sl2_endoscopy.quad_ext import (
    ExtKind,
    KappaChar,
    QuadExt,
    build_ext,
    canonical_ext,
    hilbert_symbol,
    lambda_const,
    parse_ext_spec,
    ramified_variant_count,
    same_character,
)
from src.sl2_endoscopy.utils.exceptions import ExtensionError, ParseError
from tests.conftest import make_ext, make_field


@pytest.mark.parametrize("field", ["Q2", "Q3", "Q5", "F2", "F4"])
@pytest.mark.parametrize("kind", ["split", "unramified", "ramified"])
def test_canonical_presentations_have_their_kind(field, kind):
    E = make_ext(field, kind)
    assert E.kind == ExtKind(kind)
    assert E.standard_basis
    assert E.is_field == (kind != "split")


@pytest.mark.parametrize(
    "field, t, d, kind",
    [
        ("Q3", "0", "1", ExtKind.UNRAMIFIED),
        ("Q3", "0", "-1", ExtKind.SPLIT),
        ("Q3", "0", "-4", ExtKind.SPLIT),
        ("Q3", "0", "3", ExtKind.RAMIFIED),
        ("Q5", "0", "-2", ExtKind.UNRAMIFIED),
        ("Q5", "0", "1", ExtKind.SPLIT),
        ("Q2", "1", "1", ExtKind.UNRAMIFIED),
        ("Q2", "0", "1", ExtKind.RAMIFIED),
        ("Q2", "1", "-2", ExtKind.SPLIT),
        ("F2", "1", "1", ExtKind.UNRAMIFIED),
        ("F2", "1", "t", ExtKind.SPLIT),
        ("F2", "t", "t", ExtKind.RAMIFIED),
    ],
)
def test_classification_of_explicit_presentations(field, t, d, kind):
    assert build_ext(make_field(field), t, d).kind == kind


def test_degenerate_presentations_are_rejected(q3, f2):
    with pytest.raises(ExtensionError):
        QuadExt(q3, "2", "1")
    with pytest.raises(ExtensionError):
        QuadExt(q3, "1", "0")
    with pytest.raises(ExtensionError):
        QuadExt(q3, "0", "1/3")
    with pytest.raises(ExtensionError):
        QuadExt(f2, "0", "1")


def test_epsilon_unramified_detects_parity(q3_unramified, f2_unramified):
    assert q3_unramified.epsilon(3) == -1
    assert q3_unramified.epsilon(9) == 1
    assert q3_unramified.epsilon(2) == 1
    assert q3_unramified.epsilon(-1) == 1
    f2 = f2_unramified.base
    assert f2_unramified.epsilon(f2.uniformizer()) == -1
    assert f2_unramified.epsilon(f2.element("1 + t")) == 1


def test_epsilon_ramified_q3(q3_ramified):
    assert q3_ramified.epsilon(-1) == -1
    assert q3_ramified.epsilon(-3) == 1
    assert q3_ramified.epsilon(3) == -1
    assert q3_ramified.epsilon(2) == -1


def test_epsilon_of_zero_is_rejected(q3_ramified):
    with pytest.raises(ValueError):
        q3_ramified.epsilon(0)


def test_split_epsilon_is_trivial(q3):
    E = canonical_ext(q3, "split")
    assert all(E.epsilon(x) == 1 for x in (2, 3, -1, 6))


@pytest.mark.parametrize("field, kind", [("Q3", "ramified"), ("Q5", "ramified"), ("Q2", "ramified"), ("Q2", "unramified"), ("F2", "ramified")])
def test_norms_have_trivial_epsilon(field, kind):
    E = make_ext(field, kind)
    for a, b in [(1, 0), (0, 1), (1, 1), (2, 1), (1, 3)]:
        n = E.element(a, b).norm()
        if not n.is_zero():
            assert E.epsilon(n) == 1


@pytest.mark.parametrize("field, kind", [("Q3", "ramified"), ("Q2", "ramified"), ("F2", "ramified")])
def test_epsilon_is_multiplicative(field, kind):
    E = make_ext(field, kind)
    F = E.base
    samples = [F.element(x) for x in ("1 + pi", "1 + pi^2", "pi", "1 + pi + pi^3")]
    for x in samples:
        for y in samples:
            assert E.epsilon(x * y) == E.epsilon(x) * E.epsilon(y)


def test_wild_character_has_conductor_two(f2):
    E = canonical_ext(f2, "ramified")
    assert E.norm_level() == 2
    assert E.epsilon(f2.element("1 + t")) == -1
    assert E.epsilon(f2.element("1 + t^2")) == 1


@pytest.mark.parametrize("field, kind, level", [("Q3", "ramified", 1), ("Q3", "unramified", 1), ("Q5", "ramified", 1)])
def test_norm_level_small_fields(field, kind, level):
    assert make_ext(field, kind).norm_level() == level


def test_q2_has_seven_distinct_quadratic_characters(q2):
    exts = [canonical_ext(q2, "unramified")] + [
        canonical_ext(q2, "ramified", v) for v in range(ramified_variant_count(q2))
    ]
    assert len(exts) == 7
    for E1, E2 in combinations(exts, 2):
        assert not same_character(E1, E2)


def test_same_character_ignores_presentation(q3):
    E = canonical_ext(q3, "ramified")
    assert same_character(E, build_ext(q3, 0, -12))
    assert not same_character(E, canonical_ext(q3, "ramified", 1))
    assert same_character(canonical_ext(q3, "unramified"), build_ext(q3, 0, 1))


def test_hilbert_symbol_known_values(q3, q2):
    assert hilbert_symbol(q3.element(3), q3.element(3)) == -1
    assert hilbert_symbol(q3.element(2), q3.element(2)) == 1
    assert hilbert_symbol(q2.element(-1), q2.element(-1)) == -1
    assert hilbert_symbol(q2.element(2), q2.element(5)) == -1


def test_hilbert_symbol_unavailable_in_characteristic_two(f2):
    with pytest.raises(ValueError):
        hilbert_symbol(f2.one(), f2.uniformizer())


def test_ext_element_arithmetic(q3_ramified):
    E = q3_ramified
    tau = E.tau
    assert tau * tau == tau * E.t - E.d
    z = E.element(2, 1)
    w = E.element(1, 1)
    assert (z * w).norm() == z.norm() * w.norm()
    assert z * z.inverse() == 1
    assert z.conjugate().conjugate() == z
    assert z + z.conjugate() == z.trace()


@pytest.mark.parametrize(
    "text, kind",
    [
        ("split", ExtKind.SPLIT),
        ("unramified", ExtKind.UNRAMIFIED),
        ("ramified", ExtKind.RAMIFIED),
        ("ramified2", ExtKind.RAMIFIED),
        ("ext:t=0,d=-3", ExtKind.RAMIFIED),
        (" ext:t=0,d=1 ", ExtKind.UNRAMIFIED),
    ],
)
def test_parse_ext_spec(q3, text, kind):
    assert parse_ext_spec(q3, text).kind == kind


@pytest.mark.parametrize(
    "text, position",
    [
        ("bogus", 0),
        ("ramified9", 8),
        ("ext:t=0", 7),
        ("ext:t=0,d=x", 10),
        ("ext:t=2,d=1", 0),
    ],
)
def test_parse_ext_spec_errors(q3, text, position):
    with pytest.raises(ParseError) as info:
        parse_ext_spec(q3, text)
    assert info.value.position == position


def test_kappa_characters(q3_ramified, q3_unramified, q3):
    trivial = KappaChar()
    assert trivial.is_trivial and trivial.label == "1"
    assert trivial(3) == 1
    kappa = KappaChar(q3_ramified)
    assert not kappa.is_trivial
    assert kappa(-1) == -1
    assert kappa.matches(q3_ramified)
    assert not kappa.matches(q3_unramified)
    assert KappaChar(canonical_ext(q3, "split")).is_trivial


@pytest.mark.parametrize("field", ["Q3", "Q5", "Q2", "F2"])
def test_lambda_is_one_for_unramified(field):
    assert lambda_const(make_ext(field, "unramified")) == 1


def test_lambda_ramified_q3(q3_ramified):
    assert lambda_const(q3_ramified) == -I
    assert lambda_const(make_ext("Q3", "ramified", 1)) == I


@pytest.mark.parametrize("field", ["Q3", "Q5"])
def test_lambda_carries_eta_of_the_uniformizer(field):
    first, second = make_ext(field, "ramified", 0), make_ext(field, "ramified", 1)
    pi = first.base.uniformizer()
    assert first.epsilon(pi) == -second.epsilon(pi)
    assert lambda_const(first) * first.epsilon(pi) == lambda_const(second) * second.epsilon(pi)
    assert lambda_const(first) == -lambda_const(second)


def test_lambda_ramified_q5_is_one():
    assert lambda_const(make_ext("Q5", "ramified")) == 1


@pytest.mark.parametrize("field, variant", [("Q3", 0), ("Q3", 1), ("Q5", 1), ("Q2", 0), ("Q2", 3), ("Q2", 4), ("F2", 0)])
def test_lambda_squares_to_epsilon_of_minus_one(field, variant):
    E = make_ext(field, "ramified", variant)
    value = lambda_const(E)
    assert value * value == E.epsilon(-1)


def test_lambda_conductor_shift(q3_ramified):
    pi = q3_ramified.base.uniformizer()
    assert lambda_const(q3_ramified, 1) == lambda_const(q3_ramified) * q3_ramified.epsilon(pi)
    assert lambda_const(q3_ramified, 2) == lambda_const(q3_ramified)


def test_lambda_canonical_flag(q2, q3):
    assert not canonical_ext(q2, "ramified").lambda_canonical
    assert canonical_ext(q2, "unramified").lambda_canonical
    assert canonical_ext(q3, "ramified").lambda_canonical
