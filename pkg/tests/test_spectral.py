from __future__ import annotations

from fractions import Fraction

import pytest
from sympy import Matrix

from src.sl2_endoscopy.matrices import TestFunction
from src.sl2_endoscopy.spectral import (
    TorusGroup,
    column_orthogonality,
    enumerate_torus_chars,
    galois_symmetric,
    iden_check,
    intertwining_scalar,
    inverse_char,
    orthogonality_integral,
    shell_density,
    smith_normal_form,
    torus_class_structure,
    weyl_spectral_check,
    xi_value,
)
from src.sl2_endoscopy.transfer import torus_sequence
from src.sl2_endoscopy.utils.exceptions import ExtensionError, RegularityError
from tests.conftest import make_ext


@pytest.mark.parametrize(
    "rows, ncols, diagonal",
    [
        ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], 3, [2, 6, 12]),
        ([[2, 0], [0, 3]], 2, [1, 6]),
        ([[4, 0], [0, 0]], 2, [4, 0]),
        ([[0, 3], [6, 0], [3, 3]], 2, [3, 3]),
        ([[12]], 1, [12]),
    ],
)
def test_smith_normal_form(rows, ncols, diagonal):
    diag, V = smith_normal_form(rows, ncols)
    assert diag == diagonal
    assert abs(Matrix(V).det()) == 1


@pytest.mark.parametrize("field, k, order", [("Q3", 1, 4), ("Q3", 2, 12), ("Q5", 1, 6), ("F2", 1, 3), ("F2", 2, 6)])
def test_unramified_torus_groups_are_cyclic(field, k, order):
    G = TorusGroup(make_ext(field, "unramified"), k)
    assert G.order == order
    assert G.invariants == [order]
    assert G.exponent == order
    for i in range(G.order):
        assert G.table[i][G.inverse[i]] == 0


def test_torus_group_needs_an_elliptic_torus():
    with pytest.raises(ExtensionError):
        TorusGroup(make_ext("Q3", "split"), 1)


def test_characters_of_the_level_one_torus(q3_unramified):
    characters = enumerate_torus_chars(q3_unramified, 1)
    assert len(characters) == 4
    assert characters[0].is_trivial
    assert sorted(theta.order for theta in characters) == [1, 2, 4, 4]
    assert column_orthogonality(characters)
    assert [theta.conductor_level for theta in characters] == [0, 1, 1, 1]
    assert characters[1].label == "theta(1)"


def test_characters_are_homomorphisms(q3_unramified):
    characters = enumerate_torus_chars(q3_unramified, 2)
    G = characters[0].group
    for theta in characters[:4]:
        for i in range(G.order):
            for j in range(G.order):
                assert theta.at_index(G.table[i][j]) == theta.at_index(i) * theta.at_index(j)


def test_orthogonality_integrals(q3_unramified):
    for theta in enumerate_torus_chars(q3_unramified, 1):
        expected = 4 if theta.order <= 2 else 2
        assert orthogonality_integral(theta) == expected


def test_inverse_character(q3_unramified):
    characters = enumerate_torus_chars(q3_unramified, 1)
    theta = next(c for c in characters if c.order == 4)
    inverse = inverse_char(theta)
    assert inverse != theta
    G = theta.group
    assert all(theta.at_index(i) * inverse.at_index(i) == 1 for i in range(G.order))


@pytest.mark.parametrize("kind", ["unramified", "ramified"])
def test_character_identity_holds(kind):
    E = make_ext("Q3", kind)
    characters = enumerate_torus_chars(E, 1)
    for n in (0, 1, 2):
        t = torus_sequence(E, n)
        for theta in characters:
            check = iden_check(E, theta, t)
            assert check.holds
            assert galois_symmetric(E, theta, t)


def test_xi_needs_a_regular_element(q3_unramified):
    theta = enumerate_torus_chars(q3_unramified, 1)[0]
    with pytest.raises(RegularityError):
        xi_value(q3_unramified, theta, q3_unramified.element(1))


def test_xi_of_the_trivial_character(q3_unramified):
    theta = enumerate_torus_chars(q3_unramified, 1)[0]
    t = torus_sequence(q3_unramified, 1)
    assert xi_value(q3_unramified, theta, t) == -6


def test_torus_class_structure(q3_unramified, q3_ramified):
    assert torus_class_structure(q3_unramified) == [(2, 1), (2, -1)]
    assert torus_class_structure(q3_ramified) == [(1, 1)]
    with pytest.raises(ExtensionError):
        torus_class_structure(make_ext("Q3", "split"))


@pytest.mark.slow
def test_weyl_check_verifies_every_level_one_character(q3_unramified):
    for theta in enumerate_torus_chars(q3_unramified, 1):
        report = weyl_spectral_check(q3_unramified, theta, TestFunction.unit())
        assert report.status == "verified", report.reason
        assert report.lhs == (1 if theta.is_trivial else 0)


@pytest.mark.parametrize(
    "f, density",
    [(TestFunction.unit(), 1), (TestFunction.cell(1), -4), (TestFunction(((0, 1), (2, Fraction(1, 2)))), 7)],
)
def test_shell_density_reads_the_cells_with_alternating_measure(q3_unramified, f, density):
    assert shell_density(q3_unramified, f) == density


def test_shell_density_needs_the_unramified_torus(q3_ramified):
    with pytest.raises(ExtensionError):
        shell_density(q3_ramified, TestFunction.unit())


@pytest.mark.slow
def test_weyl_tail_is_the_closed_form_over_q3(q3_unramified):
    for theta in enumerate_torus_chars(q3_unramified, 1):
        report = weyl_spectral_check(q3_unramified, theta)
        assert report.status == "verified", report.reason
        assert report.shell_density == "1"
        weight = 1 + theta(q3_unramified.element(-1))
        assert report.tail == weight / 4


@pytest.mark.slow
def test_weyl_check_verifies_over_f2(f2_unramified):
    for theta in enumerate_torus_chars(f2_unramified, 1):
        report = weyl_spectral_check(f2_unramified, theta)
        assert report.status == "verified", report.reason
        assert report.tail == Fraction(1, 3)


def test_weyl_check_is_inconclusive_for_ramified_tori(q3_ramified):
    theta = enumerate_torus_chars(q3_ramified, 1)[0]
    report = weyl_spectral_check(q3_ramified, theta)
    assert report.status == "inconclusive"
    assert report.reason


@pytest.mark.parametrize(
    "q, s, value",
    [(3, 1, Fraction(4, 3)), (2, 1, Fraction(3, 2)), (3, 2, Fraction(13, 12)), (5, -1, Fraction(0))],
)
def test_intertwining_scalar(q, s, value):
    report = intertwining_scalar(q, s=s)
    assert report.value == value
    assert not report.pole
    assert report.series_matches


def test_intertwining_pole_and_arguments():
    report = intertwining_scalar(3, x=Fraction(1))
    assert report.pole and report.value is None
    assert intertwining_scalar(3, s=0).pole
    with pytest.raises(ValueError):
        intertwining_scalar(3)
    with pytest.raises(ValueError):
        intertwining_scalar(3, s=1, x=Fraction(1, 3))
