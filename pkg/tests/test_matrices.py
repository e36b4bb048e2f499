from __future__ import annotations

from fractions import Fraction

import pytest

from src.sl2_endoscopy.matrices import (
    Mat2,
    TestFunction,
    embed,
    embed_torus_elem,
    first_nonnorm,
    hecke_eval,
    marker,
    stable_class_split,
)
from src.sl2_endoscopy.quad_ext import canonical_ext
from src.sl2_endoscopy.utils.exceptions import ExtensionError, RegularityError
from tests.conftest import make_ext

# norm-one elements a + b tau with b != 0 for each canonical torus
NORM_ONE = {
    ("Q3", "ramified"): (2, 1),
    ("Q3", "unramified"): (3, 2),
    ("F2", "unramified"): (0, 1),
}


def norm_one(field: str, kind: str):
    E = make_ext(field, kind)
    return E, E.element(*NORM_ONE[(field, kind)])


def test_matrix_algebra(q3):
    M = Mat2.of(q3, 2, 1, 1, 1)
    N = Mat2.of(q3, 1, 3, 0, 1)
    assert M.det() == 1
    assert (M * N).det() == M.det() * N.det()
    assert M * M.inverse() == Mat2.identity(q3)
    assert (M * N).trace() == 6


def test_min_valuation_and_integrality(q3):
    M = Mat2.of(q3, "pi", "1/3", 0, 1)
    assert M.min_valuation() == -1
    assert not M.is_integral()
    assert Mat2.identity(q3).is_integral()


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_hecke_eval_reads_the_cell(q3, r):
    f = TestFunction(((0, 1), (1, 2), (2, 3), (3, 4)))
    pi = q3.uniformizer()
    M = Mat2.diag(pi**r, pi**-r)
    assert hecke_eval(f, M) == r + 1


def test_hecke_eval_on_unipotents(q3):
    f = TestFunction.cell(2, Fraction(1, 2))
    assert hecke_eval(f, Mat2.of(q3, 1, "1/9", 0, 1)) == Fraction(1, 2)
    assert hecke_eval(f, Mat2.of(q3, 1, "1/3", 0, 1)) == 0


def test_hecke_eval_needs_determinant_one(q3):
    with pytest.raises(ValueError):
        hecke_eval(TestFunction.unit(), Mat2.of(q3, 2, 0, 0, 1))


def test_test_function_normalizes_cells():
    f = TestFunction(((2, 1), (0, Fraction(1, 2)), (2, -1), (1, 3)))
    assert f.cells == ((0, Fraction(1, 2)), (1, Fraction(3)))
    assert f.r_max == 1
    assert f.coeff(5) == 0
    assert f.label == "0:1/2,1:3"
    assert TestFunction(()).label == "0"
    with pytest.raises(ValueError):
        TestFunction(((-1, 1),))


def test_embedding_is_a_ring_map(q3_ramified):
    E = q3_ramified
    x, y = E.element(1, 2), E.element(2, 1)
    assert embed(x * y) == embed(x) * embed(y)
    assert embed(x).det() == x.norm()
    assert embed(x).trace() == x.trace()
    assert embed(E.tau).c == 1


def test_embedding_into_sl_needs_norm_one(q3_ramified):
    with pytest.raises(ValueError):
        embed_torus_elem(q3_ramified, q3_ramified.element(1, 1))
    M = embed_torus_elem(q3_ramified, q3_ramified.element(1, 1), sl=False)
    assert M.det() == -2


@pytest.mark.parametrize("key", sorted(NORM_ONE))
def test_stable_class_splits_into_two_rational_classes(key):
    E, t = norm_one(*key)
    split = stable_class_split(E, t)
    first, second = split.representatives
    assert [c.marker for c in split.classes] == [1, -1]
    assert marker(E, first) == 1
    assert marker(E, second) == -1
    assert first.trace() == second.trace()
    assert first.det() == 1 and second.det() == 1
    assert E.epsilon(split.nonnorm) == -1


def test_rational_classes_are_gl_conjugate():
    E, t = norm_one("Q3", "ramified")
    split = stable_class_split(E, t)
    M = embed(t)
    s = split.nonnorm
    F = E.base
    twisted = M.conjugate_by(Mat2.diag(F.one(), s.inverse()))
    assert any(twisted == rep for rep in split.representatives)


def test_first_nonnorm(q3_ramified, q3_unramified):
    assert first_nonnorm(q3_ramified) == 2
    assert first_nonnorm(q3_unramified) == 3


@pytest.mark.parametrize("variant", range(6))
def test_first_nonnorm_over_q2(variant):
    E = make_ext("Q2", "ramified", variant)
    assert E.epsilon(first_nonnorm(E)) == -1


def test_split_torus_and_central_elements_are_refused(q3, q3_ramified):
    E = canonical_ext(q3, "split")
    with pytest.raises(ExtensionError):
        stable_class_split(E, E.element(1, 1))
    with pytest.raises(RegularityError):
        stable_class_split(q3_ramified, q3_ramified.element(1))
    with pytest.raises(RegularityError):
        marker(q3_ramified, Mat2.identity(q3))
