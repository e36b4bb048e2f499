"""Shared fixtures: the standard fields and their canonical extensions."""

from __future__ import annotations

import pytest

from src.sl2_endoscopy.arith.local_field import LocalField
from src.sl2_endoscopy.arith.parsing import parse_field_spec
from src.sl2_endoscopy.quad_ext import ExtKind, QuadExt, canonical_ext

FIELDS = {
    "Q2": "Qp:p=2,prec=12",
    "Q3": "Qp:p=3,prec=12",
    "Q5": "Qp:p=5,prec=12",
    "F2": "Fq:p=2,f=1,prec=20",
    "F4": "Fq:p=2,f=2,prec=20",
}


def make_field(name: str) -> LocalField:
    return parse_field_spec(FIELDS[name])


def make_ext(name: str, kind: str, variant: int = 0) -> QuadExt:
    return canonical_ext(make_field(name), ExtKind(kind), variant)


@pytest.fixture
def q3() -> LocalField:
    return make_field("Q3")


@pytest.fixture
def q2() -> LocalField:
    return make_field("Q2")


@pytest.fixture
def f2() -> LocalField:
    return make_field("F2")


@pytest.fixture
def f4() -> LocalField:
    return make_field("F4")


@pytest.fixture
def q3_unramified() -> QuadExt:
    return make_ext("Q3", "unramified")


@pytest.fixture
def q3_ramified() -> QuadExt:
    return make_ext("Q3", "ramified")


@pytest.fixture
def f2_unramified() -> QuadExt:
    return make_ext("F2", "unramified")
