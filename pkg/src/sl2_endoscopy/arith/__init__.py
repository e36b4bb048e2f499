"""Residue fields, local fields, squares, cyclotomic values and spec parsing."""

from src.sl2_endoscopy.arith.cyclo import CycloValue
from src.sl2_endoscopy.arith.local_field import LaurentField, LocalElem, LocalField, PadicField
from src.sl2_endoscopy.arith.parsing import parse_element, parse_field_spec
from src.sl2_endoscopy.arith.residue_field import ResidueField, get_residue_field

__all__ = [
    "CycloValue",
    "LocalField",
    "LocalElem",
    "PadicField",
    "LaurentField",
    "ResidueField",
    "get_residue_field",
    "parse_field_spec",
    "parse_element",
]
