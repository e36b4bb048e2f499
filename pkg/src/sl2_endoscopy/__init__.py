"""Exact local endoscopy for SL(2) over non-archimedean local fields."""

__version__ = "0.1.0"
