"""Exact finite-dimensional machinery for equivariant Brill–Noether theory."""

__version__ = "0.1.0"
