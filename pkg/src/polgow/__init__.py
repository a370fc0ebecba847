"""Finite groups, quadratic maps into abelian extensions, and matrix Gowers norms."""

__version__ = "0.1.0"
