"""Exact constructions of Frobenius manifolds on extended affine Weyl orbit spaces."""

from .laurent import QQ, Poly, E_SYMBOL

__all__ = ["QQ", "Poly", "E_SYMBOL"]

__version__ = "0.1.0"
