"""Exact computations for the rational Cherednik algebra of GL_2(F_p) acting on its
two-dimensional reflection representation."""

__version__ = "0.1.0"
