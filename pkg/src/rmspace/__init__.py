"""Numerical toolkit for average radial integrability spaces and integration operators."""

__version__ = "0.1.0"
