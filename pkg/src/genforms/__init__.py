"""Generalized quadratic forms over real quadratic fields and their associated integer forms."""

__version__ = "0.1.0"
