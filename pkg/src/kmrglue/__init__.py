"""Numerical toolkit for KMR, Scherk-type and catenoidal end models and their gluing."""

__version__ = "0.1.0"
