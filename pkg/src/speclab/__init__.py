"""Eigenvalue profiles of discrete concentration operators and the geometry of their deviation bounds."""

__version__ = "0.1.0"
