"""Exponential maps and rigidity of Pham-Brieskorn rings."""

__version__ = "0.1.0"
