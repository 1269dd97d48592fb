"""Persistent local systems and toroidal cycles of periodic cell complexes."""

__version__ = "0.1.0"
