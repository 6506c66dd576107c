"""Spectral laboratory for fourth-order NLS on the torus."""

__version__ = "0.1.0"
