"""Symmetric-hyperbolic Maxwell fluids and compressible elastodynamics in 2D."""

__version__ = "0.1.0"
