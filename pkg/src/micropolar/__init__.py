"""Composite waves of the one-dimensional inviscid compressible micropolar fluid model."""

__version__ = "0.1.0"
