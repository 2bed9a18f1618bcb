"""Stabilization towers of variation and monodromy operators from transversal-slice data."""

__version__ = "0.1.0"
