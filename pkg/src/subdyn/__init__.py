"""Finite-window machinery for subshifts over free groups, lattices and products."""

__version__ = "0.1.0"
