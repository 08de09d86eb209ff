"""Fuzz testing and delta debugging for answer set solvers."""

__version__ = "0.1.0"
