"""Compressed modes and compressed plane waves for 1D periodic Schrodinger operators."""

__version__ = "0.1.0"
