"""Spectral analysis of max-times matrices and discretised max-kernel operators."""

__version__ = "0.1.0"
