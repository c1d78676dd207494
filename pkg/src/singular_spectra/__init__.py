"""Spectrum of the singular harmonic operator on (0, 1) and a-zeros of Kummer functions."""

__version__ = "0.1.0"
