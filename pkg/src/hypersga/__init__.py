"""Spectrum-generating algebra so(4,2) of the free particle on H^3."""

__version__ = "0.1.0"
