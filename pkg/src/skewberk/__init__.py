"""Skew products on the Berkovich projective line over Puiseux series."""

__version__ = "0.1.0"
