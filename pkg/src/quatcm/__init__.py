"""Exact arithmetic for quaternionic Shimura-curve CM data and supersingular prime search."""

__version__ = "0.1.0"
