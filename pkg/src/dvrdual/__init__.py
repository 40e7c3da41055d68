"""Duality computations for modules over compact discrete valuation rings."""

__version__ = "0.1.0"
