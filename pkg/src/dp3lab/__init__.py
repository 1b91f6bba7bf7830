"""Exact and numerical laboratory for the odd degenerate Painleve III solution vanishing at the origin."""

__version__ = "0.1.0"
