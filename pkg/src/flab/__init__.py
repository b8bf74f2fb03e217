"""Exact computation of the f-invariant for free-group actions."""

__version__ = "0.1.0"
