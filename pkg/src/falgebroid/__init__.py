"""Exact verification of Frobenius manifolds, F-algebroids and almost duality."""

__version__ = "0.1.0"
