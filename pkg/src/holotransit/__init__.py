"""Finite-horizon decisions on disjoint F-transitivity of composition operators."""

__version__ = "0.1.0"
