"""Reduction types of curves: chains, fibres, enumeration and canonical labels."""

__version__ = "0.1.0"
