"""Exact computations with toric modular forms, Manin symbols and Hecke operators."""

__version__ = "0.1.0"
