"""Finite-model toolkit for reduced products, coordinatization criteria and graph products."""
__version__ = "0.1.0"
