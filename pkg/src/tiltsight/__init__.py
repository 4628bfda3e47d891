"""Tiltsight: cluster categories of type A, their quotients by cluster-tilting objects, and the modules they become."""

__all__ = ["__version__"]
__version__ = "0.1.0"
