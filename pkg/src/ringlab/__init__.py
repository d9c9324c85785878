"""Finite rings, modules and chain complexes, with exact deciders for the
generating hypothesis on perfect complexes."""

__version__ = "0.1.0"
