"""Exact q-expansions of half-integral weight forms and their sign statistics."""

__version__ = "0.1.0"
