"""Numerical laboratory for Hankel matrices in Schatten classes and Besov norms
of analytic symbols."""

__version__ = "0.1.0"
