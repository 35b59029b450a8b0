"""Finite monoids, stamps and regular languages, with two decision
procedures for membership in the joins ``V ∨ LI``."""

__version__ = "0.1.0"
