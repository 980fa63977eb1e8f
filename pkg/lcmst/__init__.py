"""Bicriteria length-constrained spanning and Steiner trees on planar graphs."""

__version__ = "0.1.0"
