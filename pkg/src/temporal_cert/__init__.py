"""Certification toolkit for temporal quantum correlations."""

__version__ = "0.1.0"
