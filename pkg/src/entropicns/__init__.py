"""Entropic characterisation of no-signalling and network correlations."""

__version__ = "0.1.0"
