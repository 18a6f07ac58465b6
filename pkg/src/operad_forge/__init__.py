"""Exact verification of DG operad presentations, homotopies and BV-type algebras."""

__version__ = "0.1.0"
