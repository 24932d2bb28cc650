"""Uniform asymptotic evaluation of reverse generalised Bessel polynomials."""

__version__ = "0.1.0"
