"""Exact special values of zeta functions of varieties over finite fields,
checked against higher Chow group and weight homology data."""

__version__ = "0.1.0"
