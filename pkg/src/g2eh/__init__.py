"""Desk-scale verification library for G2/hyperKahler pointwise algebra,
the Eguchi-Hanson family, fibre elliptic solves, gluing-region torsion
exponents, and resolution Betti numbers."""

__version__ = "0.1.0"
