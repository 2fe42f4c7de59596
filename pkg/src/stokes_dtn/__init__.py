"""Numerical lab for the half-plane Stokes Dirichlet-to-Neumann map."""

__version__ = "0.1.0"
