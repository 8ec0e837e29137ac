"""Planar-fault forward operator in half-space elasticity."""
__version__ = "0.1.0"
