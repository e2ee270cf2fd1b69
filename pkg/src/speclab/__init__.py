"""Bound-state counting for two-dimensional Schroedinger operators.

Orlicz norms, annular profiles, right-hand sides of the competing eigenvalue
estimates, one-dimensional eigencounts and the named example potentials.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
