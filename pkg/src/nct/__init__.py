"""Finite noncommutative topologies.

Validation of skew topology axioms, shadow lattices, completions and
point spectra, dynamical systems over finite time chains with moment
spaces, presheaves valued in finite-dimensional rational vector spaces,
spectral families and observables, and subspace lattices of exact
rational operators.  The submodules are the public surface; import them
directly (``nct.core``, ``nct.spectral``, ...).  The ``nct`` console
script fronts the same machinery over ``.nct`` model documents.
"""

__version__ = "0.1.0"
