"""wrkit: waveform relaxation solvers for 1D/2D heat and wave equations.

The package couples non-overlapping subdomain solves through interface
traces in time (Dirichlet values, Neumann fluxes, or Robin combinations),
iterating until the traces settle. It ships the Dirichlet-Neumann method
with three sweep orderings, Neumann-Neumann and Schwarz comparators,
closed-form convergence envelopes, projection between non-matching time
grids, and a benchmark harness with a CLI (``wrkit``).
"""

from . import bounds, errors, grids, kernels, methods, projection

__all__ = ["bounds", "errors", "grids", "kernels", "methods", "projection"]

__version__ = "0.1.0"
