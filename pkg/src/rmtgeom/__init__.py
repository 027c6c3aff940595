"""rmtgeom: state-space geometry of random-matrix Hamiltonian families.

Samples the ensembles, estimates quantum-metric/fidelity-susceptibility
components by Monte Carlo, evaluates every closed form alongside, computes
spectral form factors and perturbation correlators, integrates geodesics,
and reproduces the reference figures as CSV data through the CLI.
"""

from . import (correlators, curvature, ensembles, geodesics, geometry,
               numerics, prng, spectra)

__all__ = ["correlators", "curvature", "ensembles", "geodesics", "geometry",
           "numerics", "prng", "spectra"]
__version__ = "0.1.0"
