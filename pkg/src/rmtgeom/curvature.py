"""Energy-level curvature (second derivative in the coupling) and the third
derivative: direct spectral sums, 2x2 closed forms, and Monte Carlo.

The curvature convention absorbs the conventional factor 2:
K_n = (1/2) d^2 E_n/dr^2 = sum_{j != n} |P_nj|^2/(E_n - E_j); summed over all
levels it vanishes identically. The Cauchy transform of the per-state
spectral function gives back K_n at the origin.
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from .geometry import degeneracy_threshold
from .prng import stream
from .spectra import SpectralData, to_eigenbasis

__all__ = [
    "level_curvature", "curvature_closed", "curvature_mc",
    "third_derivative", "cauchy_chi",
]


def level_curvature(spectral: SpectralData, perturbation, n: int) -> float:
    """K_n = sum_{j != n} |P_nj|^2 / (E_n - E_j)."""
    E = spectral.eigenvalues
    row = to_eigenbasis(spectral, perturbation)[n]
    dE = E[n] - E
    keep = np.arange(len(E)) != n
    return float(np.sum(np.abs(row[keep]) ** 2 / dE[keep]))


def curvature_closed(beta: int, r: float) -> float:
    """Ensemble-averaged upper-level curvature for the 2x2 tridiagonal family.

    Closed forms exist at beta = 2 and beta = 4; both diverge like log r as
    r -> 0 and vanish at large r.
    """
    if r <= 0:
        raise ValueError("closed form diverges logarithmically at r = 0; need r > 0")
    if beta == 2:
        return (math.acosh(4.0 / r**2 + 1.0)
                - 2.0 * math.sqrt(2.0) / math.sqrt(2.0 + r * r)) / (4.0 * math.sqrt(math.pi))
    if beta == 4:
        return ((8.0 + 3.0 * r * r) * math.acosh(8.0 / r**2 + 1.0)
                - 12.0 * math.sqrt(4.0 + r * r)) / (32.0 * math.sqrt(math.pi))
    raise ValueError(f"closed form available for beta in (2, 4); got {beta}")


def curvature_mc(beta: float, r: float, realizations: int,
                 master_seed: int = 0, batches: int = 10,
                 level: int = 1) -> Tuple[float, float]:
    """Monte-Carlo average of the level curvature for the 2x2 beta family.

    H = diag(h1, h2) + r T with h iid N(0,1) and T the 2x2 tridiagonal
    beta-ensemble draw; level 1 is the upper eigenvalue (the paper's K2),
    level 0 the lower. Returns (mean, batch-means stderr).
    """
    if realizations < 1000:
        raise ValueError("need at least 1e3 realizations")
    if beta <= 0:
        raise ValueError("beta must be positive")
    batches = max(10, batches)
    per = realizations // batches
    means = []
    for i in range(batches):
        gen = stream(master_seed, i, slot=5)
        h = gen.normal(0.0, 1.0, (per, 2))
        a = gen.normal(0.0, math.sqrt(1.0 / beta), (per, 2))
        b = np.sqrt(gen.gamma(beta / 2.0, 2.0, per)) / math.sqrt(2.0 * beta)
        H = np.zeros((per, 2, 2))
        H[:, 0, 0] = h[:, 0] + r * a[:, 0]
        H[:, 1, 1] = h[:, 1] + r * a[:, 1]
        H[:, 0, 1] = H[:, 1, 0] = r * b
        vals, vecs = np.linalg.eigh(H)
        P01 = (vecs[:, 0, 0] * a[:, 0] * vecs[:, 0, 1]
               + vecs[:, 1, 0] * a[:, 1] * vecs[:, 1, 1]
               + b * (vecs[:, 0, 0] * vecs[:, 1, 1] + vecs[:, 1, 0] * vecs[:, 0, 1]))
        gap = vals[:, 1] - vals[:, 0]
        sign = 1.0 if level == 1 else -1.0
        means.append(np.mean(sign * np.abs(P01) ** 2 / gap))
    bm = np.array(means)
    return float(bm.mean()), float(bm.std(ddof=1) / np.sqrt(batches))


def third_derivative(spectral: SpectralData, perturbation, n: int) -> float:
    """L_n = (1/6) d^3 E_n/dr^3 as a double spectral sum.

    sum_{k,m != n} P_kn P_nm P_mk/(E_nk E_nm) - P_nn sum_{k != n} |P_nk|^2/E_nk^2,
    E_nk = E_n - E_k; the subtracted term is P_nn times the per-state FS.
    """
    E = spectral.eigenvalues
    A = to_eigenbasis(spectral, perturbation)
    N = len(E)
    keep = np.arange(N) != n
    Enk = E[n] - E[keep]
    x = A[keep, n] / Enk                 # P_kn / E_nk
    y = A[n, keep] / Enk                 # P_nm / E_nm
    sub = A[np.ix_(keep, keep)]
    t1 = y @ (sub @ x)                   # sum_{k,m} x_k y_m P_mk
    fs = np.sum(np.abs(A[n, keep]) ** 2 / Enk**2)
    val = t1 - A[n, n] * fs
    if abs(np.imag(val)) > 1e-10 * max(1.0, abs(np.real(val))):
        raise AssertionError("third derivative came out non-real")
    return float(np.real(val))


def cauchy_chi(spectral: SpectralData, perturbation, n: int, z: float) -> float:
    """Cauchy transform chi(z) = sum_{j != n} |P_nj|^2 / (z - (E_j - E_n)).

    chi(0) = K_n. Evaluation within eps_deg of a pole is refused.
    """
    E = spectral.eigenvalues
    row = to_eigenbasis(spectral, perturbation)[n]
    keep = np.arange(len(E)) != n
    gaps = E[keep] - E[n]
    eps = degeneracy_threshold(E)
    if np.min(np.abs(z - gaps)) < eps:
        raise ValueError(f"z = {z} is within eps_deg of a spectral gap")
    return float(np.sum(np.abs(row[keep]) ** 2 / (z - gaps)))
