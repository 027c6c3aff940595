"""Two-point correlator of the perturbation operator and its exact routes.

Three ways to the same curve: direct Monte Carlo over realizations, the
exact finite-N expression through the spectral form factor, and the
large-N free-probability form. Also the resolvent-based disconnected FS
and the FS-from-spectra pair-sum estimator that closes the
correlator -> SFF -> FS chain.

Conventions: G(t) = (1/N) E Tr(P(t) P) with P the unit-variance-sum GUE
perturbation (G(0) = N sigma^2 = 1 at sigma^2 = 1/N). `scaled_evolution`
switches the time evolution to the unit-variance rescaled Hamiltonian
H/alpha, alpha = sigma sqrt(r^2+1); the free-probability expression lives
natively in that scaled frame and carries the conventional extra r^2
(it is the correlator of V = r P). The spectral-function normalization
follows the source convention with the 1/(2 pi) absorbed, so no loose
2 pi factors appear in the moment identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.integrate

from .ensembles import EnsembleSpec, FamilySpec
from .numerics import bessel_j1
from .prng import stream
from .spectra import SffSeries, sff

__all__ = [
    "CorrelatorSeries", "correlator_mc", "correlator_exact",
    "correlator_exact_scaled", "correlator_free", "box_sff",
    "disconnected_fs", "virial_expectation", "pair_sum_fs", "fs_from_sff",
]

IMAG_TOL = 1e-10


@dataclass(frozen=True)
class CorrelatorSeries:
    """Correlator estimates on a shared time grid, plus run metadata."""

    t: np.ndarray
    mc: Optional[np.ndarray] = None
    mc_stderr: Optional[np.ndarray] = None
    exact: Optional[np.ndarray] = None
    free: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)


def correlator_mc(N: int, r: float, sigma2: float, t: np.ndarray,
                  realizations: int, master_seed: int = 0,
                  scaled_evolution: bool = False) -> CorrelatorSeries:
    """Monte-Carlo G(t) = (1/N) E sum_{nm} |P_nm|^2 exp(i (E_n - E_m) t).

    H0 and the perturbation P are independent GUE(sigma2); the eigenbasis
    of H = H0 + r P supplies the matrix elements. With scaled_evolution the
    phases use the eigenvalues of H/alpha instead.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    alpha = math.sqrt(sigma2 * (r * r + 1.0))
    acc = np.zeros((realizations, len(t)))
    spec = EnsembleSpec("GUE", N, sigma2)
    for m in range(realizations):
        H0 = _gue(spec, stream(master_seed, m, 0))
        P = _gue(spec, stream(master_seed, m, 1))
        E, V = np.linalg.eigh(H0 + r * P)
        if scaled_evolution:
            E = E / alpha
        A2 = np.abs(V.conj().T @ P @ V) ** 2
        phases = np.exp(1j * np.outer(E, t))          # p[n, i] = e^{i E_n t_i}
        G = np.einsum("ni,nm,mi->i", phases, A2, phases.conj()) / N
        if np.abs(G.imag).max() > IMAG_TOL:
            raise AssertionError("correlator picked up a non-negligible "
                                 f"imaginary part: {np.abs(G.imag).max():.2e}")
        acc[m] = G.real
    mean = acc.mean(axis=0)
    se = acc.std(axis=0, ddof=1) / np.sqrt(realizations) if realizations > 1 \
        else np.zeros_like(mean)
    return CorrelatorSeries(t=t, mc=mean, mc_stderr=se,
                            meta={"N": N, "r": r, "sigma2": sigma2,
                                  "M": realizations, "seed": master_seed,
                                  "scaled": scaled_evolution})


def _gue(spec, gen):
    from .ensembles import sample_gue
    return sample_gue(spec, gen)


def _interp_loglinear(t_query: np.ndarray, t_grid: np.ndarray,
                      values: np.ndarray) -> np.ndarray:
    """Linear-in-log-t interpolation rule for SFF grid mismatches."""
    if np.any(t_query <= 0) or np.any(t_grid <= 0):
        return np.interp(t_query, t_grid, values)
    return np.interp(np.log(t_query), np.log(t_grid), values)


def _sff_at(series: SffSeries, t_query: np.ndarray) -> np.ndarray:
    tq = np.atleast_1d(np.asarray(t_query, dtype=float))
    grid = series.t
    if len(tq) == len(grid) and np.allclose(tq, grid, rtol=1e-12, atol=0.0):
        return series.mean
    lo, hi = grid.min(), grid.max()
    if np.any(tq < lo * (1 - 1e-9)) or np.any(tq > hi * (1 + 1e-9)):
        raise ValueError("requested times fall outside the measured SFF grid")
    return _interp_loglinear(tq, grid, series.mean)


def correlator_exact(N: int, r: float, t: np.ndarray,
                     sff_prime: SffSeries) -> np.ndarray:
    """Exact finite-N correlator G(t) = (R(t sqrt(r^2+1))/N^2 + r^2)/(r^2+1).

    sff_prime is the form factor of the variance-sigma^2 matrix
    H' = H/sqrt(r^2+1), measured on (or interpolated to, linearly in log t)
    the rescaled grid t sqrt(r^2+1).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    R = _sff_at(sff_prime, t * math.sqrt(r * r + 1.0))
    return (R / N**2 + r * r) / (r * r + 1.0)


def correlator_exact_scaled(N: int, r: float, t: np.ndarray, sff_prime: SffSeries,
                            sigma2: Optional[float] = None) -> np.ndarray:
    """Scaled-Hamiltonian variant: r^2 N sigma^2/(r^2+1) (R~(t)/N^2 + r^2).

    Shares the H' form factor with correlator_exact through the change of
    variables R~(t) = R'(t/sigma); the two variants agree identically after
    t -> t/alpha.
    """
    sigma2 = 1.0 / N if sigma2 is None else sigma2
    t = np.atleast_1d(np.asarray(t, dtype=float))
    R = _sff_at(sff_prime, t / math.sqrt(sigma2))
    return r * r * N * sigma2 / (r * r + 1.0) * (R / N**2 + r * r)


def correlator_free(N: int, r: float, t) -> np.ndarray:
    """Large-N free-probability correlator of V = r P (scaled evolution).

    (r^2/(r^2+1)) ((0F1~(2; -N t^2))^2 + r^2), with the regularized 0F1
    evaluated as J1(2 sqrt(N) t)/(sqrt(N) t), value 1 at t = 0.
    """
    t = np.asarray(t, dtype=float)
    x = np.sqrt(N) * t
    with np.errstate(invalid="ignore"):
        f = np.where(x == 0.0, 1.0,
                     np.array([bessel_j1(2.0 * xi) / xi if xi > 0 else 1.0
                               for xi in np.atleast_1d(x)]).reshape(np.shape(x)))
    val = r * r / (r * r + 1.0) * (f**2 + r * r)
    return float(val) if np.ndim(t) == 0 else val


def box_sff(N: int, t_prime) -> np.ndarray:
    """Box-approximation form factor N + N^2 (J1(2t')/t')^2 - N r2(t').

    r2(t') = 1 - t'/(2N) until t' = 2N, zero after; the t' = 0 limit of the
    Bessel factor is 1, giving N^2 exactly.
    """
    tp = np.asarray(t_prime, dtype=float)
    if np.any(tp < 0):
        raise ValueError("t' must be >= 0")
    flat = np.atleast_1d(tp)
    bess = np.array([1.0 if x == 0 else bessel_j1(2.0 * x) / x for x in flat])
    r2 = np.where(flat < 2.0 * N, 1.0 - flat / (2.0 * N), 0.0)
    val = N + N**2 * bess**2 - N * r2
    return float(val[0]) if np.ndim(t_prime) == 0 else val.reshape(np.shape(tp))


def _semicircle_density(E):
    return np.sqrt(np.maximum(0.0, 4.0 - E * E)) / (2.0 * math.pi)


def disconnected_fs(r: float) -> float:
    """Disconnected (N-independent) part of the averaged FS, -1/(2(r^2+1)^2).

    Evaluated through the resolvent route: -(r^2+1)^{-2} integral of
    rho(E) Re G'(E) over the semicircle support, with
    G(x) = (x - sqrt(x^2-4))/2 continued onto the cut.
    """
    if r < 0:
        raise ValueError("need r >= 0")

    def re_gprime(E):
        # on the cut sqrt(E^2-4) = i sqrt(4-E^2): x/sqrt(x^2-4) is imaginary
        z = complex(E, 0.0)
        return (1.0 - z / np.sqrt(z * z - 4.0 + 0j)).real / 2.0

    val, _ = scipy.integrate.quad(
        lambda E: _semicircle_density(E) * re_gprime(E), -2.0, 2.0, limit=200)
    return -val / (r * r + 1.0) ** 2


def virial_expectation(N: int, sigma_star2: float, beta: float = 2.0) -> float:
    """Dyson virial value of sum_{m != n} E[1/(E_n - E_m)^2]."""
    if beta <= 1:
        raise ValueError("virial expectation needs beta > 1")
    return N * (N - 1) / (2.0 * sigma_star2 * beta * (1.0 - 1.0 / beta))


def pair_sum_fs(eigenvalues: np.ndarray, N: int, r: float) -> float:
    """One realization's pair-sum FS estimate sum_{i!=j} dE^-2 / (N^2 (r^2+1)).

    eigenvalues are those of the unscaled total H = H0 + r P.
    """
    E = np.asarray(eigenvalues, dtype=float)
    dE = E[:, None] - E[None, :]
    np.fill_diagonal(dE, np.inf)
    return float(np.sum(1.0 / dE**2) / (N * N * (r * r + 1.0)))


def fs_from_sff(N: int, r: float, realizations: int, master_seed: int = 0,
                sigma2: Optional[float] = None,
                eigenvalues: Optional[Sequence[np.ndarray]] = None
                ) -> Tuple[float, float]:
    """Averaged FS reconstructed from the same spectra that feed the SFF.

    The omega-integral route reduces exactly to eigenvalue pair sums
    (no double Fourier integrals); the eigenvector factors integrate out of
    the ensemble average. Pass `eigenvalues` to reuse spectra from an sff()
    run with the same seed; otherwise realizations are drawn here from the
    GUE family H0 + r P at entry variance sigma2 (default 1/N).
    """
    if eigenvalues is None:
        if realizations < 2:
            raise ValueError("need at least two realizations")
        sigma2 = 1.0 / N if sigma2 is None else sigma2
        g = EnsembleSpec("GUE", N, sigma2)
        fam = FamilySpec(g, g, None, r=r)
        eigenvalues = [np.linalg.eigvalsh(fam.realize(master_seed, m))
                       for m in range(realizations)]
    vals = np.array([pair_sum_fs(E, N, r) for E in eigenvalues])
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(len(vals)))
