"""Hermitian eigendecomposition, spectral form factor, spectral-function moments.

The eigensolvers wrap LAPACK (dense Hermitian and real symmetric tridiagonal
drivers) and add the package-wide deterministic phase convention: in every
eigenvector the largest-magnitude component is made real and positive, so
seeded runs are byte-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import scipy.linalg

from .ensembles import EnsembleSpec, FamilySpec, HamiltonianFamily, Tridiagonal, sample
from .prng import stream

__all__ = [
    "SpectralData", "SpectralFunctionMoments", "SffSeries",
    "eigh", "eigh_tridiagonal", "decompose", "to_eigenbasis",
    "sff", "sff_time_grid", "spectral_moments", "moments",
]

HERMITICITY_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralData:
    """Ascending eigenvalues and the matching unitary eigenvector matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def residual(self, H: np.ndarray) -> float:
        """max_n ||H v_n - E_n v_n||_2, for solver verification."""
        R = H @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return float(np.linalg.norm(R, axis=0).max())


@dataclass(frozen=True)
class SpectralFunctionMoments:
    state: int
    order: int
    value: float


@dataclass(frozen=True)
class SffSeries:
    """Spectral form factor R(t) = E|Tr exp(-iHt)|^2 with standard errors."""

    t: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    realizations: int


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vecs), axis=0)
    lead = vecs[idx, np.arange(vecs.shape[1])]
    mag = np.abs(lead)
    mag[mag == 0] = 1.0
    return vecs * (mag / lead)  # conj-phase rotation per column


def eigh(H: np.ndarray) -> SpectralData:
    """Full decomposition of a Hermitian matrix, eigenvalues ascending.

    Raises on visibly non-Hermitian input (relative asymmetry above 1e-12)
    and converts LAPACK non-convergence into a numeric error.
    """
    H = np.asarray(H)
    scale = np.abs(H).max()
    if scale > 0 and np.abs(H - H.conj().T).max() > HERMITICITY_RTOL * scale:
        raise ValueError("matrix is not Hermitian within 1e-12 relative")
    try:
        vals, vecs = np.linalg.eigh(H)
    except np.linalg.LinAlgError as err:  # pragma: no cover - rare
        raise ArithmeticError(f"eigensolver failed to converge: {err}") from err
    return SpectralData(vals, _fix_phases(vecs))


def eigh_tridiagonal(diag: np.ndarray, offdiag: np.ndarray) -> SpectralData:
    """Same contract as eigh for a real symmetric tridiagonal matrix.

    O(N^2) with eigenvectors via the implicit-shift tridiagonal driver;
    never forms the dense matrix.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    if len(offdiag) != len(diag) - 1:
        raise ValueError("offdiag must have length len(diag) - 1")
    if len(diag) == 1:
        return SpectralData(diag.copy(), np.ones((1, 1)))
    try:
        vals, vecs = scipy.linalg.eigh_tridiagonal(diag, offdiag)
    except Exception as err:
        raise ArithmeticError(f"tridiagonal eigensolver failed: {err}") from err
    return SpectralData(vals, _fix_phases(vecs))


def decompose(H) -> SpectralData:
    """eigh / eigh_tridiagonal dispatch on the matrix representation."""
    if isinstance(H, Tridiagonal):
        return eigh_tridiagonal(H.diag, H.offdiag)
    return eigh(H)


def to_eigenbasis(spectral: SpectralData, A) -> np.ndarray:
    """Matrix elements <m|A|n> of an operator in the eigenbasis."""
    if isinstance(A, Tridiagonal):
        V = spectral.eigenvectors
        # band structure: A V = diag*V + shifted off-diagonal contributions
        AV = A.diag[:, None] * V
        AV[:-1] += A.offdiag[:, None] * V[1:]
        AV[1:] += A.offdiag[:, None] * V[:-1]
        return V.conj().T @ AV
    return spectral.eigenvectors.conj().T @ np.asarray(A) @ spectral.eigenvectors


def sff_time_grid(t_min: float, t_max: float, num: int) -> np.ndarray:
    """Default geometric (log-uniform) grid, matching log-log figures."""
    return np.geomspace(t_min, t_max, num)


def sff(spec: Union[EnsembleSpec, FamilySpec], t: np.ndarray,
        realizations: int, master_seed: int = 0) -> SffSeries:
    """Monte-Carlo spectral form factor on the grid t.

    R(t) = E |sum_n exp(-i E_n t)|^2; depends on eigenvalues only, so the
    phase convention is irrelevant here. One derived stream per realization.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if not np.all(np.isfinite(t)):
        raise ValueError("t grid must be finite")
    if realizations < 1:
        raise ValueError("need at least one realization")
    acc = np.zeros((realizations, len(t)))
    for m in range(realizations):
        H = _realize(spec, master_seed, m)
        if isinstance(H, Tridiagonal):
            evals = scipy.linalg.eigh_tridiagonal(H.diag, H.offdiag,
                                                  eigvals_only=True)
        else:
            evals = np.linalg.eigvalsh(H)
        z = np.exp(-1j * np.outer(t, evals)).sum(axis=1)
        acc[m] = np.abs(z) ** 2
    mean = acc.mean(axis=0)
    stderr = acc.std(axis=0, ddof=1) / np.sqrt(realizations) if realizations > 1 \
        else np.zeros_like(mean)
    return SffSeries(t, mean, stderr, realizations)


def _realize(spec, master_seed: int, m: int):
    if isinstance(spec, FamilySpec):
        return spec.realize(master_seed, m)
    return sample(spec, stream(master_seed, m))


def moments(spectral: SpectralData, perturbation, n: int,
            orders: Sequence[int]) -> list[SpectralFunctionMoments]:
    """M_k = sum_{j != n} |<n|P|j>|^2 (E_j - E_n)^k for each k in orders.

    M_{-2} is the per-state fidelity susceptibility, M_{-1} = -K_n (level
    curvature), M_0 the perturbation variance in state n. Orders are
    restricted to |k| <= 4.
    """
    for k in orders:
        if abs(int(k)) > 4:
            raise ValueError(f"moment order {k} outside supported range |k| <= 4")
    E = spectral.eigenvalues
    row = to_eigenbasis(spectral, perturbation)[n]
    w2 = np.abs(row) ** 2
    dE = E - E[n]
    keep = np.arange(len(E)) != n
    out = []
    for k in orders:
        out.append(SpectralFunctionMoments(
            state=n, order=int(k),
            value=float(np.sum(w2[keep] * dE[keep] ** float(k)))))
    return out


def spectral_moments(family: HamiltonianFamily, r: float, phi: float, n: int,
                     orders: Sequence[int]) -> list[SpectralFunctionMoments]:
    """Moments of the perturbation spectral function for one family point.

    Diagonalizes H(r, phi) and uses dH/dr as the perturbation operator.
    """
    spectral = decompose(family.evaluate(r, phi))
    return moments(spectral, family.d_dr(phi), n, orders)
