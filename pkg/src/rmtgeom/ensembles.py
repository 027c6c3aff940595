"""Random-matrix ensembles and parameterized Hamiltonian families.

Samplers for the ensembles used throughout: dense GUE, Gaussian diagonal
(Poisson statistics), the Dumitriu-Edelman real tridiagonal beta-ensemble,
a 2x2 rotation-invariant ensemble with an effective Dyson index, and Haar
2x2 unitaries. A family H(r, phi) = H0 + r cos(phi) H1 + r sin(phi) H2
bundles three realizations with its parameter chart.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .prng import SeedSpec, chi, gaussian, stream

__all__ = [
    "EnsembleSpec", "Tridiagonal", "HamiltonianFamily", "FamilySpec",
    "sample_gue", "sample_diagonal", "sample_tridiagonal_beta",
    "sample_invariant_eta", "sample_haar_2x2", "sample", "build_family",
]

KINDS = ("GUE", "DiagonalGaussian", "TridiagonalBeta", "InvariantEta2x2", "HaarBeta2x2")


@dataclass(frozen=True)
class EnsembleSpec:
    """Which ensemble, its dimension, and its distribution parameters.

    variance defaults to 1/N (the convention used for all dense GUE runs).
    dyson_beta applies to TridiagonalBeta and HaarBeta2x2; eta to
    InvariantEta2x2. The two 2x2 ensembles require dimension 2.
    """

    kind: str
    dim: int
    variance: Optional[float] = None
    dyson_beta: Optional[float] = None
    eta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}; expected one of {KINDS}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.kind in ("InvariantEta2x2", "HaarBeta2x2") and self.dim != 2:
            raise ValueError(f"{self.kind} requires dimension 2")
        if self.variance is not None and self.variance <= 0:
            raise ValueError("variance must be positive")
        if self.kind in ("TridiagonalBeta", "HaarBeta2x2"):
            if self.dyson_beta is None or self.dyson_beta <= 0:
                raise ValueError(f"{self.kind} requires dyson_beta > 0")
        if self.kind == "InvariantEta2x2":
            if self.eta is None or not (0.0 <= self.eta <= 1.0):
                raise ValueError("InvariantEta2x2 requires eta in [0, 1]")

    @property
    def sigma2(self) -> float:
        return self.variance if self.variance is not None else 1.0 / self.dim


@dataclass(frozen=True)
class Tridiagonal:
    """Real symmetric tridiagonal matrix stored as two vectors."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        if len(self.offdiag) != len(self.diag) - 1:
            raise ValueError("offdiag must have length dim - 1")

    @property
    def dim(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        H = np.diag(self.diag.astype(float))
        n = self.dim
        H[np.arange(n - 1), np.arange(1, n)] = self.offdiag
        H[np.arange(1, n), np.arange(n - 1)] = self.offdiag
        return H


MatrixLike = Union[np.ndarray, Tridiagonal]


def _combine(parts, coeffs):
    """Linear combination of matrices; stays tridiagonal when all parts are."""
    if all(isinstance(p, Tridiagonal) for p in parts):
        diag = sum(c * p.diag for c, p in zip(coeffs, parts))
        off = sum(c * p.offdiag for c, p in zip(coeffs, parts))
        return Tridiagonal(diag, off)
    dense = []
    for p in parts:
        dense.append(p.to_dense() if isinstance(p, Tridiagonal) else p)
    return sum(c * d for c, d in zip(coeffs, dense))


@dataclass(frozen=True)
class HamiltonianFamily:
    """H(r, phi) = H0 + r cos(phi) H1 + r sin(phi) H2 with chart (r, phi).

    H2 may be absent, in which case evaluate(r) = H0 + r H1 and the phi
    derivative is undefined.
    """

    H0: MatrixLike
    H1: MatrixLike
    H2: Optional[MatrixLike] = None

    def __post_init__(self):
        dims = {m.dim if isinstance(m, Tridiagonal) else m.shape[0]
                for m in (self.H0, self.H1, self.H2) if m is not None}
        if len(dims) != 1:
            raise ValueError(f"family members disagree on dimension: {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.H0.dim if isinstance(self.H0, Tridiagonal) else self.H0.shape[0]

    def evaluate(self, r: float, phi: float = 0.0) -> MatrixLike:
        if r < 0:
            raise ValueError("r must be >= 0")
        if self.H2 is None:
            return _combine((self.H0, self.H1), (1.0, r))
        return _combine((self.H0, self.H1, self.H2),
                        (1.0, r * np.cos(phi), r * np.sin(phi)))

    def d_dr(self, phi: float = 0.0) -> MatrixLike:
        """Perturbation operator dH/dr = cos(phi) H1 + sin(phi) H2."""
        if self.H2 is None:
            return self.H1
        return _combine((self.H1, self.H2), (np.cos(phi), np.sin(phi)))

    def d_dphi(self, r: float, phi: float = 0.0) -> MatrixLike:
        """dH/dphi = r (-sin(phi) H1 + cos(phi) H2)."""
        if self.H2 is None:
            raise ValueError("family has no H2; phi is not a parameter")
        return _combine((self.H1, self.H2), (-r * np.sin(phi), r * np.cos(phi)))


def sample_gue(spec: EnsembleSpec, gen: np.random.Generator) -> np.ndarray:
    """Dense GUE draw: E|H_ij|^2 = sigma^2 for every entry, Hermitian exactly.

    Diagonal N(0, sigma^2); off-diagonal real/imaginary parts independent
    N(0, sigma^2/2).
    """
    if spec.kind != "GUE":
        raise ValueError(f"spec.kind is {spec.kind}, not GUE")
    n, s2 = spec.dim, spec.sigma2
    d = gaussian(gen, 0.0, s2, size=n)
    re = gaussian(gen, 0.0, s2 / 2, size=(n, n))
    im = gaussian(gen, 0.0, s2 / 2, size=(n, n))
    upper = np.triu(re + 1j * im, 1)
    return upper + upper.conj().T + np.diag(np.asarray(d, dtype=float))


def sample_diagonal(spec: EnsembleSpec, gen: np.random.Generator) -> np.ndarray:
    """Diagonal matrix of iid N(0, 1) entries (Poisson level statistics)."""
    if spec.kind != "DiagonalGaussian":
        raise ValueError(f"spec.kind is {spec.kind}, not DiagonalGaussian")
    return np.diag(gaussian(gen, 0.0, 1.0, size=spec.dim))


def sample_tridiagonal_beta(spec: EnsembleSpec, gen: np.random.Generator) -> Tridiagonal:
    """Tridiagonal beta-ensemble draw.

    Diagonal a_n ~ N(0, 2/(beta N)); off-diagonal b_n chi-distributed with
    k = (N-n) beta degrees of freedom and scale 1/sqrt(beta N), n = 1..N-1,
    so the eigenvalue joint density carries the |E_i - E_j|^beta repulsion
    of the general-beta Gaussian ensemble.

    The diagonal variance 2/(beta N) is a reconstruction: it is the unique
    value consistent with both the beta=2 reduction to the GUE (entry
    variance 1/N) and the claimed eigenvalue joint density.
    """
    if spec.kind != "TridiagonalBeta":
        raise ValueError(f"spec.kind is {spec.kind}, not TridiagonalBeta")
    n, beta = spec.dim, float(spec.dyson_beta)
    diag = gaussian(gen, 0.0, 2.0 / (beta * n), size=n)
    ks = (n - np.arange(1, n)) * beta
    off = np.array([chi(gen, k, 1.0 / np.sqrt(beta * n)) for k in ks]) \
        if n > 1 else np.empty(0)
    return Tridiagonal(np.asarray(diag, dtype=float), off)


def _haar_angles(gen: np.random.Generator, size=None):
    # mixing angle density sin(2 theta) on [0, pi/2]: CDF sin^2, invert
    return np.arcsin(np.sqrt(gen.random(size)))


def sample_haar_2x2(gen: np.random.Generator) -> np.ndarray:
    """Haar-distributed 2x2 unitary.

    Parameterized by phases u1, u2 uniform on [0, 2pi) and a mixing angle
    theta with density sin(2 theta) on [0, pi/2]:

        [[ e^{i u1} cos t, -e^{i u2} sin t],
         [ e^{-i u2} sin t, e^{-i u1} cos t]]
    """
    u1, u2 = gen.uniform(0.0, 2 * np.pi, size=2)
    t = _haar_angles(gen)
    return np.array([
        [np.exp(1j * u1) * np.cos(t), -np.exp(1j * u2) * np.sin(t)],
        [np.exp(-1j * u2) * np.sin(t), np.exp(-1j * u1) * np.cos(t)],
    ])


def sample_invariant_eta(spec: EnsembleSpec, gen: np.random.Generator) -> np.ndarray:
    """2x2 invariant ensemble with effective Dyson index 2 - 2 eta.

    Sampled in eigen-decomposed form: eigenvalue center ~ N(0, 1/2),
    squared gap ~ Gamma((3 - 2 eta)/2, scale 4), gap sign random, and
    Haar-random eigenvectors. Rejection-free and exact.
    """
    if spec.kind != "InvariantEta2x2":
        raise ValueError(f"spec.kind is {spec.kind}, not InvariantEta2x2")
    eta = float(spec.eta)
    c = gaussian(gen, 0.0, 0.5)
    gap = np.sqrt(gen.gamma((3.0 - 2.0 * eta) / 2.0, 4.0))
    if gen.random() < 0.5:
        gap = -gap
    lam = np.array([c + gap / 2.0, c - gap / 2.0])
    U = sample_haar_2x2(gen)
    return U @ np.diag(lam) @ U.conj().T


_SAMPLERS = {
    "GUE": sample_gue,
    "DiagonalGaussian": sample_diagonal,
    "TridiagonalBeta": sample_tridiagonal_beta,
    "InvariantEta2x2": sample_invariant_eta,
}


def sample(spec: EnsembleSpec, gen: np.random.Generator) -> MatrixLike:
    """Dispatch to the sampler for spec.kind."""
    if spec.kind == "HaarBeta2x2":
        raise ValueError("HaarBeta2x2 is a composite (H0 + r U V U^dag); "
                         "use geometry.fs_mc_2x2 for its FS estimator")
    return _SAMPLERS[spec.kind](spec, gen)


@dataclass(frozen=True)
class FamilySpec:
    """Recipe for drawing H(r, phi) realizations: member specs plus chart point."""

    h0: EnsembleSpec
    h1: EnsembleSpec
    h2: Optional[EnsembleSpec] = None
    r: float = 0.0
    phi: float = 0.0

    def family(self, master_seed: int, realization: int) -> "HamiltonianFamily":
        return build_family(self.h0, self.h1, self.h2, master_seed, realization)

    def realize(self, master_seed: int, realization: int) -> MatrixLike:
        return self.family(master_seed, realization).evaluate(self.r, self.phi)


def build_family(spec_h0: EnsembleSpec, spec_h1: EnsembleSpec,
                 spec_h2: Optional[EnsembleSpec], master_seed: int,
                 realization: int = 0) -> HamiltonianFamily:
    """Three independent draws assembled into a HamiltonianFamily.

    Sub-streams are derived deterministically from (master_seed,
    realization, matrix slot), so realizations are reproducible and
    independent of evaluation order.
    """
    specs = (spec_h0, spec_h1, spec_h2)
    dims = {s.dim for s in specs if s is not None}
    if len(dims) != 1:
        raise ValueError(f"specs disagree on dimension: {sorted(dims)}")
    mats = [sample(s, stream(master_seed, realization, slot))
            if s is not None else None
            for slot, s in enumerate(specs)]
    return HamiltonianFamily(mats[0], mats[1], mats[2])
