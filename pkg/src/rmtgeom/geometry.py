"""Fidelity susceptibility and quantum metric tensor: Monte-Carlo estimators,
closed-form metrics and Ricci scalars, and the superposition geometric tensor.

Conventions. Families are H(r, phi) = H0 + r cos(phi) H1 + r sin(phi) H2 and
metric components are averaged over eigenstates and realizations. The dense
GUE family uses entry variance 1/N throughout; the 2x2 integrability-breaking
family pairs a unit-variance Gaussian diagonal with perturbations of entry
variance 1/2 (the invariant-eta ensemble is sampled at unit normalization and
rescaled by 1/sqrt(2) here so all 2x2 closed forms share one convention).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import scipy.special

from .ensembles import EnsembleSpec, build_family
from .numerics import gamma_fn, hyp2f1
from .prng import stream
from .spectra import SpectralData, decompose, to_eigenbasis

__all__ = [
    "QmtEstimate", "degeneracy_threshold", "near_degenerate",
    "fs_per_state", "averaged_fs", "qmt_mc",
    "gue_metric_closed", "intbreak_metric", "intbreak_ricci", "ricci_fd",
    "tridiag_beta_fs_closed", "tridiag_beta_fs_smallr",
    "qgt_superposition", "fs_mc_2x2", "FS_MC_KINDS",
]


@dataclass(frozen=True)
class QmtEstimate:
    """Monte-Carlo metric components with batch-means standard errors."""

    g_rr: Tuple[float, float]
    g_phiphi: Tuple[float, float]
    g_rphi: Tuple[float, float]
    realizations: int
    rejected_degenerate: int
    r: float
    phi: float


def degeneracy_threshold(eigenvalues: np.ndarray) -> float:
    """eps_deg = 1e-12 * spectral width."""
    return 1e-12 * float(eigenvalues[-1] - eigenvalues[0])


def near_degenerate(spectral: SpectralData, n: Optional[int] = None) -> bool:
    """Whether any gap (touching level n, or any gap at all) is below eps_deg."""
    E = spectral.eigenvalues
    eps = degeneracy_threshold(E)
    if n is None:
        return bool(np.min(np.diff(E)) < eps) if len(E) > 1 else False
    gaps = np.abs(np.delete(E - E[n], n))
    return bool(gaps.min() < eps) if len(gaps) else False


def fs_per_state(spectral: SpectralData, perturbation, n: int) -> float:
    """Per-state fidelity susceptibility sum_{j != n} |P_nj|^2/(E_j - E_n)^2.

    Near-degenerate realizations are the caller's to flag (near_degenerate);
    the value is still returned.
    """
    E = spectral.eigenvalues
    row = to_eigenbasis(spectral, perturbation)[n]
    dE = E - E[n]
    keep = np.arange(len(E)) != n
    return float(np.sum(np.abs(row[keep]) ** 2 / dE[keep] ** 2))


def averaged_fs(spectral: SpectralData, perturbation) -> float:
    """State-averaged FS, (1/N) sum over n of fs_per_state(n)."""
    E = spectral.eigenvalues
    A = to_eigenbasis(spectral, perturbation)
    dE = E[:, None] - E[None, :]
    np.fill_diagonal(dE, np.inf)
    return float(np.sum(np.abs(A) ** 2 / dE**2) / len(E))


def _qmt_single(spec_h0, spec_h1, spec_h2, r, phi, master_seed, m):
    fam = build_family(spec_h0, spec_h1, spec_h2, master_seed, m)
    spectral = decompose(fam.evaluate(r, phi))
    E = spectral.eigenvalues
    Ar = to_eigenbasis(spectral, fam.d_dr(phi))
    Ap = to_eigenbasis(spectral, fam.d_dphi(r, phi))
    dE = E[:, None] - E[None, :]
    np.fill_diagonal(dE, np.inf)
    W = 1.0 / dE**2
    n = len(E)
    grr = np.sum(np.abs(Ar) ** 2 * W) / n
    gpp = np.sum(np.abs(Ap) ** 2 * W) / n
    grp = np.sum((Ar * np.conj(Ap)).real * W) / n
    return grr, gpp, grp, near_degenerate(spectral)


def _batch_stats(values: np.ndarray, batches: int) -> Tuple[float, float]:
    means = values.reshape(batches, -1).mean(axis=1)
    return float(values.mean()), float(means.std(ddof=1) / np.sqrt(batches))


def qmt_mc(spec_h0: EnsembleSpec, spec_h1: EnsembleSpec, spec_h2: EnsembleSpec,
           r: float, phi: float, realizations: int, master_seed: int = 0,
           batches: int = 10, threads: int = 1) -> QmtEstimate:
    """Ensemble-averaged QMT components (g_rr, g_phiphi, g_rphi) by Monte Carlo.

    dH/dr = cos(phi) H1 + sin(phi) H2 and dH/dphi = r(-sin(phi) H1 +
    cos(phi) H2); each realization owns a derived stream, so results do not
    depend on the thread count. Standard errors use batch means (>= 10
    batches; heavy-tailed FS samples make naive per-sample errors unreliable).
    """
    if realizations < 10:
        raise ValueError("need at least 10 realizations")
    batches = max(10, batches)
    realizations -= realizations % batches  # equal batches keep merges associative
    out = np.empty((realizations, 3))
    flags = np.zeros(realizations, dtype=bool)

    def work(m):
        grr, gpp, grp, flagged = _qmt_single(spec_h0, spec_h1, spec_h2, r, phi,
                                             master_seed, m)
        out[m] = (grr, gpp, grp)
        flags[m] = flagged

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(realizations)))
    else:
        for m in range(realizations):
            work(m)
    rejected = int(flags.sum())
    if rejected == realizations:
        raise ArithmeticError("every realization was degeneracy-flagged")
    return QmtEstimate(
        g_rr=_batch_stats(out[:, 0], batches),
        g_phiphi=_batch_stats(out[:, 1], batches),
        g_rphi=_batch_stats(out[:, 2], batches),
        realizations=realizations, rejected_degenerate=rejected, r=r, phi=phi)


def gue_metric_closed(N: int, r: float) -> Tuple[float, float, float]:
    """Closed-form GUE metric: g_rr, g_phiphi, and the (constant) Ricci scalar.

    g_rr = (N-1)/(2(r^2+1)^2), g_phiphi = (N-1)r^2/(2(r^2+1)), R = 4/(N-1);
    the cross component vanishes identically.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    if r < 0:
        raise ValueError("need r >= 0")
    grr = (N - 1) / (2.0 * (r * r + 1.0) ** 2)
    gpp = (N - 1) * r * r / (2.0 * (r * r + 1.0))
    return grr, gpp, 4.0 / (N - 1)


def intbreak_metric(r: float) -> Tuple[float, float]:
    """Metric of the 2x2 integrability-breaking family.

    g_rr = (arccot(r/sqrt2)/(sqrt2 r) - 1/(2+r^2))/4 diverges as r -> 0
    (returned as inf there); g_phiphi = r arctan(sqrt2/r)/(2 sqrt2) -> 1/2
    as r -> infinity.
    """
    if r < 0:
        raise ValueError("need r >= 0")
    if r == 0:
        return math.inf, 0.0
    arccot = math.atan2(math.sqrt(2.0), r)  # arccot(r/sqrt2) on (0, pi/2)
    grr = 0.25 * (arccot / (math.sqrt(2.0) * r) - 1.0 / (2.0 + r * r))
    gpp = (r / (2.0 * math.sqrt(2.0))) * math.atan(math.sqrt(2.0) / r)
    return grr, gpp


def intbreak_ricci(r: float) -> float:
    """Ricci scalar of the integrability-breaking metric.

    Interpolates between 8/pi^2 at r = 0 and 4 at large r, with expansion
    4 - 64/(15 r^2) + 3904/(525 r^4) + O(r^-6).
    """
    if r < 0:
        raise ValueError("need r >= 0")
    if r == 0:
        return 8.0 / math.pi**2
    ac = math.atan2(math.sqrt(2.0), r)
    num = 4.0 * math.sqrt(2.0) * r - 4.0 * (r * r - 2.0) * ac
    den = (r * r + 2.0) * ac * ac * ((r * r + 2.0) * ac - math.sqrt(2.0) * r)
    return num / den


def _fd1(f: Callable[[float], float], x: float, h: float) -> float:
    # five-point first derivative, O(h^4)
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def ricci_fd(g_rr: Callable[[float], float], g_phiphi: Callable[[float], float],
             r: float, h: Optional[float] = None) -> float:
    """Scalar curvature of a diagonal 2-D metric from differenced Christoffels.

    Both components may depend on the first coordinate only. Serves as the
    independent oracle for every closed-form Ricci scalar in the package:
    R = (2/Q) (d Gamma^r_pp/dr + Gamma^r_rr Gamma^r_pp - Gamma^r_pp Gamma^p_rp)
    with P = g_rr, Q = g_phiphi. The default step grows with r because the
    Christoffel magnitudes do; the stencils are fourth order.
    """
    if h is None:
        h = 1e-3 * (1.0 + abs(r))
    for probe in (r - 2 * h, r, r + 2 * h):
        try:
            finite = np.isfinite(g_rr(probe)) and np.isfinite(g_phiphi(probe))
        except ZeroDivisionError:
            finite = False
        if not finite:
            raise ValueError(f"metric not finite at stencil point {probe}")

    def gamma_r_pp(x):
        return -_fd1(g_phiphi, x, h) / (2.0 * g_rr(x))

    P, Q = g_rr(r), g_phiphi(r)
    gamma_r_rr = _fd1(g_rr, r, h) / (2.0 * P)
    gamma_p_rp = _fd1(g_phiphi, r, h) / (2.0 * Q)
    d_gamma = _fd1(gamma_r_pp, r, h)
    riemann = d_gamma + gamma_r_rr * gamma_r_pp(r) - gamma_r_pp(r) * gamma_p_rp
    return 2.0 * riemann / Q


def tridiag_beta_fs_closed(beta: float, r: float) -> float:
    """Ensemble-averaged FS for the 2x2 tridiagonal beta family, beta > 1.

    g(r) = beta/(16 (beta+r^2)^2) (1 + r^2/beta)^{beta/2} [
           (beta + (beta-1) r^2) sqrt(pi beta) Gamma((beta-1)/2)/(r Gamma(beta/2))
           - 4 beta 2F1(-1/2, beta/2; 3/2; -r^2/beta) ].
    The defining integral does not converge for beta <= 1.
    """
    if beta <= 1:
        raise ValueError(f"closed form needs beta > 1 (the averaged-FS integral "
                         f"does not converge for beta <= 1); got beta = {beta}")
    if r <= 0:
        raise ValueError("need r > 0")
    e = (1.0 + r * r / beta) ** (beta / 2.0)
    S = math.sqrt(math.pi * beta) * gamma_fn((beta - 1.0) / 2.0) / gamma_fn(beta / 2.0)
    F = hyp2f1(-0.5, beta / 2.0, 1.5, -r * r / beta)
    bracket = (beta + (beta - 1.0) * r * r) * S / r - 4.0 * beta * F
    return beta / (16.0 * (beta + r * r) ** 2) * e * bracket


def tridiag_beta_fs_smallr(beta: float, r: float) -> float:
    """Four-term small-r expansion of tridiag_beta_fs_closed.

    sqrt(pi beta) Gamma((beta-1)/2)/(16 Gamma(beta/2) r) - 1/4
    + 3 sqrt(pi) Gamma((beta-1)/2)/(16 sqrt(beta) Gamma(beta/2 - 1)) r
    + (beta-3)/(6 beta) r^2; the leading 1/r divergence holds for any beta > 1.
    """
    if beta <= 1:
        raise ValueError("expansion needs beta > 1")
    g_half = gamma_fn((beta - 1.0) / 2.0)
    lead = math.sqrt(math.pi * beta) * g_half / (16.0 * gamma_fn(beta / 2.0) * r)
    # reciprocal gamma handles the beta = 2 pole of Gamma(beta/2 - 1)
    lin = 3.0 * math.sqrt(math.pi) * g_half / (16.0 * math.sqrt(beta)) \
        * float(scipy.special.rgamma(beta / 2.0 - 1.0)) * r
    quad = (beta - 3.0) / (6.0 * beta) * r * r
    return lead - 0.25 + lin + quad


def qgt_superposition(spectral: SpectralData, perturbations: Sequence,
                      c: np.ndarray) -> np.ndarray:
    """Quantum geometric tensor of the superposition sum_n c_n |n>.

    perturbations holds dH/dr^a for each parameter; returns the complex
    QGT matrix (one entry per parameter pair). Reduces to the per-state QGT
    when c is a basis vector; in general this is NOT the state-averaged QMT.
    """
    c = np.asarray(c, dtype=complex)
    if abs(np.sum(np.abs(c) ** 2) - 1.0) > 1e-12:
        raise ValueError("coefficients must be normalized to 1")
    E = spectral.eigenvalues
    N = len(E)
    dE = E[None, :] - E[:, None]  # dE[k, n] = E_n - E_k
    np.fill_diagonal(dE, np.inf)
    D = []  # D[a][k, n] = <k|dH_a|n>/(E_n - E_k), zero diagonal
    for P in perturbations:
        D.append(to_eigenbasis(spectral, P) / dE)
    k_weights = 1.0 - np.abs(c) ** 2
    npar = len(D)
    g = np.zeros((npar, npar), dtype=complex)
    for a in range(npar):
        # pa[k] = sum_n c_n^* <pd_a n|k> = conj(sum_n <k|pd_a n> c_n)
        pa = np.conj(D[a] @ c)
        for b in range(npar):
            qb = D[b] @ c             # qb[k] = sum_m <k|pd_b m> c_m
            first = np.sum(k_weights * pa * qb)
            wa = c * pa
            wb = np.conj(c) * qb
            second = np.sum(wa) * np.sum(wb) - np.sum(wa * wb)
            g[a, b] = first - second
    return g


FS_MC_KINDS = ("TridiagBeta", "InvariantEta", "HaarBetaCase1", "HaarBetaCase2")


def _stack_eigh_2x2(H: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(H)
    return vals, vecs


def fs_mc_2x2(kind: str, params: dict, r: float, realizations: int,
              master_seed: int = 0, batches: int = 10) -> Tuple[float, float]:
    """Monte-Carlo ensemble-averaged g_rr for the 2x2 families.

    Samples (H0, P), diagonalizes H = H0 + r P, applies the per-state FS and
    averages over both states and realizations. Returns (mean, batch-means
    standard error). Kinds: 'TridiagBeta' and the Haar cases take params
    {'beta': ...}; 'InvariantEta' takes {'eta': ...} and uses the 1/sqrt(2)
    rescale described in the module docstring.
    """
    if kind not in FS_MC_KINDS:
        raise ValueError(f"kind must be one of {FS_MC_KINDS}")
    if realizations < 1000:
        raise ValueError("need at least 1e3 realizations")
    if r <= 0:
        raise ValueError("need r > 0")
    batches = max(10, batches)
    per = realizations // batches
    batch_means = []
    degenerate = 0
    for i in range(batches):
        gen = stream(master_seed, i, slot=4)
        H0, P = _sample_2x2_pair(kind, params, gen, per)
        H = H0 + r * P
        vals, vecs = _stack_eigh_2x2(H)
        gap2 = (vals[:, 1] - vals[:, 0]) ** 2
        eps = 1e-12 * (vals[:, 1] - vals[:, 0]).max()
        degenerate += int(np.sum(np.sqrt(gap2) < eps))
        # P in the eigenbasis, off-diagonal element
        P01 = np.einsum("mi,mij,mj->m", vecs[:, :, 0].conj(), P, vecs[:, :, 1])
        fs0 = np.abs(P01) ** 2 / gap2
        batch_means.append(fs0.mean())   # both states give the same per-state FS
    if degenerate == realizations:
        raise ArithmeticError("all samples degenerate")
    bm = np.array(batch_means)
    return float(bm.mean()), float(bm.std(ddof=1) / np.sqrt(batches))


def _sample_2x2_pair(kind: str, params: dict, gen: np.random.Generator,
                     size: int) -> Tuple[np.ndarray, np.ndarray]:
    """size stacked (H0, perturbation) pairs for one fs_mc_2x2 batch."""
    if kind == "TridiagBeta":
        beta = float(params["beta"])
        h = gen.normal(0.0, 1.0, (size, 2))
        a = gen.normal(0.0, math.sqrt(1.0 / beta), (size, 2))
        b = np.sqrt(gen.gamma(beta / 2.0, 2.0, size)) / math.sqrt(2.0 * beta)
        H0 = np.zeros((size, 2, 2))
        H0[:, 0, 0], H0[:, 1, 1] = h[:, 0], h[:, 1]
        P = np.zeros((size, 2, 2))
        P[:, 0, 0], P[:, 1, 1] = a[:, 0], a[:, 1]
        P[:, 0, 1] = P[:, 1, 0] = b
        return H0, P
    if kind == "InvariantEta":
        eta = float(params["eta"])
        h = gen.normal(0.0, 1.0, (size, 2))
        c = gen.normal(0.0, math.sqrt(0.5), size)
        gap = np.sqrt(gen.gamma((3.0 - 2.0 * eta) / 2.0, 4.0, size))
        gap *= gen.choice([-1.0, 1.0], size)
        lam = np.stack([c + gap / 2.0, c - gap / 2.0], axis=1)
        P = _haar_rotate(lam, gen) / math.sqrt(2.0)
        H0 = np.zeros((size, 2, 2), dtype=complex)
        H0[:, 0, 0], H0[:, 1, 1] = h[:, 0], h[:, 1]
        return H0, P
    # Haar cases: H(r) = diag(h) + r U diag(v) U^dag
    beta = float(params["beta"])
    if kind == "HaarBetaCase1":
        h = _beta_jpd_pairs(gen, beta, size)
    else:
        h = gen.normal(0.0, 1.0, (size, 2))
    v = _beta_jpd_pairs(gen, beta, size)
    P = _haar_rotate(v, gen)
    H0 = np.zeros((size, 2, 2), dtype=complex)
    H0[:, 0, 0], H0[:, 1, 1] = h[:, 0], h[:, 1]
    return H0, P


def _beta_jpd_pairs(gen: np.random.Generator, beta: float, size: int) -> np.ndarray:
    """Eigenvalue pairs of the N=2 general-beta Gaussian joint density."""
    c = gen.normal(0.0, math.sqrt(1.0 / (2.0 * beta)), size)
    gap = np.sqrt(gen.gamma((beta + 1.0) / 2.0, 4.0 / beta, size))
    gap *= gen.choice([-1.0, 1.0], size)
    return np.stack([c + gap / 2.0, c - gap / 2.0], axis=1)


def _haar_rotate(lam: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """U diag(lam) U^dag for stacked Haar 2x2 unitaries."""
    size = lam.shape[0]
    u1 = gen.uniform(0.0, 2 * np.pi, size)
    u2 = gen.uniform(0.0, 2 * np.pi, size)
    t = np.arcsin(np.sqrt(gen.random(size)))
    U = np.empty((size, 2, 2), dtype=complex)
    U[:, 0, 0] = np.exp(1j * u1) * np.cos(t)
    U[:, 0, 1] = -np.exp(1j * u2) * np.sin(t)
    U[:, 1, 0] = np.exp(-1j * u2) * np.sin(t)
    U[:, 1, 1] = np.exp(-1j * u1) * np.cos(t)
    D = np.zeros((size, 2, 2))
    D[:, 0, 0], D[:, 1, 1] = lam[:, 0], lam[:, 1]
    return U @ D @ np.conj(np.transpose(U, (0, 2, 1)))
