"""Reference-figure data series (fig1..fig12), written as CSV files.

Desk-scale defaults keep every figure within a labtop-minutes budget; the
caption-faithful sizes sit behind paper_scale. Each function returns the
list of files it wrote so the CLI can checksum them into the manifest.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .correlators import (correlator_exact_scaled, correlator_free,
                          correlator_mc)
from .curvature import curvature_closed, curvature_mc
from .ensembles import EnsembleSpec, FamilySpec
from .geodesics import (intbreak_geodesic, intbreak_r_approx,
                        intbreak_theta_approx)
from .geometry import (fs_mc_2x2, gue_metric_closed, intbreak_metric,
                       intbreak_ricci, qmt_mc, tridiag_beta_fs_closed)
from .output import write_csv
from .spectra import sff

__all__ = ["FIGURES", "run_figure", "DEFAULT_PHI"]

DEFAULT_PHI = math.pi / 7  # fixed chart angle for runs exercising H1 and H2

# Figs. 4-6 quote the conserved squared speed; the speed constant is its root.
INTBREAK_SLOW_K = math.sqrt(0.1)
INTBREAK_L = 0.1


def _scale(paper_scale: bool, desk, paper, override=None):
    return override if override is not None else (paper if paper_scale else desk)


def fig1(out_dir, seed=0, paper_scale=False, threads=1, N=None, M=None):
    """Correlator trio (MC, SFF route, free probability), scaled frame."""
    N = _scale(paper_scale, 256, 1000, N)
    M = _scale(paper_scale, 100, 100, M)
    r = 0.43
    t = np.geomspace(0.1, 100.0, 60)
    sigma2 = 1.0 / N
    mc = correlator_mc(N, r, sigma2, t, M, master_seed=seed,
                       scaled_evolution=True)
    gue_prime = EnsembleSpec("GUE", N, sigma2 / (r * r + 1.0))
    fam_prime = FamilySpec(gue_prime, gue_prime, None, r=r)
    series = sff(fam_prime, t / math.sqrt(sigma2), M, master_seed=seed + 1)
    g_exact = correlator_exact_scaled(N, r, t, series, sigma2)
    g_free = correlator_free(N, r, t)
    path = write_csv(Path(out_dir) / "fig1_correlator.csv",
                     ["t", "G_mc", "G_mc_se", "G_exact", "G_free"],
                     zip(t, r * r * mc.mc, r * r * mc.mc_stderr, g_exact, g_free))
    return [path]


def fig2(out_dir, seed=0, paper_scale=False, threads=1, N=None, M=None):
    """Ricci scalar of the integrability-breaking metric, with theta chart."""
    rs = np.concatenate([[0.0], np.geomspace(0.01, 30.0, 120)])
    rows = []
    for r in rs:
        theta = math.pi / 2.0 if r == 0 else math.atan(math.sqrt(2.0) / r)
        rows.append((r, theta, intbreak_ricci(r)))
    return [write_csv(Path(out_dir) / "fig2_ricci.csv",
                      ["r", "theta", "ricci"], rows)]


def _trajectory_files(out_dir, stem, configs, lam_max):
    paths = []
    for tag, theta0, K, L, branch in configs:
        traj = intbreak_geodesic(theta0, 0.0, K, L, branch, lam_max)
        paths.append(write_csv(
            Path(out_dir) / f"{stem}_{tag}.csv",
            ["lambda", "theta", "r", "phi", "L_residual", "K_residual"],
            zip(traj.lam, traj.theta, traj.r, traj.phi,
                traj.L_residual, traj.K_residual)))
    return paths


def fig3(out_dir, seed=0, paper_scale=False, threads=1, N=None, M=None):
    """Initially growing trajectories at K=1, L=0.1 (theta0 pi/5, pi/10, pi/30)."""
    cfgs = [("theta0_pi5", math.pi / 5, 1.0, 0.1, "growing"),
            ("theta0_pi10", math.pi / 10, 1.0, 0.1, "growing"),
            ("theta0_pi30", math.pi / 30, 1.0, 0.1, "growing")]
    return _trajectory_files(out_dir, "fig3_growing", cfgs, 6.0)


def fig4(out_dir, seed=0, paper_scale=False, threads=1, N=None, M=None):
    """Initially decaying trajectories at squared speed 0.1, L=0.1."""
    cfgs = [("theta0_2pi5", 2 * math.pi / 5, INTBREAK_SLOW_K, INTBREAK_L, "decaying"),
            ("theta0_pi3", math.pi / 3, INTBREAK_SLOW_K, INTBREAK_L, "decaying"),
            ("theta0_pi4", math.pi / 4, INTBREAK_SLOW_K, INTBREAK_L, "decaying")]
    return _trajectory_files(out_dir, "fig4_decaying", cfgs, 80.0)


def fig5(out_dir, seed=0, paper_scale=False, threads=1, N=None, M=None):
    """Numeric vs small-theta analytic decaying solution, theta0 = pi/3."""
    traj = intbreak_geodesic(math.pi / 3, 0.0, INTBREAK_SLOW_K, INTBREAK_L,
                             "decaying", 80.0)
    approx = intbreak_theta_approx(math.pi / 3, INTBREAK_SLOW_K, INTBREAK_L,
                                   traj.lam)
    return [write_csv(Path(out_dir) / "fig5_theta_approx.csv",
                      ["lambda", "theta", "theta_approx"],
                      zip(traj.lam, traj.theta, approx))]


def fig6(out_dir, seed=0, paper_scale=False, threads=1, N=None, M=None):
    """r(lambda), numeric vs approximate, r0 = sqrt(2/3) and sqrt(2)."""
    paths = []
    for tag, r0 in [("r0_sqrt23", math.sqrt(2.0 / 3.0)), ("r0_sqrt2", math.sqrt(2.0))]:
        theta0 = math.atan(math.sqrt(2.0) / r0)
        traj = intbreak_geodesic(theta0, 0.0, INTBREAK_SLOW_K, INTBREAK_L,
                                 "decaying", 80.0)
        keep = traj.theta > 1e-3   # r explodes below; match the plotted range
        approx = intbreak_r_approx(theta0, INTBREAK_SLOW_K, INTBREAK_L,
                                   traj.lam[keep])
        paths.append(write_csv(Path(out_dir) / f"fig6_radial_{tag}.csv",
                               ["lambda", "r", "r_approx"],
                               zip(traj.lam[keep], traj.r[keep], approx)))
    return paths


def fig7(out_dir, seed=0, paper_scale=False, threads=1, N=None, M=None):
    """Closed-form tridiagonal-family FS sweeps for beta = 2, 3, 5."""
    rs = np.geomspace(0.05, 10.0, 60)
    paths = []
    for beta in (2, 3, 5):
        rows = [(r, tridiag_beta_fs_closed(float(beta), r)) for r in rs]
        paths.append(write_csv(Path(out_dir) / f"fig7_fs_beta{beta}.csv",
                               ["r", "value"], rows))
    return paths


def fig8(out_dir, seed=0, paper_scale=False, threads=1, N=None, M=None):
    """Large-N tridiagonal-beta QMT components vs r (log-log data)."""
    N = _scale(paper_scale, 256, 1000, N)
    M = _scale(paper_scale, 200, 1000, M)
    rs = np.geomspace(0.05, 2.0, 8)
    paths = []
    for tag, beta, gamma in [("beta2_gamma05", 2.0, 0.5),
                             ("beta3_gamma02", 3.0, 0.2)]:
        h0 = EnsembleSpec("TridiagonalBeta", N, dyson_beta=gamma)
        hp = EnsembleSpec("TridiagonalBeta", N, dyson_beta=beta)
        rows = []
        for i, r in enumerate(rs):
            est = qmt_mc(h0, hp, hp, float(r), DEFAULT_PHI, M,
                         master_seed=seed + 1000 * i, threads=threads)
            rows.append((r, DEFAULT_PHI,
                         est.g_rr[0], est.g_rr[1],
                         est.g_phiphi[0], est.g_phiphi[1],
                         est.g_rphi[0], est.g_rphi[1],
                         est.realizations, est.rejected_degenerate))
        paths.append(write_csv(
            Path(out_dir) / f"fig8_qmt_{tag}.csv",
            ["r", "phi", "grr_mean", "grr_se", "gpp_mean", "gpp_se",
             "grp_mean", "grp_se", "M", "rejected"], rows))
    return paths


def _fs_sweep(out_dir, name, kind, params, rs, M, seed):
    rows = []
    for i, r in enumerate(rs):
        mean, se = fs_mc_2x2(kind, params, float(r), M, master_seed=seed + i)
        rows.append((r, mean, se, M))
    return write_csv(Path(out_dir) / name, ["r", "grr_mean", "grr_se", "M"], rows)


def fig9(out_dir, seed=0, paper_scale=False, threads=1, N=None, M=None):
    """Invariant-ensemble FS at eta = 1 (effective Dyson index 0)."""
    rs = np.geomspace(0.3, 10.0, 12)
    return [_fs_sweep(out_dir, "fig9_fs_eta1.csv", "InvariantEta",
                      {"eta": 1.0}, rs, 100_000, seed)]


def fig10(out_dir, seed=0, paper_scale=False, threads=1, N=None, M=None):
    """Invariant-ensemble FS at eta = 1/2 (effective Dyson index 1)."""
    rs = np.geomspace(0.3, 10.0, 12)
    return [_fs_sweep(out_dir, "fig10_fs_eta05.csv", "InvariantEta",
                      {"eta": 0.5}, rs, 100_000, seed)]


def fig11(out_dir, seed=0, paper_scale=False, threads=1, N=None, M=None):
    """Upper-level curvature vs r for beta = 1, 2, 4 (MC + closed forms)."""
    rs = np.geomspace(0.05, 8.0, 25)
    rows = []
    for beta in (1.0, 2.0, 4.0):
        for i, r in enumerate(rs):
            mean, se = curvature_mc(beta, float(r), 20_000,
                                    master_seed=seed + i)
            closed = curvature_closed(int(beta), float(r)) \
                if beta in (2.0, 4.0) else float("nan")
            rows.append((r, beta, mean, se, closed))
    return [write_csv(Path(out_dir) / "fig11_curvature.csv",
                      ["r", "beta", "K2_mean", "K2_se", "K2_closed"], rows)]


def fig12(out_dir, seed=0, paper_scale=False, threads=1, N=None, M=None):
    """Haar-rotated beta-family FS sweeps, both eigenvalue-law cases."""
    rs = np.geomspace(0.3, 8.0, 10)
    paths = []
    for case, kind in [("case1", "HaarBetaCase1"), ("case2", "HaarBetaCase2")]:
        rows = []
        for beta in (1.0, 2.0, 3.0, 5.0):
            for i, r in enumerate(rs):
                mean, se = fs_mc_2x2(kind, {"beta": beta}, float(r), 100_000,
                                     master_seed=seed + i)
                rows.append((r, beta, mean, se, 100_000))
        paths.append(write_csv(Path(out_dir) / f"fig12_haar_{case}.csv",
                               ["r", "beta", "grr_mean", "grr_se", "M"], rows))
    return paths


FIGURES = {f"fig{i}": fn for i, fn in enumerate(
    [fig1, fig2, fig3, fig4, fig5, fig6, fig7, fig8, fig9, fig10, fig11, fig12],
    start=1)}


def run_figure(fig_id: str, out_dir, seed=0, paper_scale=False, threads=1,
               N=None, M=None):
    if fig_id not in FIGURES:
        raise KeyError(f"unknown figure id {fig_id!r}; expected fig1..fig12")
    return FIGURES[fig_id](out_dir, seed=seed, paper_scale=paper_scale,
                           threads=threads, N=N, M=M)
