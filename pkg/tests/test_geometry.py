import math

import numpy as np
import pytest

from rmtgeom.ensembles import EnsembleSpec, build_family
from rmtgeom.geometry import (averaged_fs, fs_mc_2x2, fs_per_state,
                              gue_metric_closed, intbreak_metric,
                              intbreak_ricci, qgt_superposition, qmt_mc,
                              ricci_fd, tridiag_beta_fs_closed,
                              tridiag_beta_fs_smallr)
from rmtgeom.prng import stream
from rmtgeom.spectra import decompose, eigh, to_eigenbasis


# ---------------------------------------------------------------- fs_per_state

def test_fs_zero_for_commuting_perturbation():
    sd = eigh(np.diag([0.0, 1.0, 2.5]))
    assert fs_per_state(sd, np.diag([3.0, -1.0, 0.5]), 1) == 0.0


def test_fs_two_level():
    delta = 0.37
    sd = eigh(np.diag([0.0, delta]))
    pert = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert fs_per_state(sd, pert, 0) == pytest.approx(1 / delta**2, rel=1e-14)


def test_fs_scale_invariance():
    g = EnsembleSpec("GUE", 12)
    fam = build_family(g, g, None, 40, 0)
    H = fam.evaluate(0.9, 0.0)
    pert = fam.d_dr(0.0)
    c = 3.7
    base = fs_per_state(eigh(H), pert, 4)
    scaled = fs_per_state(eigh(c * H), c * pert, 4)
    assert scaled == pytest.approx(base, rel=1e-12)


def test_averaged_fs_equals_mean_of_states():
    g = EnsembleSpec("GUE", 10)
    fam = build_family(g, g, None, 41, 0)
    sd = decompose(fam.evaluate(1.2, 0.0))
    pert = fam.d_dr(0.0)
    per_state = np.mean([fs_per_state(sd, pert, n) for n in range(10)])
    assert averaged_fs(sd, pert) == pytest.approx(per_state, rel=1e-12)


# ---------------------------------------------------------------- closed forms

def test_gue_metric_closed_values():
    assert gue_metric_closed(2, 0.0) == (0.5, 0.0, 4.0)
    assert gue_metric_closed(101, 1.0)[0] == pytest.approx(12.5, abs=1e-14)
    with pytest.raises(ValueError):
        gue_metric_closed(1, 0.5)


def test_gue_ricci_from_finite_differences():
    N = 7
    val = ricci_fd(lambda r: gue_metric_closed(N, r)[0],
                   lambda r: gue_metric_closed(N, r)[1], 0.7)
    assert val == pytest.approx(4.0 / (N - 1), abs=1e-6)


def test_intbreak_metric_values():
    grr, gpp = intbreak_metric(math.sqrt(2.0))
    assert gpp == pytest.approx(math.pi / 8, rel=1e-14)
    assert intbreak_metric(1e3)[1] == pytest.approx(0.5, abs=1e-3)
    grr_small = intbreak_metric(1e-4)[0]
    assert grr_small * 1e-4 == pytest.approx(math.pi / (8 * math.sqrt(2)),
                                             rel=1e-3)
    assert intbreak_metric(0.0) == (math.inf, 0.0)


def test_intbreak_ricci_limits():
    assert intbreak_ricci(0.0) == pytest.approx(8 / math.pi**2, rel=1e-12)
    expansion = 4 - 64 / (15 * 100) + 3904 / (525 * 10_000)
    assert intbreak_ricci(10.0) == pytest.approx(expansion, abs=1e-3)


def test_intbreak_ricci_vs_fd():
    for r in np.geomspace(0.1, 20.0, 12):
        fd = ricci_fd(lambda x: intbreak_metric(x)[0],
                      lambda x: intbreak_metric(x)[1], float(r))
        assert fd == pytest.approx(intbreak_ricci(float(r)), abs=1e-5)


def test_ricci_fd_sphere_and_flat():
    A = 3.0
    sphere = ricci_fd(lambda t: A, lambda t: A * np.cos(t) ** 2, 0.7)
    assert sphere == pytest.approx(2.0 / A, abs=1e-6)
    flat = ricci_fd(lambda r: 1.0, lambda r: r * r, 1.3)
    assert abs(flat) < 1e-8


def test_ricci_fd_rejects_nonfinite_stencil():
    with pytest.raises(ValueError):
        ricci_fd(lambda r: 1.0 / (r - 1.0), lambda r: r * r, 1.0, h=1e-3)


# ------------------------------------------------- tridiagonal-family closed FS

def test_tridiag_fs_beta3_hand_value():
    assert tridiag_beta_fs_closed(3.0, 1.0) == pytest.approx(0.0625, rel=1e-12)


def test_tridiag_fs_beta2_reduces_to_intbreak():
    for r in np.geomspace(0.05, 10.0, 25):
        assert tridiag_beta_fs_closed(2.0, float(r)) == pytest.approx(
            intbreak_metric(float(r))[0], rel=1e-8)


def test_tridiag_fs_beta5_special_case():
    # printed special case carries a factor-6 slip; corrected form used here
    r = 2.0
    s = math.sqrt(5 + r * r)
    eq44 = (5 * s + r * (4 * r * (s - r) - 15)) / (60.0 * r)
    assert tridiag_beta_fs_closed(5.0, r) == pytest.approx(eq44, abs=1e-10)


def test_tridiag_fs_rejects_beta_at_most_one():
    with pytest.raises(ValueError, match="converge"):
        tridiag_beta_fs_closed(1.0, 1.0)
    with pytest.raises(ValueError):
        tridiag_beta_fs_closed(0.5, 1.0)


def test_tridiag_smallr_leading_coefficient_beta2():
    # sqrt(pi beta) Gamma((beta-1)/2)/(16 Gamma(beta/2)) = pi/(8 sqrt 2) at beta=2
    lead = tridiag_beta_fs_smallr(2.0, 1e-9) * 1e-9
    assert lead == pytest.approx(math.pi / (8 * math.sqrt(2)), rel=1e-6)


def test_tridiag_smallr_matches_closed_form():
    assert tridiag_beta_fs_smallr(3.0, 0.05) == pytest.approx(
        tridiag_beta_fs_closed(3.0, 0.05), rel=0.01)


def test_tridiag_smallr_one_over_r_scaling():
    v3 = tridiag_beta_fs_closed(2.5, 1e-3) * 1e-3
    v4 = tridiag_beta_fs_closed(2.5, 1e-4) * 1e-4
    assert abs(v3 / v4 - 1.0) < 1e-3


# ---------------------------------------------------------------- qmt_mc

def test_qmt_mc_matches_gue_closed_form():
    N, M, r, phi = 32, 300, 1.0, math.pi / 7
    g = EnsembleSpec("GUE", N)
    est = qmt_mc(g, g, g, r, phi, M, master_seed=4242)
    grr, gpp, _ = gue_metric_closed(N, r)
    assert abs(est.g_rr[0] - grr) <= 4 * est.g_rr[1]
    assert abs(est.g_phiphi[0] - gpp) <= 4 * est.g_phiphi[1]
    assert abs(est.g_rphi[0]) <= 4 * est.g_rphi[1]
    assert est.realizations == 300
    assert est.rejected_degenerate == 0


def test_qmt_mc_thread_determinism():
    g = EnsembleSpec("GUE", 12)
    a = qmt_mc(g, g, g, 0.5, 0.3, 40, master_seed=1, threads=1)
    b = qmt_mc(g, g, g, 0.5, 0.3, 40, master_seed=1, threads=4)
    assert a == b


def test_qmt_mc_requires_enough_realizations():
    g = EnsembleSpec("GUE", 4)
    with pytest.raises(ValueError):
        qmt_mc(g, g, g, 1.0, 0.0, 5)


# ---------------------------------------------------------------- superposition

def _qgt_setup(seed=43):
    g = EnsembleSpec("GUE", 6)
    fam = build_family(g, g, g, seed, 0)
    sd = decompose(fam.evaluate(0.8, 0.5))
    perts = [fam.d_dr(0.5), fam.d_dphi(0.8, 0.5)]
    return sd, perts


def test_qgt_superposition_reduces_to_single_state():
    sd, perts = _qgt_setup()
    n = 2
    c = np.zeros(6, dtype=complex)
    c[n] = 1.0
    g = qgt_superposition(sd, perts, c)
    E = sd.eigenvalues
    A = to_eigenbasis(sd, perts[0])
    B = to_eigenbasis(sd, perts[1])
    keep = np.arange(6) != n
    dE = E[keep] - E[n]
    expected_rr = np.sum(np.abs(A[keep, n]) ** 2 / dE**2)
    expected_rp = np.sum(A[keep, n].conj() * B[keep, n] / dE**2)
    assert g[0, 0].real == pytest.approx(expected_rr, rel=1e-12)
    assert g[0, 1] == pytest.approx(expected_rp, rel=1e-12)


def test_qgt_superposition_uniform_case():
    # independent transcription of the uniform-coefficient double-sum formula
    sd, perts = _qgt_setup(seed=44)
    N = 6
    c = np.full(N, 1 / math.sqrt(N), dtype=complex)
    g = qgt_superposition(sd, perts, c)
    E = sd.eigenvalues
    D = []
    for P in perts:
        A = to_eigenbasis(sd, P)
        dE = E[None, :] - E[:, None]
        np.fill_diagonal(dE, np.inf)
        D.append(A / dE)
    direct = 0.0 + 0.0j
    a, b = 0, 1
    for n in range(N):
        for m in range(N):
            t1 = sum((1 - 1 / N) * np.conj(D[a][k, n]) * D[b][k, m]
                     for k in range(N))
            t2 = sum((1 / N) * np.conj(D[a][k, n]) * D[b][l, m]
                     for k in range(N) for l in range(N) if k != l)
            direct += (1 / N) * (t1 - t2)
    assert g[0, 1] == pytest.approx(direct, rel=1e-12)


def test_qgt_superposition_differs_from_state_average():
    g = EnsembleSpec("GUE", 4)
    fam = build_family(g, g, g, 45, 0)
    sd = decompose(fam.evaluate(0.6, 0.2))
    perts = [fam.d_dr(0.2)]
    c = np.full(4, 0.5, dtype=complex)
    sup = qgt_superposition(sd, perts, c)[0, 0].real
    avg = averaged_fs(sd, perts[0])
    assert abs(sup - avg) > 1e-6


def test_qgt_superposition_rejects_unnormalized():
    sd, perts = _qgt_setup()
    with pytest.raises(ValueError):
        qgt_superposition(sd, perts, np.ones(6))


# ---------------------------------------------------------------- fs_mc_2x2

def test_fs_mc_matches_per_state_formula():
    # the batched estimator agrees with fs_per_state on explicit instances
    from rmtgeom.geometry import _sample_2x2_pair
    gen = stream(46, 0, slot=4)
    H0, P = _sample_2x2_pair("HaarBetaCase2", {"beta": 2.0}, gen, 64)
    r = 1.3
    vals = []
    for i in range(64):
        sd = eigh(H0[i] + r * P[i])
        vals.append(0.5 * (fs_per_state(sd, P[i], 0) + fs_per_state(sd, P[i], 1)))
    direct = np.mean(vals)
    gen2 = stream(46, 0, slot=4)
    H0b, Pb = _sample_2x2_pair("HaarBetaCase2", {"beta": 2.0}, gen2, 64)
    H = H0b + r * Pb
    valsb, vecsb = np.linalg.eigh(H)
    gap2 = (valsb[:, 1] - valsb[:, 0]) ** 2
    P01 = np.einsum("mi,mij,mj->m", vecsb[:, :, 0].conj(), Pb, vecsb[:, :, 1])
    batched = np.mean(np.abs(P01) ** 2 / gap2)
    assert batched == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("kind,params,target", [
    ("InvariantEta", {"eta": 0.0}, None),      # target: intbreak g_rr
    ("HaarBetaCase1", {"beta": 2.0}, 0.125),   # GUE N=2 at r=1
    ("HaarBetaCase2", {"beta": 2.0}, None),
])
def test_fs_mc_2x2_closed_form_anchors(kind, params, target):
    r = 1.0
    tgt = target if target is not None else intbreak_metric(r)[0]
    mean, se = fs_mc_2x2(kind, params, r, 100_000, master_seed=123)
    assert abs(mean - tgt) <= 3 * se


def test_fs_mc_2x2_validation():
    with pytest.raises(ValueError):
        fs_mc_2x2("TridiagBeta", {"beta": 2.0}, 1.0, 100)
    with pytest.raises(ValueError):
        fs_mc_2x2("nope", {}, 1.0, 10_000)
