import math

import numpy as np
import pytest
import scipy.integrate

from rmtgeom.correlators import (CorrelatorSeries, box_sff, correlator_exact,
                                 correlator_exact_scaled, correlator_free,
                                 correlator_mc, disconnected_fs, fs_from_sff,
                                 pair_sum_fs, virial_expectation)
from rmtgeom.ensembles import EnsembleSpec, sample_gue
from rmtgeom.prng import stream
from rmtgeom.spectra import SffSeries


def test_mc_value_at_zero_single_realization():
    # G(0) = Tr(P^2)/N exactly, per realization
    N = 24
    series = correlator_mc(N, 0.7, 1.0 / N, np.array([0.0]), 1, master_seed=50)
    spec = EnsembleSpec("GUE", N, 1.0 / N)
    _ = sample_gue(spec, stream(50, 0, 0))       # H0 stream
    P = sample_gue(spec, stream(50, 0, 1))
    assert series.mc[0] == pytest.approx(np.trace(P @ P).real / N, rel=1e-12)


def test_mc_value_at_zero_matches_n_sigma2():
    N = 64
    series = correlator_mc(N, 0.43, 1.0 / N, np.array([0.0]), 40, master_seed=51)
    assert abs(series.mc[0] - 1.0) <= 3 * series.mc_stderr[0] + 0.01


def test_mc_scaled_evolution_is_time_rescaling():
    N, r, sigma2 = 16, 0.5, 1.0 / 16
    alpha = math.sqrt(sigma2 * (r * r + 1))
    t = np.array([0.3, 1.1])
    a = correlator_mc(N, r, sigma2, t, 3, master_seed=52, scaled_evolution=True)
    b = correlator_mc(N, r, sigma2, t / alpha, 3, master_seed=52)
    assert np.allclose(a.mc, b.mc, rtol=1e-12)


def _synthetic_sff(t, values, M=10):
    return SffSeries(np.asarray(t, dtype=float), np.asarray(values, dtype=float),
                     np.zeros(len(t)), M)


def test_exact_at_zero_time():
    N, r = 32, 0.43
    series = _synthetic_sff([0.0], [N**2])
    val = correlator_exact(N, r, np.array([0.0]), series)
    assert val[0] == pytest.approx(1.0, rel=1e-14)


def test_exact_late_time_limit():
    # plateau R -> N gives G -> r^2/(r^2+1) + 1/(N (r^2+1))
    N, r, t = 100, 0.43, 123.0
    series = _synthetic_sff([t * math.sqrt(r * r + 1)], [float(N)])
    val = correlator_exact(N, r, np.array([t]), series)
    assert val[0] == pytest.approx(r * r / (r * r + 1) + 1 / (N * (r * r + 1)),
                                   rel=1e-14)


def test_exact_scaled_agrees_after_time_rescaling():
    # Eq-27 and Eq-29 variants coincide under t -> t/alpha, given one SFF
    N, r = 64, 0.8
    sigma2 = 1.0 / N
    alpha = math.sqrt(sigma2 * (r * r + 1.0))
    t = np.array([0.5, 2.0, 7.0])
    tp_grid = np.unique(np.concatenate([t / math.sqrt(sigma2),
                                        (t / alpha) * math.sqrt(r * r + 1)]))
    gen = np.random.default_rng(1)
    series = _synthetic_sff(tp_grid, N + N * gen.random(len(tp_grid)))
    scaled = correlator_exact_scaled(N, r, t, series, sigma2)
    unscaled = correlator_exact(N, r, t / alpha, series)
    assert np.allclose(scaled, r * r * unscaled, rtol=1e-12)


def test_exact_interpolates_in_log_t():
    N, r = 16, 1.0
    tp = np.array([1.0, 4.0])
    series = _synthetic_sff(tp, [100.0, 200.0])
    t_query = np.array([2.0 / math.sqrt(r * r + 1)])   # geometric midpoint
    val = correlator_exact(N, r, t_query, series)
    assert val[0] == pytest.approx((150.0 / N**2 + r * r) / (r * r + 1))


def test_exact_rejects_out_of_range():
    series = _synthetic_sff([1.0, 2.0], [10.0, 10.0])
    with pytest.raises(ValueError):
        correlator_exact(8, 1.0, np.array([5.0]), series)


def test_free_limits():
    r = 0.43
    assert correlator_free(100, r, 0.0) == pytest.approx(r * r, rel=1e-14)
    late = correlator_free(100, r, 1e6)
    assert late == pytest.approx(r**4 / (r * r + 1.0), rel=1e-6)


def test_free_vs_exact_plateau_gap():
    # difference is the 1/N plateau term
    N, r, t = 1000, 0.43, 1e3
    series = _synthetic_sff([t * math.sqrt(N)], [float(N)])
    exact_scaled = correlator_exact_scaled(N, r, np.array([t]), series, 1.0 / N)
    free = correlator_free(N, r, t)
    assert abs(exact_scaled[0] - free) < 2.0 / N


def test_box_sff_values():
    import scipy.special
    N = 64
    assert box_sff(N, 0.0) == N**2
    at_onset = box_sff(N, 2.0 * N)
    bt = N**2 * (scipy.special.j1(4.0 * N) / (2.0 * N)) ** 2
    assert bt < 1.0
    assert abs(at_onset - N) == pytest.approx(bt, rel=1e-12)


def test_box_sff_ramp_is_linear():
    # after removing the Bessel hump: N - N r2(t') = t'/2 exactly
    import scipy.special
    N = 64
    tp = np.array([5.0, 17.0, 63.0])
    vals = box_sff(N, tp) - N**2 * (scipy.special.j1(2 * tp) / tp) ** 2
    assert np.allclose(vals, tp / 2.0, rtol=1e-12)


def test_disconnected_fs_values():
    assert disconnected_fs(0.0) == pytest.approx(-0.5, abs=1e-6)
    assert disconnected_fs(1.0) == pytest.approx(-1.0 / 8.0, abs=1e-6)


def test_disconnected_plus_extensive_is_full_fs():
    N, r = 64, 0.7
    total = disconnected_fs(r) + N / (2 * (r * r + 1) ** 2)
    assert total == pytest.approx((N - 1) / (2 * (r * r + 1) ** 2), abs=1e-6)


def test_virial_hand_value():
    assert virial_expectation(2, 1.0, 2.0) == 1.0


def test_virial_pair_sum_two_by_two_mc():
    # E[sum_{i != j} 1/(E_i - E_j)^2] -> 1 for GUE(sigma*^2 = 1) at N = 2;
    # the summand has infinite variance, so convergence is slow (5% here)
    gen = stream(53, 0)
    d = gen.normal(0.0, 1.0, (400_000, 2))
    x = gen.normal(0.0, np.sqrt(0.5), 400_000)
    y = gen.normal(0.0, np.sqrt(0.5), 400_000)
    gap2 = (d[:, 0] - d[:, 1]) ** 2 + 4 * (x * x + y * y)
    assert abs(np.mean(2.0 / gap2) - 1.0) < 0.05


def test_fs_from_sff_matches_closed_form():
    N, M, r = 64, 500, 1.0
    mean, se = fs_from_sff(N, r, M, master_seed=54)
    assert abs(mean - (N - 1) / (2 * (r * r + 1) ** 2)) <= 3 * se


def test_fs_from_sff_reuses_given_spectra():
    # feeding explicit spectra gives exactly the mean of per-spectrum sums
    gen = np.random.default_rng(3)
    eigs = [np.sort(gen.normal(size=8)) for _ in range(5)]
    mean, _ = fs_from_sff(8, 0.5, 0, eigenvalues=eigs)
    direct = np.mean([pair_sum_fs(E, 8, 0.5) for E in eigs])
    assert mean == pytest.approx(direct, rel=1e-15)


def test_fs_from_sff_consistent_with_qmt_mc():
    # unweighted pair-sum route and the operator-weighted QMT estimator are
    # two estimators of the same closed form; agree statistically
    from rmtgeom.ensembles import EnsembleSpec
    from rmtgeom.geometry import gue_metric_closed, qmt_mc
    N, M, r = 48, 300, 1.0
    mean, se = fs_from_sff(N, r, M, master_seed=55)
    g = EnsembleSpec("GUE", N)
    est = qmt_mc(g, g, g, r, 0.0, M, master_seed=56)
    target = gue_metric_closed(N, r)[0]
    assert abs(mean - target) <= 4 * se
    assert abs(est.g_rr[0] - target) <= 4 * est.g_rr[1]
