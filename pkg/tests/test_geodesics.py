import math

import numpy as np
import pytest
import scipy.integrate
import scipy.optimize

from rmtgeom.geodesics import (GeodesicConstants, GeodesicTrajectory,
                               gue_bounce_lambda, gue_divergence_lambda,
                               gue_geodesic_phi, gue_geodesic_r,
                               gue_ode_residual, intbreak_g_phi,
                               intbreak_g_theta, intbreak_geodesic,
                               intbreak_r_approx, intbreak_theta_approx,
                               sphere_distance)


# ---------------------------------------------------------------- GUE closed forms

def test_initial_condition_both_branches():
    c = GeodesicConstants(K=1.0, L=0.3, A=2.0)
    for branch in ("growing", "decaying"):
        assert gue_geodesic_r(c, 1.2, branch, 0.0) == pytest.approx(1.2, rel=1e-12)


def test_zero_angular_momentum_tangent_form():
    c = GeodesicConstants(K=0.8, L=0.0, A=1.5)
    r0 = 1.0
    for lam in (0.05, 0.2, 0.4):
        for branch, sgn in (("growing", 1), ("decaying", -1)):
            expected = abs(math.tan(c.K * lam / math.sqrt(c.A)
                                    + sgn * math.atan(r0)))
            assert gue_geodesic_r(c, r0, branch, lam) == pytest.approx(
                expected, rel=1e-12)


def test_ode_residual_small_on_grid():
    c = GeodesicConstants(K=1.0, L=0.3, A=1.0)
    lam = np.linspace(0.0, 0.9 * gue_divergence_lambda(c, 1.0, "growing"), 50)
    res_r, res_p = gue_ode_residual(c, 1.0, "growing", lam)
    assert np.abs(res_r).max() < 1e-8
    assert np.abs(res_p).max() < 1e-8


def test_bounce_hand_value():
    c = GeodesicConstants(K=1.0, L=0.0, A=1.0)
    assert gue_bounce_lambda(c, 1.0) == pytest.approx(math.pi / 4, rel=1e-14)


def test_bounce_matches_numeric_minimum():
    c = GeodesicConstants(K=0.9, L=0.25, A=1.0)
    r0 = 1.3
    lam_b = gue_bounce_lambda(c, r0)
    res = scipy.optimize.minimize_scalar(
        lambda lam: gue_geodesic_r(c, r0, "decaying", lam),
        bounds=(0.0, 0.98 * gue_divergence_lambda(c, r0, "decaying")),
        method="bounded", options={"xatol": 1e-10})
    assert res.x == pytest.approx(lam_b, abs=1e-6)


def test_bounce_precedes_divergence_randomized():
    gen = np.random.default_rng(5)
    count = 0
    while count < 1000:
        K, L, r0 = gen.uniform(0.2, 2.0), gen.uniform(0.0, 1.0), gen.uniform(0.3, 3.0)
        c = GeodesicConstants(K=K, L=L, A=1.0)
        if c.A * K**2 <= L**2 * (1 + r0**2) / r0**2:
            continue
        assert gue_bounce_lambda(c, r0) < gue_divergence_lambda(c, r0, "decaying")
        count += 1


def test_divergence_error_names_value():
    c = GeodesicConstants(K=1.0, L=0.0, A=1.0)
    lam_div = gue_divergence_lambda(c, 1.0, "growing")
    with pytest.raises(ValueError, match=f"{lam_div:.6f}"[:6]):
        gue_geodesic_r(c, 1.0, "growing", lam_div + 0.01)


def test_r_grows_beyond_bound_near_divergence():
    c = GeodesicConstants(K=1.0, L=0.0, A=1.0)
    for branch in ("growing", "decaying"):
        lam_div = gue_divergence_lambda(c, 1.0, branch)
        assert gue_geodesic_r(c, 1.0, branch, 0.999 * lam_div) > 1e3 / 4


def test_finite_lambda_reaches_large_r():
    c = GeodesicConstants(K=1.0, L=0.2, A=1.0)
    lam_div = gue_divergence_lambda(c, 1.0, "growing")
    lam = scipy.optimize.brentq(
        lambda x: gue_geodesic_r(c, 1.0, "growing", x) - 1e3,
        1e-9, lam_div * (1 - 1e-9))
    assert 0 < lam < lam_div


def test_phi_initial_value_and_rate():
    c = GeodesicConstants(K=1.0, L=0.4, A=1.0)
    r0 = 1.1
    assert gue_geodesic_phi(c, r0, "growing", 0.0) == 0.0
    h = 1e-7
    rate = (gue_geodesic_phi(c, r0, "growing", h)
            - gue_geodesic_phi(c, r0, "growing", -h)) / (2 * h)
    assert rate == pytest.approx(c.L * (r0**2 + 1) / (c.A * r0**2), abs=1e-6)


def test_phi_monotone_and_orbit_identity():
    c = GeodesicConstants(K=1.0, L=0.4, A=1.0)
    r0 = 1.1
    lam = np.linspace(0.0, 0.95 * gue_divergence_lambda(c, r0, "growing"), 200)
    phi = gue_geodesic_phi(c, r0, "growing", lam)
    assert np.all(np.diff(phi) >= 0)
    r = gue_geodesic_r(c, r0, "growing", lam)
    # r^2 = L^2 (tan^2(phi + phi0) + 1)/(A K^2 - L^2); recover phi0 at lam=0
    denom = c.A * c.K**2 - c.L**2
    phi0 = math.atan(math.sqrt((r0**2 * denom) / c.L**2 - 1.0))
    resid = r**2 - c.L**2 * (np.tan(phi + phi0) ** 2 + 1.0) / denom
    assert np.abs(resid).max() < 1e-8


def test_phi_constant_for_zero_angular_momentum():
    c = GeodesicConstants(K=1.0, L=0.0, A=1.0)
    assert gue_geodesic_phi(c, 1.0, "growing", 0.3) == 0.0


# ---------------------------------------------------------------- intbreak numeric

def test_growing_saturates_at_turning_point():
    # L conservation caps theta at theta* solving theta cot(theta) = 2 L^2/K^2
    traj = intbreak_geodesic(math.pi / 5, 0.0, 1.0, 0.1, "growing", 40.0)
    theta_star = scipy.optimize.brentq(
        lambda th: th / math.tan(th) - 0.02, 1.2, math.pi / 2 - 1e-12)
    assert traj.theta.max() == pytest.approx(theta_star, abs=1e-3)
    assert traj.L_residual.max() < 1e-8
    assert traj.K_residual.max() < 1e-8


def test_decaying_reaches_zero_at_finite_lambda():
    traj = intbreak_geodesic(math.pi / 3, 0.0, math.sqrt(0.1), 0.1,
                             "decaying", 80.0)
    assert traj.termination == "theta_zero"
    assert traj.lam[-1] < 10.0
    assert traj.theta[-1] == pytest.approx(1e-6, rel=1e-3)
    assert traj.L_residual.max() < 1e-8
    assert traj.K_residual.max() < 1e-8


def test_no_real_trajectory_when_angular_term_dominates():
    with pytest.raises(ValueError, match="no real trajectory"):
        intbreak_geodesic(math.pi / 3, 0.0, 0.1, 0.1, "decaying", 10.0)


def test_trajectory_record_fields():
    traj = intbreak_geodesic(0.8, 0.0, 0.5, 0.05, "decaying", 5.0)
    assert isinstance(traj, GeodesicTrajectory)
    assert traj.branch == "decaying"
    assert np.allclose(traj.r, np.sqrt(2.0) / np.tan(traj.theta))


# ---------------------------------------------------------------- approximations

def test_theta_approx_initial_value():
    assert intbreak_theta_approx(0.5, 0.4, 0.1, 0.0) == pytest.approx(0.5, rel=1e-12)


def test_theta_approx_precondition():
    # K = L = 0.1 sits outside the expansion's domain (K^2 <= 2 L^2)
    with pytest.raises(ValueError):
        intbreak_theta_approx(math.pi / 3, 0.1, 0.1, 0.0)


def test_theta_approx_tracks_numeric_trajectory():
    K, L, th0 = 0.3, 0.1, math.pi / 6
    traj = intbreak_geodesic(th0, 0.0, K, L, "decaying", 30.0)
    mask = traj.theta > 0.05
    approx = intbreak_theta_approx(th0, K, L, traj.lam[mask])
    assert np.abs(approx - traj.theta[mask]).max() < 0.05 * th0


def test_r_approx_initial_value_and_growth():
    K, L, th0 = math.sqrt(0.1), 0.1, math.pi / 3
    assert intbreak_r_approx(th0, K, L, 0.0) == pytest.approx(
        math.sqrt(2.0) / math.tan(th0), rel=1e-12)
    lam = np.linspace(0.0, 0.3, 61)
    r = intbreak_r_approx(th0, K, L, lam)
    second = np.diff(r, 2)
    assert np.all(second > 0)   # linear growth then superlinear


def test_r_approx_tracks_numeric_trajectory():
    # same expansion regime as the theta test; cot amplifies the phase error
    # near the theta floor, so the constants must respect K^2 >> 2 L^2
    K, L, th0 = 0.3, 0.1, math.pi / 6
    traj = intbreak_geodesic(th0, 0.0, K, L, "decaying", 30.0)
    mask = traj.theta > 0.05
    approx = intbreak_r_approx(th0, K, L, traj.lam[mask])
    rel = np.abs(approx / traj.r[mask] - 1.0)
    assert rel.max() < 0.05


# ---------------------------------------------------------------- sphere distance

def test_sphere_distance_basics():
    assert sphere_distance(0.3, 0.1, 0.3, 0.1) == 0.0
    d1 = sphere_distance(0.2, 0.0, 0.7, 1.1, A=1.0)
    d2 = sphere_distance(0.7, 1.1, 0.2, 0.0, A=1.0)
    assert d1 == d2


def test_sphere_distance_matches_arclength_quadrature():
    c = GeodesicConstants(K=0.9, L=0.35, A=1.0)
    r0, lam1 = 1.1, 0.5
    r1 = gue_geodesic_r(c, r0, "growing", lam1)
    p1 = gue_geodesic_phi(c, r0, "growing", lam1)
    th0, th1 = math.atan(1.0 / r0), math.atan(1.0 / r1)

    def speed(lam):
        h = 1e-6
        rdot = (gue_geodesic_r(c, r0, "growing", lam + h)
                - gue_geodesic_r(c, r0, "growing", lam - h)) / (2 * h)
        pdot = (gue_geodesic_phi(c, r0, "growing", lam + h)
                - gue_geodesic_phi(c, r0, "growing", lam - h)) / (2 * h)
        rv = gue_geodesic_r(c, r0, "growing", lam)
        return math.sqrt(c.A / (rv**2 + 1) ** 2 * rdot**2
                         + c.A * rv**2 / (rv**2 + 1) * pdot**2)

    arclen, _ = scipy.integrate.quad(speed, 0.0, lam1, limit=200)
    assert sphere_distance(th0, 0.0, th1, p1, A=1.0) == pytest.approx(
        arclen, abs=1e-6)


def test_metric_functions_match_r_chart():
    # g_phiphi(theta) equals the r-chart component under r = sqrt(2) cot(theta)
    from rmtgeom.geometry import intbreak_metric
    for th in (0.3, 0.8, 1.2):
        r = math.sqrt(2.0) / math.tan(th)
        assert float(intbreak_g_phi(th)) == pytest.approx(
            intbreak_metric(r)[1], rel=1e-12)
        drdth = -math.sqrt(2.0) / math.sin(th) ** 2
        assert float(intbreak_g_theta(th)) == pytest.approx(
            intbreak_metric(r)[0] * drdth**2, rel=1e-10)
