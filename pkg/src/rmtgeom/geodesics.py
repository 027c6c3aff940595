"""Geodesics on the two parameter manifolds.

Closed-form trajectories for the constant-curvature GUE metric
A/(r^2+1)^2 dr^2 + A r^2/(r^2+1) dphi^2 (A = (N-1)/2), a numeric
integrator for the integrability-breaking metric in sphere-like
coordinates (r = sqrt(2) cot(theta)), the small-theta analytic
approximation, and the great-circle distance utility.

Conserved quantities: L = g_phiphi phidot along every geodesic and the
squared speed K^2 = g_ab xdot^a xdot^b; the integrator records both as
per-step residuals rather than using them to advance the state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .numerics import integrate_adaptive

__all__ = [
    "GeodesicConstants", "GeodesicTrajectory",
    "gue_geodesic_r", "gue_geodesic_phi", "gue_bounce_lambda",
    "gue_divergence_lambda", "gue_ode_residual",
    "intbreak_g_theta", "intbreak_g_phi", "intbreak_geodesic",
    "intbreak_theta_approx", "intbreak_r_approx", "sphere_distance",
]

_ENDPOINT_DELTA = 1e-6


@dataclass(frozen=True)
class GeodesicConstants:
    """Speed constant K, angular-momentum constant L, metric scale A."""

    K: float
    L: float = 0.0
    A: float = 1.0

    def __post_init__(self):
        if self.K <= 0:
            raise ValueError("K must be positive")
        if self.L < 0:
            raise ValueError("L must be nonnegative")
        if self.A <= 0:
            raise ValueError("A must be positive")


@dataclass(frozen=True)
class GeodesicTrajectory:
    lam: np.ndarray
    theta: np.ndarray
    r: np.ndarray
    phi: np.ndarray
    L_residual: np.ndarray
    K_residual: np.ndarray
    branch: str
    termination: str


def _branch_sign(branch: str) -> float:
    if branch == "growing":
        return 1.0
    if branch == "decaying":
        return -1.0
    raise ValueError("branch must be 'growing' or 'decaying'")


def _gue_c2(c: GeodesicConstants, r0: float) -> float:
    val = r0 * r0 - c.L**2 * (r0 * r0 + 1.0) / (c.A * c.K**2)
    if val <= 0:
        raise ValueError(
            f"no turning constant: A K^2 = {c.A * c.K**2} <= "
            f"L^2 (1 + r0^2)/r0^2 = {c.L**2 * (1 + r0**2) / r0**2}")
    return math.sqrt(val)


def gue_divergence_lambda(c: GeodesicConstants, r0: float, branch: str) -> float:
    """Parameter value where the chosen branch grows beyond any bound."""
    c1 = math.atan(_gue_c2(c, r0))
    sgn = _branch_sign(branch)
    return (math.pi / 2.0 - sgn * c1) * math.sqrt(c.A) / c.K


def _gue_inner_angle(c: GeodesicConstants, r0: float, branch: str, lam):
    c1 = math.atan(_gue_c2(c, r0))
    return c.K * np.asarray(lam) / math.sqrt(c.A) + _branch_sign(branch) * c1


def gue_geodesic_r(c: GeodesicConstants, r0: float, branch: str, lam):
    """Closed-form radial solution r_+/- (lambda) with r(0) = r0.

    Valid below the divergence parameter; requests beyond it raise with the
    divergence value in the message.
    """
    lam_div = gue_divergence_lambda(c, r0, branch)
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr >= lam_div):
        raise ValueError(f"lambda beyond divergence at lambda_pm = {lam_div}")
    u = _gue_inner_angle(c, r0, branch, lam_arr)
    ak2 = c.A * c.K**2
    val = np.sqrt((ak2 * np.tan(u) ** 2 + c.L**2) / (ak2 - c.L**2))
    return float(val) if np.isscalar(lam) else val


def gue_bounce_lambda(c: GeodesicConstants, r0: float) -> float:
    """Where the initially decaying solution turns around and regrows.

    lambda_bounce = sqrt(A)/K arccot(1/C2); for L = 0 this is the zero
    crossing sqrt(A)/K arctan(r0). Always precedes the divergence.
    """
    return math.sqrt(c.A) / c.K * math.atan(_gue_c2(c, r0))


def _unwrapped_arctan(kappa: float, u) -> np.ndarray:
    # continuous increasing branch of arctan(kappa tan u)
    u = np.asarray(u, dtype=float)
    wind = np.floor(u / np.pi + 0.5)
    return np.arctan(kappa * np.tan(u)) + np.pi * wind


def gue_geodesic_phi(c: GeodesicConstants, r0: float, branch: str, lam,
                     phi0: float = 0.0):
    """Angular solution with phi(0) = phi0; monotone nondecreasing for L >= 0.

    L = 0 orbits keep phi constant.
    """
    if c.L == 0:
        z = np.zeros_like(np.asarray(lam, dtype=float)) + phi0
        return float(z) if np.isscalar(lam) else z
    kappa = math.sqrt(c.A) * c.K / c.L
    u = _gue_inner_angle(c, r0, branch, lam)
    u0 = _gue_inner_angle(c, r0, branch, 0.0)
    val = _unwrapped_arctan(kappa, u) - _unwrapped_arctan(kappa, u0) + phi0
    return float(val) if np.isscalar(lam) else val


def _gue_r_complex(c: GeodesicConstants, r0: float, branch: str, lam):
    """r(lambda) continued to complex lambda (for complex-step derivatives)."""
    c1 = math.atan(_gue_c2(c, r0))
    u = c.K * lam / math.sqrt(c.A) + _branch_sign(branch) * c1
    ak2 = c.A * c.K**2
    return np.sqrt((ak2 * np.tan(u) ** 2 + c.L**2) / (ak2 - c.L**2))


def gue_ode_residual(c: GeodesicConstants, r0: float, branch: str,
                     lam: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Residuals of the second-order geodesic equations along the closed form.

    Derivatives are taken by complex step (no cancellation error), so the
    residual isolates the solution itself:
        rddot - r (phidot^2 + 2 rdot^2/(r^2+1))          [radial equation]
        phiddot + 2 phidot rdot / (r (r^2+1))            [angular equation]
    """
    h = 1e-30
    lam = np.asarray(lam, dtype=float)
    r = _gue_r_complex(c, r0, branch, lam + 0j).real

    def rdot_analytic(z):
        c1 = math.atan(_gue_c2(c, r0))
        u = c.K * z / math.sqrt(c.A) + _branch_sign(branch) * c1
        ak2 = c.A * c.K**2
        rr = np.sqrt((ak2 * np.tan(u) ** 2 + c.L**2) / (ak2 - c.L**2))
        return ak2 * np.tan(u) / np.cos(u) ** 2 * (c.K / math.sqrt(c.A)) \
            / ((ak2 - c.L**2) * rr)

    def phidot_analytic(z):
        rr = _gue_r_complex(c, r0, branch, z)
        return c.L * (rr**2 + 1.0) / (c.A * rr**2)

    rdot = rdot_analytic(lam + 0j).real
    rddot = rdot_analytic(lam + 1j * h).imag / h
    phidot = phidot_analytic(lam + 0j).real
    phiddot = phidot_analytic(lam + 1j * h).imag / h
    res_r = rddot - r * (phidot**2 + 2.0 * rdot**2 / (r**2 + 1.0))
    res_phi = phiddot + 2.0 * phidot * rdot / (r * (r**2 + 1.0))
    return res_r, res_phi


def gue_conserved_residual(c: GeodesicConstants, r0: float, branch: str,
                           lam: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Conserved-quantity residuals |g_pp phidot - L| and |g ab xdot xdot - K^2|
    along the closed-form trajectory, with derivatives taken independently
    (complex step in r, central differences in phi). Stays well-scaled even
    close to the divergence parameter where r is large.
    """
    h = 1e-30
    lam = np.asarray(lam, dtype=float)
    r = _gue_r_complex(c, r0, branch, lam + 0j).real
    rdot = _gue_r_complex(c, r0, branch, lam + 1j * h).imag / h
    hf = 1e-6
    pdot = (gue_geodesic_phi(c, r0, branch, lam + hf)
            - gue_geodesic_phi(c, r0, branch, lam - hf)) / (2 * hf)
    g_rr = c.A / (r**2 + 1.0) ** 2
    g_pp = c.A * r**2 / (r**2 + 1.0)
    L_res = np.abs(g_pp * pdot - c.L)
    K_res = np.abs(g_rr * rdot**2 + g_pp * pdot**2 - c.K**2)
    return L_res, K_res


# --- integrability-breaking manifold, coordinates (theta, phi) -----------

_SERIES_CUT = 0.05  # below this the closed forms cancel catastrophically


def intbreak_g_theta(theta):
    """g_thetatheta = (2 theta/sin 2theta - 1) cosec^2(theta)/4."""
    theta = np.asarray(theta, dtype=float)
    t2 = theta * theta
    small = 1.0 / 6.0 + t2 * (2.0 / 15.0 + t2 * (22.0 / 315.0
            + t2 * (148.0 / 4725.0 + t2 * 98.0 / 7425.0)))
    with np.errstate(invalid="ignore", divide="ignore"):
        closed = 0.25 * (2.0 * theta / np.sin(2.0 * theta) - 1.0) / np.sin(theta) ** 2
    return np.where(theta < _SERIES_CUT, small, closed)


def intbreak_g_phi(theta):
    """g_phiphi = theta cot(theta)/2."""
    theta = np.asarray(theta, dtype=float)
    return 0.5 * theta / np.tan(theta)


def _d_g_theta(theta):
    theta = np.asarray(theta, dtype=float)
    t2 = theta * theta
    small = theta * (4.0 / 15.0 + t2 * (88.0 / 315.0
            + t2 * (296.0 / 1575.0 + t2 * 784.0 / 7425.0)))
    with np.errstate(invalid="ignore", divide="ignore"):
        s2 = np.sin(2.0 * theta)
        u = 2.0 * theta / s2
        du = 2.0 / s2 - 4.0 * theta * np.cos(2.0 * theta) / s2**2
        closed = 0.25 * (du - 2.0 * (u - 1.0) / np.tan(theta)) / np.sin(theta) ** 2
    return np.where(theta < _SERIES_CUT, small, closed)


def _d_g_phi(theta):
    theta = np.asarray(theta, dtype=float)
    t2 = theta * theta
    small = -theta * (1.0 / 3.0 + t2 * (2.0 / 45.0 + t2 * (2.0 / 315.0
            + t2 * 4.0 / 4725.0)))
    closed = 0.5 * (1.0 / np.tan(theta) - theta / np.sin(theta) ** 2)
    return np.where(theta < _SERIES_CUT, small, closed)


def intbreak_geodesic(theta0: float, phi0: float, K: float, L: float,
                      branch: str = "decaying", lam_max: float = 50.0,
                      rtol: float = 1e-10, atol: float = 1e-10,
                      max_step: float = np.inf) -> GeodesicTrajectory:
    """Numerically integrated geodesic of the integrability-breaking metric.

    Integrates the second-order equations (first-order square-root forms are
    sign-ambiguous at turning points); terminates when theta crosses delta or
    pi/2 - delta (delta = 1e-6) or at lam_max. Initial velocities come from
    the conserved quantities: phidot = L/g_phiphi, thetadot from the speed
    constraint with the branch sign. Residuals of both conserved quantities
    are recorded along the trajectory.
    """
    if not (0.0 < theta0 < math.pi / 2.0):
        raise ValueError("theta0 must lie in (0, pi/2)")
    gp0 = float(intbreak_g_phi(theta0))
    gt0 = float(intbreak_g_theta(theta0))
    bracket = K * K - L * L / gp0
    if bracket < 0:
        raise ValueError(
            f"no real trajectory: K^2 = {K*K} < L^2/g_phiphi(theta0) = {L*L/gp0}")
    sgn = _branch_sign(branch)
    y0 = [theta0, sgn * math.sqrt(bracket / gt0), phi0,
          L / gp0 if gp0 > 0 else 0.0]

    def rhs(lam, y):
        th, thd, _, phd = y
        gt, gp = intbreak_g_theta(th), intbreak_g_phi(th)
        dgt, dgp = _d_g_theta(th), _d_g_phi(th)
        thdd = -dgt / (2.0 * gt) * thd * thd + dgp / (2.0 * gt) * phd * phd
        phdd = -dgp / gp * thd * phd
        return [thd, thdd, phd, phdd]

    lo = lambda lam, y: y[0] - _ENDPOINT_DELTA
    hi = lambda lam, y: y[0] - (math.pi / 2.0 - _ENDPOINT_DELTA)
    lo.terminal = hi.terminal = True
    sol = integrate_adaptive(rhs, (0.0, lam_max), y0, events=[lo, hi],
                             rtol=rtol, atol=atol, max_step=max_step)
    if sol.status == 1:
        termination = "theta_zero" if len(sol.t_events[0]) else "theta_half_pi"
    elif sol.status == 0:
        termination = "lambda_max"
    else:
        termination = f"truncated: {sol.message}"
    th, thd, ph, phd = sol.y
    gt, gp = intbreak_g_theta(th), intbreak_g_phi(th)
    L_res = np.abs(gp * phd - L)
    K_res = np.abs(gt * thd**2 + gp * phd**2 - K * K)
    return GeodesicTrajectory(
        lam=sol.t, theta=th, r=np.sqrt(2.0) / np.tan(th), phi=ph,
        L_residual=L_res, K_residual=K_res, branch=branch,
        termination=termination)


def _approx_constants(K: float, L: float) -> Tuple[float, float]:
    disc = K * K - 2.0 * L * L
    if disc <= 0:
        raise ValueError(f"small-theta expansion needs K^2 > 2 L^2; "
                         f"got K^2 = {K*K}, 2 L^2 = {2*L*L}")
    a1 = math.sqrt(6.0 * disc)
    # Taylor coefficient of the expanded thetadot equation; see tests for the
    # numeric-trajectory cross-check of this constant.
    a2 = 0.4 * (7.0 * L * L - 6.0 * K * K) / a1
    return a1, a2


def intbreak_theta_approx(theta0: float, K: float, L: float, lam):
    """Small-theta decaying solution theta' = -(A1 + A2 theta^2), theta(0) = theta0.

    Evaluated through the closed tangent form continued in the complex plane
    so both signs of A2 share one expression.
    """
    a1, a2 = _approx_constants(K, L)
    lam = np.asarray(lam, dtype=float)
    if abs(a2) < 1e-14:
        val = theta0 - a1 * lam
    else:
        # branch-consistent pair: ra*sq = A1 and sq/ra = A2 exactly, so the
        # expression solves theta' = -(A1 + A2 theta^2) for either sign of A2
        ra = complex(a1 / a2) ** 0.5
        sq = a1 / ra
        z = -ra * np.tan(sq * lam - np.arctan(theta0 / ra))
        assert np.max(np.abs(np.imag(z))) < 1e-9 * max(1.0, np.max(np.abs(z)))
        val = np.real(z)
    return float(val) if np.isscalar(lam) and np.ndim(val) == 0 else val


def intbreak_r_approx(theta0: float, K: float, L: float, lam):
    """r(lambda) = sqrt(2) cot(theta_approx(lambda))."""
    th = intbreak_theta_approx(theta0, K, L, lam)
    return np.sqrt(2.0) / np.tan(th)


def sphere_distance(theta0: float, phi0: float, theta1: float, phi1: float,
                    A: float = 1.0) -> float:
    """Great-circle distance in the sphere chart, scale convention as printed:

        arccos[sin(t0/sqrt A) sin(t1/sqrt A)
               + cos(t0/sqrt A) cos(t1/sqrt A) cos(p0 - p1)].

    Coincides with the metric arclength of A(dtheta^2 + cos^2 theta dphi^2)
    at A = 1.
    """
    sa = math.sqrt(A)
    inner = (math.sin(theta0 / sa) * math.sin(theta1 / sa)
             + math.cos(theta0 / sa) * math.cos(theta1 / sa)
             * math.cos(phi0 - phi1))
    return math.acos(min(1.0, max(-1.0, inner)))
