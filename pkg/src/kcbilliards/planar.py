"""Planar Kepler-Coulomb flow in the normalized chart.

Provides the vector field (with the optional centrifugal perturbation),
conic orbit elements, anomaly-equation solvers, exact conic propagation
for either mass sign, time-of-flight helpers used by the analytic
billiard map, and the elastic continuation through collisions.

Sign convention: the acceleration is -m*q/r^3 + beta*q/r^4, so m > 0
attracts and m < 0 repels; beta > 0 is an outward force beta/r^3 with
potential term beta/(2 r^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    CollisionInsideInterval,
    NonConvergence,
    NotACollisionOrbit,
    PerturbedModel,
    SingularPosition,
)
from .integrals import angular_momentum, lrl_eta, lrl_xi, planar_energy
from .model import PlanarState, SystemParams

R_MIN_DEFAULT = 1e-12
_MAX_ITER = 200


def kepler_accel(position, params: SystemParams, r_min: float = R_MIN_DEFAULT) -> np.ndarray:
    """Acceleration -m*q/r^3 + beta*q/r^4 at a planar position.

    Raises:
        SingularPosition: if r < r_min (default 1e-12).
    """
    q = np.asarray(position, dtype=float)
    r = math.hypot(q[0], q[1])
    if r < r_min:
        raise SingularPosition(f"r = {r} below the singular-position guard {r_min}")
    coeff = -params.m / r**3
    if params.beta != 0.0:
        coeff += params.beta / r**4
    return coeff * q


def flow_rhs(t, y, params: SystemParams, r_min: float = R_MIN_DEFAULT):
    """Right-hand side of the first-order system for solve_ivp."""
    r = math.hypot(y[0], y[1])
    if r < r_min:
        raise SingularPosition(f"r = {r} below the singular-position guard {r_min}")
    coeff = -params.m / r**3
    if params.beta != 0.0:
        coeff += params.beta / r**4
    return (y[2], y[3], coeff * y[0], coeff * y[1])


def collision_tolerance(state: PlanarState, l_tol: float = 1e-10) -> float:
    """Angular-momentum threshold below which an orbit counts as radial."""
    return l_tol * max(1e-30, state.speed * state.r)


@dataclass(frozen=True)
class ConicElements:
    """Keplerian elements of the conic through a state (beta = 0 only)."""

    E_pl: float
    L: float
    A_xi: float
    A_eta: float
    e: float
    p: float
    pericenter_angle: float


def orbit_elements(state: PlanarState, params: SystemParams) -> ConicElements:
    """Conic elements from a state; requires the unperturbed field.

    Raises:
        PerturbedModel: if params.beta != 0.
    """
    if params.beta != 0.0:
        raise PerturbedModel("orbit elements are Keplerian only (beta must be 0)")
    m = params.m
    E = planar_energy(state, m)
    L = angular_momentum(state)
    A_xi = lrl_xi(state, m)
    A_eta = lrl_eta(state, m)
    return ConicElements(
        E_pl=E,
        L=L,
        A_xi=A_xi,
        A_eta=A_eta,
        e=math.hypot(A_xi, A_eta) / abs(m),
        p=L * L / abs(m),
        pericenter_angle=math.atan2(A_eta, A_xi),
    )


# ---------------------------------------------------------------------------
# Anomaly equations
# ---------------------------------------------------------------------------

def solve_kepler_elliptic(mean_anomaly: float, e: float, tol: float = 1e-14) -> float:
    """Solve E - e*sin(E) = M for the eccentric anomaly, 0 <= e < 1.

    Newton iteration with a bisection safeguard on the bracket
    [M - e, M + e]; residual below 1e-13 for any e bounded away from 1.
    """
    M = mean_anomaly
    # reduce to [-pi, pi] and restore the multiple of 2*pi afterwards
    k = math.floor((M + math.pi) / (2.0 * math.pi))
    Mr = M - 2.0 * math.pi * k
    lo, hi = Mr - e, Mr + e
    E = Mr + e * math.sin(Mr) if e < 0.8 else math.copysign(math.pi, Mr) if Mr else 0.0
    for _ in range(_MAX_ITER):
        f = E - e * math.sin(E) - Mr
        if abs(f) <= tol:
            break
        fp = 1.0 - e * math.cos(E)
        if f > 0.0:
            hi = E
        else:
            lo = E
        step = f / fp if fp > 1e-300 else 0.0
        E_new = E - step
        if not lo <= E_new <= hi:
            E_new = 0.5 * (lo + hi)
        E = E_new
    else:
        raise NonConvergence(f"elliptic anomaly solver stalled at M={M}, e={e}")
    return E + 2.0 * math.pi * k


def solve_kepler_hyperbolic(mean_anomaly: float, e: float, tol: float = 1e-14) -> float:
    """Solve e*sinh(H) - H = M, e > 1. Monotone Newton with safeguard."""
    M = mean_anomaly
    H = math.asinh(M / e) if e > 1.5 else math.copysign(
        math.log(2.0 * abs(M) / e + 1.8), M
    ) if M != 0.0 else 0.0
    lo, hi = -math.inf, math.inf
    for _ in range(_MAX_ITER):
        f = e * math.sinh(H) - H - M
        if abs(f) <= tol * max(1.0, abs(M)):
            return H
        if f > 0.0:
            hi = H
        else:
            lo = H
        fp = e * math.cosh(H) - 1.0
        H_new = H - f / fp if fp > 1e-300 else H
        if not lo < H_new < hi:
            H_new = 0.5 * (lo + hi) if math.isfinite(lo) and math.isfinite(hi) else H_new
        H = H_new
    raise NonConvergence(f"hyperbolic anomaly solver stalled at M={M}, e={e}")


def solve_barker(mean_anomaly: float) -> float:
    """Solve B + B^3/3 = M in closed form (parabolic case)."""
    M = mean_anomaly
    s = math.sqrt(9.0 * M * M + 4.0)
    w = (3.0 * M + s) / 2.0
    c = math.copysign(abs(w) ** (1.0 / 3.0), w)
    B = c - 1.0 / c if c != 0.0 else 0.0
    # one Newton polish step
    B -= (B + B**3 / 3.0 - M) / (1.0 + B * B)
    return B


def solve_repulsive(mean_anomaly: float, e: float, tol: float = 1e-14) -> float:
    """Solve e*sinh(H) + H = M (repulsive-branch anomaly). Strictly monotone."""
    M = mean_anomaly
    H = math.asinh(M / (e + 1.0))
    for _ in range(_MAX_ITER):
        f = e * math.sinh(H) + H - M
        if abs(f) <= tol * max(1.0, abs(M)):
            return H
        H -= f / (e * math.cosh(H) + 1.0)
    raise NonConvergence(f"repulsive anomaly solver stalled at M={M}, e={e}")


def solve_kepler_equation(mean_anomaly: float, e: float) -> float:
    """Anomaly from mean anomaly: eccentric (e<1), Barker (e=1), hyperbolic (e>1).

    Residual of the corresponding equation is below 1e-13; inputs with
    0 < |e - 1| < 1e-9 may raise NonConvergence.
    """
    if e < 0.0:
        raise ValueError("eccentricity must be >= 0")
    if e < 1.0:
        return solve_kepler_elliptic(mean_anomaly, e)
    if e == 1.0:
        return solve_barker(mean_anomaly)
    return solve_kepler_hyperbolic(mean_anomaly, e)


# ---------------------------------------------------------------------------
# Universal-variable propagation (m > 0)
# ---------------------------------------------------------------------------

def _stumpff_c(z: float) -> float:
    if abs(z) < 1e-5:
        return 1.0 / 2.0 - z / 24.0 + z * z / 720.0 - z**3 / 40320.0
    if z > 0.0:
        return (1.0 - math.cos(math.sqrt(z))) / z
    s = math.sqrt(-z)
    return (math.cosh(s) - 1.0) / (-z)


def _stumpff_s(z: float) -> float:
    if abs(z) < 1e-5:
        return 1.0 / 6.0 - z / 120.0 + z * z / 5040.0 - z**3 / 362880.0
    if z > 0.0:
        s = math.sqrt(z)
        return (s - math.sin(s)) / (z * s)
    s = math.sqrt(-z)
    return (math.sinh(s) - s) / (-z * s)


def _universal_propagate(state: PlanarState, dt: float, m: float) -> PlanarState:
    """f-and-g propagation through the universal anomaly, attractive field."""
    q0 = state.position
    v0 = state.velocity
    r0 = state.r
    sqm = math.sqrt(m)
    vr0 = float(np.dot(q0, v0)) / r0
    alpha = 2.0 / r0 - float(np.dot(v0, v0)) / m

    if alpha > 1e-12:
        chi = sqm * alpha * dt
    else:
        chi = sqm * dt / r0
    target = sqm * dt
    tol = 1e-13 * max(1.0, abs(target))
    converged = False
    for _ in range(_MAX_ITER):
        z = alpha * chi * chi
        C = _stumpff_c(z)
        S = _stumpff_s(z)
        F = (
            r0 * vr0 / sqm * chi * chi * C
            + (1.0 - r0 * alpha) * chi**3 * S
            + r0 * chi
            - target
        )
        if abs(F) <= tol:
            converged = True
            break
        # dF/dchi equals the radius at chi, always >= 0
        Fp = (
            r0 * vr0 / sqm * chi * (1.0 - z * S)
            + (1.0 - r0 * alpha) * chi * chi * C
            + r0
        )
        if Fp <= 1e-300:
            Fp = 1e-300
        chi -= F / Fp
    if not converged:
        raise NonConvergence("universal Kepler equation did not converge")

    z = alpha * chi * chi
    C = _stumpff_c(z)
    S = _stumpff_s(z)
    f = 1.0 - chi * chi * C / r0
    g = dt - chi**3 * S / sqm
    q1 = f * q0 + g * v0
    r1 = math.hypot(q1[0], q1[1])
    if r1 < R_MIN_DEFAULT:
        raise CollisionInsideInterval("propagation interval ends at the center")
    fdot = sqm / (r1 * r0) * chi * (z * S - 1.0)
    gdot = 1.0 - chi * chi * C / r1
    v1 = fdot * q0 + gdot * v0
    return PlanarState(q1[0], q1[1], v1[0], v1[1])


# ---------------------------------------------------------------------------
# Repulsive-branch propagation (m < 0)
# ---------------------------------------------------------------------------

def _repulsive_frame(state: PlanarState, m: float):
    """Orbit frame and anomaly data for the repulsive branch."""
    mu = -m
    E = planar_energy(state, m)
    if E <= 0.0:
        raise ValueError("repulsive orbits must have positive energy")
    abar = mu / (2.0 * E)
    A = np.array([lrl_xi(state, m), lrl_eta(state, m)])
    e = float(np.linalg.norm(A)) / mu
    e1 = A / (e * mu)
    L = angular_momentum(state)
    s_l = 1.0 if L >= 0.0 else -1.0
    e2 = s_l * np.array([-e1[1], e1[0]])
    n = math.sqrt(mu / abar**3)
    sqrt_mua = math.sqrt(mu * abar)
    qv = state.xi * state.xi_dot + state.eta * state.eta_dot
    H0 = math.asinh(qv / (e * sqrt_mua))
    return mu, abar, e, e1, e2, n, sqrt_mua, H0


def _repulsive_propagate(state: PlanarState, dt: float, m: float) -> PlanarState:
    mu, abar, e, e1, e2, n, sqrt_mua, H0 = _repulsive_frame(state, m)
    M1 = e * math.sinh(H0) + H0 + n * dt
    H = solve_repulsive(M1, e)
    r = abar * (e * math.cosh(H) + 1.0)
    x_orb = abar * (math.cosh(H) + e)
    y_orb = abar * math.sqrt(max(e * e - 1.0, 0.0)) * math.sinh(H)
    xd_orb = sqrt_mua * math.sinh(H) / r
    yd_orb = math.sqrt(max(e * e - 1.0, 0.0)) * sqrt_mua * math.cosh(H) / r
    q = x_orb * e1 + y_orb * e2
    v = xd_orb * e1 + yd_orb * e2
    return PlanarState(q[0], q[1], v[0], v[1])


# ---------------------------------------------------------------------------
# Collision continuation and radial motion
# ---------------------------------------------------------------------------

def collision_bounce(
    state: PlanarState, params: SystemParams, l_tol: float = 1e-10
) -> PlanarState:
    """Elastic continuation of a radial orbit through the center.

    The incoming branch is retraced: the outgoing state sits at the same
    position with the velocity exactly reversed, so the speed profile is
    the time-reversal of the infall and the energy is unchanged.

    Raises:
        NotACollisionOrbit: if |L| exceeds the scaled tolerance, or the
            center is never reached (m <= 0).
    """
    L = angular_momentum(state)
    if abs(L) > collision_tolerance(state, l_tol):
        raise NotACollisionOrbit(f"|L| = {abs(L)} exceeds the collision tolerance")
    if params.m <= 0.0:
        raise NotACollisionOrbit("a repulsive center is never reached")
    return state.with_velocity(-state.xi_dot, -state.eta_dot)


def radial_collision_time(state: PlanarState, m: float) -> Optional[float]:
    """Time until a radial (L = 0) orbit reaches the center, or None.

    Returns the first t > 0 with r(t) = 0; None when the orbit never
    reaches the center (m <= 0, or unbound and already receding).
    """
    if m <= 0.0:
        return None
    E = planar_energy(state, m)
    r0 = state.r
    qv = state.xi * state.xi_dot + state.eta * state.eta_dot
    e_scale = m / r0 + 0.5 * state.speed**2
    if E < -_PARABOLIC_REL * e_scale:
        a = -m / (2.0 * E)
        n = math.sqrt(m / a**3)
        # radial orbits have e = 1; collision at eccentric anomaly 0 (mod 2*pi)
        cosE = 1.0 - r0 / a
        sinE = qv / math.sqrt(m * a)
        E0 = math.atan2(sinE, cosE)
        M0 = E0 - math.sin(E0)
        dM = (-M0) % (2.0 * math.pi)
        return dM / n
    if qv >= 0.0:
        return None  # receding and unbound: never returns
    if abs(E) <= _PARABOLIC_REL * e_scale:
        d0 = qv / math.sqrt(m)
        return -(d0**3) / (6.0 * math.sqrt(m))
    aabs = m / (2.0 * E)
    n = math.sqrt(m / aabs**3)
    sinhH = qv / math.sqrt(m * aabs)
    H0 = math.asinh(sinhH)
    M0 = math.sinh(H0) - H0
    return (0.0 - M0) / n


def time_through_center(state: PlanarState, params: SystemParams) -> float:
    """Flight time from a radial pre-collision state through the bounce and back.

    Equals twice the infall time to the center; the continuation then
    retraces the incoming branch.
    """
    t = radial_collision_time(state, params.m)
    if t is None:
        raise NotACollisionOrbit("state is not on a collision course")
    return 2.0 * t


# ---------------------------------------------------------------------------
# Exact propagation and time of flight
# ---------------------------------------------------------------------------

def propagate_analytic(
    state: PlanarState, dt: float, params: SystemParams, l_tol: float = 1e-10
) -> PlanarState:
    """Propagate a state exactly along its conic by time dt.

    Uses the universal-variable formulation for m > 0 (one code path for
    elliptic, parabolic and hyperbolic motion) and the repulsive-branch
    anomaly for m < 0.

    Raises:
        PerturbedModel: if params.beta != 0.
        CollisionInsideInterval: if the orbit is radial and meets the
            center within (0, dt]; use collision_bounce to continue.
    """
    if params.beta != 0.0:
        raise PerturbedModel("analytic propagation requires beta = 0")
    if dt == 0.0:
        return state
    m = params.m
    L = angular_momentum(state)
    if m > 0.0 and abs(L) <= collision_tolerance(state, l_tol):
        t_c = radial_collision_time(state, m)
        if t_c is not None and 0.0 < t_c <= dt:
            raise CollisionInsideInterval(
                f"radial orbit reaches the center at t = {t_c} <= dt"
            )
    if m > 0.0:
        return _universal_propagate(state, dt, m)
    return _repulsive_propagate(state, dt, m)


def kepler_period(state: PlanarState, m: float) -> Optional[float]:
    """Orbital period for bound motion (m > 0, E < 0); None otherwise."""
    E = planar_energy(state, m)
    if m <= 0.0 or E >= 0.0:
        return None
    a = -m / (2.0 * E)
    return 2.0 * math.pi * math.sqrt(a**3 / m)


_PARABOLIC_REL = 1e-11


def time_of_flight(
    m: float,
    E: float,
    e: float,
    p: float,
    r0: float,
    qv0: float,
    r1: float,
    qv1: float,
) -> Optional[float]:
    """Time along the flow from orbit point (r0, qv0) to (r1, qv1).

    Points are identified by radius and radial direction (qv = q.v = r*rdot),
    which pins them uniquely on the conic regardless of orientation. Returns
    a nonnegative time; for open orbits None means the target lies in the
    past. Elliptic results are reduced modulo the period, so a same-point
    target returns 0.
    """
    e_scale = max(abs(E), abs(m) / max(r0, 1e-300))
    if m > 0.0:
        if abs(E) <= _PARABOLIC_REL * e_scale:
            sqm = math.sqrt(m)
            d0 = qv0 / sqm
            d1 = qv1 / sqm
            dt = (p * (d1 - d0) + (d1**3 - d0**3) / 3.0) / (2.0 * sqm)
            return dt if dt >= 0.0 else None
        if E < 0.0:
            a = -m / (2.0 * E)
            n = math.sqrt(m / a**3)
            if e < 1e-12:
                return None  # circular orbits carry no radial information
            sqma = math.sqrt(m * a)

            def mean(r, qv):
                ce = (1.0 - r / a) / e
                se = qv / (e * sqma)
                ea = math.atan2(se, max(min(ce, 1.0), -1.0))
                return ea - e * math.sin(ea)

            dM = (mean(r1, qv1) - mean(r0, qv0)) % (2.0 * math.pi)
            return dM / n
        aabs = m / (2.0 * E)
        n = math.sqrt(m / aabs**3)
        sqma = math.sqrt(m * aabs)

        def mean_h(qv):
            H = math.asinh(qv / (e * sqma))
            return e * math.sinh(H) - H

        dt = (mean_h(qv1) - mean_h(qv0)) / n
        return dt if dt >= -1e-15 else None
    # repulsive branch
    mu = -m
    abar = mu / (2.0 * E)
    n = math.sqrt(mu / abar**3)
    sqma = math.sqrt(mu * abar)

    def mean_r(qv):
        H = math.asinh(qv / (e * sqma))
        return e * math.sinh(H) + H

    dt = (mean_r(qv1) - mean_r(qv0)) / n
    return dt if dt >= -1e-15 else None
