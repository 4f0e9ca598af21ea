"""Wall geometry, reflection operators, hit detection and the billiard map.

Hits are located either numerically (event-detecting adaptive integration
with dense output and bracketed root refinement, any wall and any beta)
or analytically for the planar line wall (conic-line intersection in
closed form, beta = 0). Radial orbits aimed at an attractive center are
continued through the collision by the analytic elastic bounce; the
production map never integrates a regularized field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import (
    NotOnWall,
    PerturbedModel,
    PoleSingularity,
    StepFailure,
    Undetermined,
)
from .integrals import angular_momentum, integral_set, planar_energy
from .model import (
    PLANAR_CENTERED_CIRCLE,
    PLANAR_LINE,
    SPHERICAL_CENTERED_CIRCLE,
    SPHERICAL_GREAT_CIRCLE,
    BounceRecord,
    IntegralSet,
    IntegratorConfig,
    Model,
    PlanarState,
    SphericalState,
    SystemParams,
    Wall,
    spherical_center,
)
from .planar import (
    collision_tolerance,
    flow_rhs,
    kepler_period,
    orbit_elements,
    radial_collision_time,
    time_of_flight,
)
from .spherical import (
    flow_rhs as spherical_flow_rhs,
    project_constraints,
    sphere_to_planar,
    spherical_energy_embedded,
)

TANGENCY_REL = 1e-8
ON_WALL_TOL = 1e-10
_T_EPS_REL = 1e-9
_CIRCULAR_E_TOL = 1e-12


# ---------------------------------------------------------------------------
# Outcomes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Hit:
    record: BounceRecord


@dataclass(frozen=True)
class Escape:
    reason: str


@dataclass(frozen=True)
class Collision:
    """Center passage before any wall crossing; retry from state_out.

    state_out is the elastic continuation (same position, reversed
    velocity); t_through is the flight time down to the center and back.
    """

    state_out: PlanarState
    t_through: float


@dataclass(frozen=True)
class Tangency:
    """Grazing hit; the map acts as the identity there."""

    record: BounceRecord


HitOutcome = Union[Hit, Escape, Collision, Tangency]


# ---------------------------------------------------------------------------
# Wall geometry
# ---------------------------------------------------------------------------

def wall_signed_distance(point, wall: Wall) -> float:
    """Signed distance-like wall function, positive on the dynamics side."""
    if wall.kind == PLANAR_LINE:
        return (float(point[1]) - wall.h) * wall.side
    if wall.kind == PLANAR_CENTERED_CIRCLE:
        return (math.hypot(float(point[0]), float(point[1])) - wall.radius) * wall.side
    q = np.asarray(point, dtype=float)
    if wall.kind == SPHERICAL_GREAT_CIRCLE:
        return float(np.dot(q, wall.normal)) * wall.side
    if wall.kind == SPHERICAL_CENTERED_CIRCLE:
        return (float(np.dot(q, wall.center)) - math.cos(wall.colatitude)) * wall.side
    raise ValueError(f"unknown wall kind {wall.kind!r}")


def _wall_scale(wall: Wall) -> float:
    if wall.kind == PLANAR_LINE:
        return max(1.0, abs(wall.h))
    if wall.kind == PLANAR_CENTERED_CIRCLE:
        return max(1.0, wall.radius)
    return 1.0


def reflect(state, wall: Wall):
    """Specular reflection at the wall: v <- v - 2 (v.n) n.

    The position is unchanged and kinetic energy is preserved to rounding.
    For the planar line the normal component is simply negated, which
    makes the involution bit-exact.

    Raises:
        NotOnWall: if the state is farther than 1e-10 (scaled) from the wall.
    """
    if isinstance(state, PlanarState):
        g = wall_signed_distance((state.xi, state.eta), wall)
        if abs(g) > ON_WALL_TOL * _wall_scale(wall):
            raise NotOnWall(f"signed distance {g} exceeds the on-wall tolerance")
        if wall.kind == PLANAR_LINE:
            return PlanarState(state.xi, state.eta, state.xi_dot, -state.eta_dot)
        n = state.position / state.r
        v = state.velocity
        v = v - 2.0 * float(np.dot(v, n)) * n
        return PlanarState(state.xi, state.eta, v[0], v[1])
    g = wall_signed_distance(state.q, wall)
    if abs(g) > ON_WALL_TOL:
        raise NotOnWall(f"signed distance {g} exceeds the on-wall tolerance")
    if wall.kind == SPHERICAL_GREAT_CIRCLE:
        axis = np.asarray(wall.normal, dtype=float)
    else:
        axis = np.asarray(wall.center, dtype=float)
    n = axis - float(np.dot(state.q, axis)) * state.q
    n = n / np.linalg.norm(n)
    v = state.v - 2.0 * float(np.dot(state.v, n)) * n
    return SphericalState(state.q, v)


# ---------------------------------------------------------------------------
# Record assembly
# ---------------------------------------------------------------------------

def _planar_record(
    t_hit: float, state_in: PlanarState, params: SystemParams, wall: Wall,
    tangent: bool = False,
) -> BounceRecord:
    state_out = state_in if tangent else reflect(state_in, wall)
    return BounceRecord(
        t_hit=t_hit,
        state_in=state_in,
        state_out=state_out,
        integrals_in=integral_set(state_in, params),
        integrals_out=integral_set(state_out, params),
        tangent=tangent,
    )


def _spherical_integrals(s: SphericalState, params: SystemParams) -> IntegralSet:
    """Embedded spherical energy plus, when projectable, the planar set."""
    e_sph = spherical_energy_embedded(s, params)
    if s.q[2] < 0.0:
        st = sphere_to_planar(s, params)
        base = integral_set(st, params)
        return IntegralSet(
            E_pl=base.E_pl, L=base.L, A_xi=base.A_xi, A_eta=base.A_eta,
            D=base.D, E_sph=e_sph,
        )
    return IntegralSet(
        E_pl=math.nan, L=math.nan, A_xi=math.nan, A_eta=math.nan,
        D=math.nan, E_sph=e_sph,
    )


def _spherical_record(
    t_hit: float, state_in: SphericalState, params: SystemParams, wall: Wall,
    tangent: bool = False,
) -> BounceRecord:
    state_out = state_in if tangent else reflect(state_in, wall)
    return BounceRecord(
        t_hit=t_hit,
        state_in=state_in,
        state_out=state_out,
        integrals_in=_spherical_integrals(state_in, params),
        integrals_out=_spherical_integrals(state_out, params),
        tangent=tangent,
    )


# ---------------------------------------------------------------------------
# Analytic line-wall hit
# ---------------------------------------------------------------------------

def _conic_line_candidates(el, m: float, h: float) -> List[float]:
    """xi-coordinates where the conic m*r = L^2 - A.q meets eta = h."""
    c = el.L * el.L - el.A_eta * h
    qa = m * m - el.A_xi * el.A_xi
    qb = 2.0 * c * el.A_xi
    qc = m * m * h * h - c * c
    scale = m * m + el.A_xi * el.A_xi
    roots: List[float] = []
    if abs(qa) <= 1e-14 * scale:
        if abs(qb) > 1e-300:
            roots = [-qc / qb]
    else:
        disc = qb * qb - 4.0 * qa * qc
        if disc < 0.0:
            return []
        sq = math.sqrt(disc)
        if qb >= 0.0:
            qq = -(qb + sq) / 2.0
        else:
            qq = -(qb - sq) / 2.0
        if qq != 0.0:
            roots = [qq / qa, qc / qq]
        else:
            roots = [0.0]
    # keep only sign-consistent intersections (r > 0 on the right branch)
    out = []
    for xi in roots:
        if (c - el.A_xi * xi) / m > 0.0:
            out.append(xi)
    return out


def _hit_velocity(el, m: float, xi: float, h: float):
    r = math.hypot(xi, h)
    xd = -(el.A_eta + m * h / r) / el.L
    ed = (el.A_xi + m * xi / r) / el.L
    return xd, ed, r


def next_hit_analytic_line(
    state: PlanarState,
    params: SystemParams,
    wall: Wall,
    l_tol: float = 1e-10,
    resolve_collisions: bool = True,
) -> HitOutcome:
    """First forward intersection of the orbit conic with the line wall.

    Closed form: the conic meets {eta = h} where a quadratic in xi
    vanishes; the velocity there is rebuilt from (E, L, A) and the first
    intersection is selected by time of flight along the motion. Agrees
    with the numerical hit search to 1e-8.

    Raises:
        PerturbedModel: if params.beta != 0.
    """
    if params.beta != 0.0:
        raise PerturbedModel("the analytic billiard map requires beta = 0")
    if wall.kind != PLANAR_LINE:
        raise ValueError("analytic hit search supports only the planar line wall")
    m = params.m
    h = wall.h
    L = angular_momentum(state)
    if L == 0.0:
        return _radial_hit(state, params, wall, resolve_collisions)
    el = orbit_elements(state, params)

    if el.e < _CIRCULAR_E_TOL:
        return _circular_line_hit(state, el, params, wall)

    r0 = state.r
    qv0 = state.xi * state.xi_dot + state.eta * state.eta_dot
    period = kepler_period(state, m)
    t_eps = _T_EPS_REL * (period if period is not None else max(r0 / max(state.speed, 1e-12), 1.0))

    best = None
    for xi in _conic_line_candidates(el, m, h):
        xd, ed, r1 = _hit_velocity(el, m, xi, h)
        qv1 = xi * xd + h * ed
        dt = time_of_flight(m, el.E_pl, el.e, el.p, r0, qv0, r1, qv1)
        if dt is None:
            continue
        if dt <= t_eps:
            if period is None:
                continue
            dt += period
        if best is None or dt < best[0]:
            best = (dt, xi, xd, ed)
    if best is None:
        return Escape("conic has no forward intersection with the wall line")
    dt, xi, xd, ed = best

    if params.m > 0.0 and abs(L) <= collision_tolerance(state, l_tol):
        t_c = radial_collision_time(state, m)
        if not resolve_collisions and t_c is not None and t_c < dt:
            from .planar import collision_bounce, time_through_center

            return Collision(
                state_out=collision_bounce(state, params, l_tol),
                t_through=time_through_center(state, params),
            )

    state_in = PlanarState(xi, h, xd, ed)
    if abs(ed) <= TANGENCY_REL * state_in.speed:
        return Tangency(_planar_record(dt, state_in, params, wall, tangent=True))
    return Hit(_planar_record(dt, state_in, params, wall))


def _circular_line_hit(state, el, params, wall) -> HitOutcome:
    """Hit search for an (numerically) circular orbit, ordered by angle."""
    m = params.m
    h = wall.h
    r = state.r
    if abs(h) > r:
        return Escape("circular orbit does not reach the wall line")
    L = el.L
    s_l = 1.0 if L >= 0.0 else -1.0
    th0 = math.atan2(state.eta, state.xi)
    best = None
    xi_abs = math.sqrt(max(r * r - h * h, 0.0))
    omega = abs(L) / (r * r)
    for xi in (xi_abs, -xi_abs):
        th = math.atan2(h, xi)
        dth = (s_l * (th - th0)) % (2.0 * math.pi)
        if dth < 1e-9:
            dth += 2.0 * math.pi
        dt = dth / omega
        if best is None or dt < best[0]:
            best = (dt, xi, th)
    dt, xi, th = best
    speed = abs(L) / r
    xd = -math.sin(th) * s_l * speed
    ed = math.cos(th) * s_l * speed
    state_in = PlanarState(xi, h, xd, ed)
    if abs(ed) <= TANGENCY_REL * speed:
        return Tangency(_planar_record(dt, state_in, params, wall, tangent=True))
    return Hit(_planar_record(dt, state_in, params, wall))


def _radial_hit(
    state: PlanarState,
    params: SystemParams,
    wall: Wall,
    resolve_collisions: bool = True,
) -> HitOutcome:
    """Hit search for an exactly radial (L = 0) orbit, any planar wall.

    Radial motion lives on the ray s*q_hat, s > 0; collisions with an
    attractive center are continued by the elastic bounce, which in the
    anomaly picture is the smooth passage of the radial anomaly through
    zero. The wall crossing radius is |h/q_hat_eta| for the line and R
    for the centered circle.
    """
    m = params.m
    r0 = state.r
    qhat = state.position / r0
    E = planar_energy(state, m)
    qv0 = state.xi * state.xi_dot + state.eta * state.eta_dot

    if wall.kind == PLANAR_LINE:
        h = wall.h
        if qhat[1] == 0.0:
            return Escape("radial orbit is parallel to the wall line")
        s_hit = h / qhat[1]
        if s_hit < 0.0:
            return Escape("radial ray does not meet the wall line")
        if s_hit == 0.0:
            return Escape(
                "radial crossing coincides with the center, which is removed "
                "from a wall line through it"
            )
    elif wall.kind == PLANAR_CENTERED_CIRCLE:
        s_hit = wall.radius
    else:
        raise ValueError("radial hit search supports planar walls only")

    two_e = 2.0 * (E + m / s_hit)
    if two_e < 0.0:
        return Escape("radial orbit never reaches the wall radius")
    rdot_mag = math.sqrt(two_e)

    t_eps = _T_EPS_REL * max(r0 / max(state.speed, 1e-12), 1.0)
    best = None
    for sgn in (-1.0, 1.0):
        qv1 = sgn * s_hit * rdot_mag
        dt = time_of_flight(m, E, 1.0, 0.0, r0, qv0, s_hit, qv1)
        if dt is None or dt <= t_eps:
            continue
        if best is None or dt < best[0]:
            best = (dt, qv1)
    if best is None:
        return Escape("radial orbit has no forward wall crossing")
    dt, qv1 = best

    t_c = radial_collision_time(state, m)
    if t_c is not None and t_c < dt:
        if not resolve_collisions:
            from .planar import collision_bounce, time_through_center

            return Collision(
                state_out=collision_bounce(state, params),
                t_through=time_through_center(state, params),
            )
        # the anomaly time of flight already runs through the elastic bounce

    rdot = qv1 / s_hit
    v = rdot * qhat
    state_in = PlanarState(s_hit * qhat[0], s_hit * qhat[1], v[0], v[1])
    n_dot = (
        abs(v[1]) if wall.kind == PLANAR_LINE else abs(rdot)
    )
    if n_dot <= TANGENCY_REL * state_in.speed:
        return Tangency(_planar_record(dt, state_in, params, wall, tangent=True))
    return Hit(_planar_record(dt, state_in, params, wall))


# ---------------------------------------------------------------------------
# Numerical hit search
# ---------------------------------------------------------------------------

def default_escape_radius(wall: Wall) -> float:
    return 1e3 * _wall_scale(wall)


def _planar_conic_escape_certified(state, params, wall) -> bool:
    """For the line wall with beta = 0: no forward conic intersection."""
    if wall.kind != PLANAR_LINE or params.beta != 0.0:
        return True
    outcome = next_hit_analytic_line(state, params, wall)
    return isinstance(outcome, Escape)


def next_hit_numeric(
    state,
    model: Model,
    integ: IntegratorConfig = IntegratorConfig(),
    t_max: float = 1000.0,
    escape_radius: Optional[float] = None,
    l_tol: float = 1e-10,
) -> HitOutcome:
    """Integrate the flow to the first wall crossing and refine the hit.

    The integrator advances in chunks whose internal step is capped at a
    quarter of the current distance-to-wall over the current speed (with
    a smooth floor), so thin crossings near conic pericenters cannot be
    stepped over; the crossing itself is located on the dense output by
    bracketed root-finding. Escape is returned only with a certificate
    (unbound, receding, beyond the escape radius, and for the line wall
    no forward conic intersection); otherwise exhausting t_max raises
    Undetermined.
    """
    if isinstance(state, SphericalState):
        return _next_hit_numeric_spherical(state, model, integ, t_max)
    params = model.params
    wall = model.wall
    if escape_radius is None:
        escape_radius = default_escape_radius(wall)

    # radial orbits aimed at an attractive center: analytic elastic bounce,
    # never regularized integration
    if params.beta == 0.0 and abs(angular_momentum(state)) <= collision_tolerance(
        state, l_tol
    ):
        if params.m > 0.0 and radial_collision_time(
            _radialized(state), params.m
        ) is not None:
            return _radial_hit(_radialized(state), params, wall)

    scale = _wall_scale(wall)
    rhs = lambda t, y: flow_rhs(t, y, params)  # noqa: E731

    def g_event(t, y):
        return wall_signed_distance((y[0], y[1]), wall)

    g_event.terminal = True
    g_event.direction = -1.0

    t = 0.0
    y = state.as_array()
    while t < t_max:
        speed = math.hypot(y[2], y[3])
        g = wall_signed_distance((y[0], y[1]), wall)
        cap = (abs(g) + 0.05 * scale) / (4.0 * max(speed, 1e-9))
        cap = min(cap, integ.max_step)
        chunk = min(t_max - t, max(64.0 * cap, 0.5))
        sol = solve_ivp(
            rhs,
            (t, t + chunk),
            y,
            method="DOP853",
            rtol=integ.rtol,
            atol=integ.atol,
            max_step=cap,
            events=g_event,
            dense_output=True,
        )
        if not sol.success and sol.status != 1:
            raise StepFailure(f"integration failed: {sol.message}")
        if sol.status == 1 and sol.t_events[0].size:
            t_hit = float(sol.t_events[0][0])
            y_hit = sol.y_events[0][0]
            state_in = PlanarState.from_array(y_hit)
            n_dot = _normal_speed(state_in, wall)
            if n_dot <= TANGENCY_REL * state_in.speed:
                return Tangency(
                    _planar_record(t_hit, state_in, params, wall, tangent=True)
                )
            return Hit(_planar_record(t_hit, state_in, params, wall))
        y = sol.y[:, -1]
        t = float(sol.t[-1])
        r = math.hypot(y[0], y[1])
        e_flow = planar_energy(PlanarState.from_array(y), params.m, params.beta)
        receding = (y[0] * y[2] + y[1] * y[3]) > 0.0
        if e_flow >= 0.0 and r > escape_radius and receding:
            if _planar_conic_escape_certified(
                PlanarState.from_array(y), params, wall
            ):
                return Escape("unbound, receding beyond the escape radius")
    raise Undetermined(f"no hit or escape certificate within t_max = {t_max}")


def _radialized(state: PlanarState) -> PlanarState:
    """Project the velocity onto the radial direction (|L| below tolerance)."""
    qhat = state.position / state.r
    rdot = float(np.dot(state.velocity, qhat))
    return PlanarState(state.xi, state.eta, rdot * qhat[0], rdot * qhat[1])


def _normal_speed(state: PlanarState, wall: Wall) -> float:
    if wall.kind == PLANAR_LINE:
        return abs(state.eta_dot)
    return abs(float(np.dot(state.velocity, state.position / state.r)))


_POLE_EVENT_MARGIN = 1e-6


def _next_hit_numeric_spherical(
    state: SphericalState,
    model: Model,
    integ: IntegratorConfig,
    t_max: float,
) -> HitOutcome:
    params = model.params
    wall = model.wall
    z1 = spherical_center(params)
    att = z1 if params.m_prime > 0.0 else -z1
    rhs = spherical_flow_rhs(params)

    def g_event(t, y):
        return wall_signed_distance(y[:3], wall)

    g_event.terminal = True
    g_event.direction = -1.0

    def pole_event(t, y):
        return (y[0] * att[0] + y[1] * att[1] + y[2] * att[2]) - (
            1.0 - _POLE_EVENT_MARGIN
        )

    pole_event.terminal = True
    pole_event.direction = 1.0

    t = 0.0
    y = state.as_array()
    while t < t_max:
        speed = float(np.linalg.norm(y[3:]))
        g = wall_signed_distance(y[:3], wall)
        cap = (abs(g) + 0.05) / (4.0 * max(speed, 1e-9))
        cap = min(cap, integ.max_step)
        chunk = min(t_max - t, max(64.0 * cap, 0.25))
        sol = solve_ivp(
            rhs,
            (t, t + chunk),
            y,
            method="DOP853",
            rtol=integ.rtol,
            atol=integ.atol,
            max_step=cap,
            events=(g_event, pole_event),
            dense_output=True,
        )
        if not sol.success and sol.status != 1:
            raise StepFailure(f"integration failed: {sol.message}")
        if sol.status == 1 and sol.t_events[0].size:
            t_hit = float(sol.t_events[0][0])
            s_in = SphericalState.project(sol.y_events[0][0][:3], sol.y_events[0][0][3:])
            n_dot = _spherical_normal_speed(s_in, wall)
            if n_dot <= TANGENCY_REL * s_in.speed:
                return Tangency(
                    _spherical_record(t_hit, s_in, params, wall, tangent=True)
                )
            return Hit(_spherical_record(t_hit, s_in, params, wall))
        if sol.status == 1 and sol.t_events[1].size:
            t_pole = float(sol.t_events[1][0])
            y_pole = sol.y_events[1][0]
            t = t_pole + _pole_mirror_time(y_pole, params, att)
            y = _pole_mirror(y_pole, att)
            continue
        y = project_constraints(sol.y[:, -1])
        t = float(sol.t[-1])
    raise Undetermined(f"no spherical hit within t_max = {t_max}")


def _pole_mirror(y: np.ndarray, att: np.ndarray) -> np.ndarray:
    """Elastic continuation of a radial spherical orbit through the center."""
    q = y[:3]
    v = y[3:]
    ell = float(np.dot(np.cross(q, v), att))
    if abs(ell) > 1e-8 * max(1.0, float(np.linalg.norm(v))):
        raise PoleSingularity(
            "non-radial trajectory entered the pole guard; no continuation"
        )
    return np.concatenate([q, -v])


def _pole_mirror_time(y: np.ndarray, params: SystemParams, att: np.ndarray) -> float:
    """Flight time down to the pole and back from the guard radius."""
    q = y[:3]
    v = y[3:]
    c = float(np.dot(q, att))
    theta0 = math.acos(max(min(c, 1.0), -1.0))
    m_abs = abs(params.m_prime)
    e_loc = 0.5 * float(np.dot(v, v)) - m_abs / math.tan(theta0)

    def integrand(th):
        val = 2.0 * (e_loc + m_abs / math.tan(th))
        return 1.0 / math.sqrt(max(val, 1e-300))

    t_fall, _ = quad(integrand, 0.0, theta0, limit=100)
    return 2.0 * t_fall


def _spherical_normal_speed(s: SphericalState, wall: Wall) -> float:
    axis = np.asarray(
        wall.normal if wall.kind == SPHERICAL_GREAT_CIRCLE else wall.center,
        dtype=float,
    )
    n = axis - float(np.dot(s.q, axis)) * s.q
    nn = np.linalg.norm(n)
    if nn == 0.0:
        return 0.0
    return abs(float(np.dot(s.v, n / nn)))


# ---------------------------------------------------------------------------
# Billiard map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BilliardRun:
    """Result of iterating the billiard map."""

    records: List[BounceRecord]
    outcome: str
    final_state: object

    @property
    def n_bounces(self) -> int:
        return len(self.records)


def billiard_map(
    state,
    n: int,
    model: Model,
    mode: str = "numeric",
    integ: IntegratorConfig = IntegratorConfig(),
    t_max_per_leg: float = 1000.0,
) -> BilliardRun:
    """Iterate hit-and-reflect up to n times or until a non-hit outcome.

    Every bounce record carries the full integral set on both sides and
    an absolute hit time. ``mode="analytic"`` requires the planar line
    wall and beta = 0.
    """
    if mode not in ("numeric", "analytic"):
        raise ValueError("mode must be 'numeric' or 'analytic'")
    if mode == "analytic" and model.wall.kind != PLANAR_LINE:
        raise ValueError("analytic mode supports only the planar line wall")
    records: List[BounceRecord] = []
    clock = 0.0
    outcome = "completed"
    current = state
    for _ in range(n):
        if mode == "analytic":
            out = next_hit_analytic_line(current, model.params, model.wall)
        else:
            out = next_hit_numeric(current, model, integ, t_max=t_max_per_leg)
        if isinstance(out, Hit):
            rec = out.record
            clock += rec.t_hit
            records.append(
                BounceRecord(
                    t_hit=clock,
                    state_in=rec.state_in,
                    state_out=rec.state_out,
                    integrals_in=rec.integrals_in,
                    integrals_out=rec.integrals_out,
                    tangent=rec.tangent,
                )
            )
            current = rec.state_out
        elif isinstance(out, Tangency):
            rec = out.record
            clock += rec.t_hit
            records.append(
                BounceRecord(
                    t_hit=clock,
                    state_in=rec.state_in,
                    state_out=rec.state_out,
                    integrals_in=rec.integrals_in,
                    integrals_out=rec.integrals_out,
                    tangent=True,
                )
            )
            outcome = "tangency"
            current = rec.state_out
            break
        elif isinstance(out, Collision):
            clock += out.t_through
            current = out.state_out
            continue
        else:
            outcome = "escape"
            break
    return BilliardRun(records=records, outcome=outcome, final_state=current)
