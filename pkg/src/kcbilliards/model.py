"""Core domain types: system parameters, states, walls, bounce records.

All types are immutable values and safe to share between threads. The
planar system always lives in the normalized (xi, eta) chart: the force
center sits at the origin, kinetic energy is Euclidean, and the line
wall is eta = h with h = -a/sqrt(1+a^2). The pre-normalization (x, y)
chart exists only inside :mod:`kcbilliards.projective`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    ConfigError,
    InconsistentWall,
    NegativeRadius,
    SingularPosition,
    ZeroMass,
)

PLANAR_LINE = "planar-line"
PLANAR_CENTERED_CIRCLE = "planar-centered-circle"
SPHERICAL_GREAT_CIRCLE = "spherical-great-circle"
SPHERICAL_CENTERED_CIRCLE = "spherical-centered-circle"

WALL_KINDS = (
    PLANAR_LINE,
    PLANAR_CENTERED_CIRCLE,
    SPHERICAL_GREAT_CIRCLE,
    SPHERICAL_CENTERED_CIRCLE,
)


@dataclass(frozen=True)
class SystemParams:
    """Parameters of the central force system.

    Attributes:
        m: mass factor of the center; m > 0 attracts, m < 0 repels.
        a: offset of the center along the eta-axis of the wall chart,
           a >= 0 by convention.
        beta: strength of the additional centrifugal force beta/r^3
           (potential term beta/(2 r^2)); beta = 0 is the pure
           Kepler-Coulomb case.
    """

    m: float
    a: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.m == 0.0:
            raise ZeroMass("mass factor m must be nonzero")
        if self.a < 0.0:
            raise ConfigError("offset a must be >= 0 by convention")

    @property
    def m_prime(self) -> float:
        """Mass factor of the corresponding spherical system, m*sqrt(1+a^2)."""
        return self.m * math.sqrt(1.0 + self.a * self.a)

    @property
    def h(self) -> float:
        """Signed level of the wall line in the normalized chart, -a/sqrt(1+a^2)."""
        return -self.a / math.sqrt(1.0 + self.a * self.a)


@dataclass(frozen=True)
class PlanarState:
    """Position and velocity in the normalized (xi, eta) chart."""

    xi: float
    eta: float
    xi_dot: float
    eta_dot: float

    def __post_init__(self):
        for name in ("xi", "eta", "xi_dot", "eta_dot"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.xi == 0.0 and self.eta == 0.0:
            raise SingularPosition("(xi, eta) = (0, 0) is the singular center")

    @property
    def position(self) -> np.ndarray:
        return np.array([self.xi, self.eta])

    @property
    def velocity(self) -> np.ndarray:
        return np.array([self.xi_dot, self.eta_dot])

    @property
    def r(self) -> float:
        return math.hypot(self.xi, self.eta)

    @property
    def speed(self) -> float:
        return math.hypot(self.xi_dot, self.eta_dot)

    def as_array(self) -> np.ndarray:
        return np.array([self.xi, self.eta, self.xi_dot, self.eta_dot])

    @classmethod
    def from_array(cls, y: Sequence[float]) -> "PlanarState":
        return cls(float(y[0]), float(y[1]), float(y[2]), float(y[3]))

    def with_velocity(self, xi_dot: float, eta_dot: float) -> "PlanarState":
        return PlanarState(self.xi, self.eta, float(xi_dot), float(eta_dot))


@dataclass(frozen=True)
class ChartState:
    """Position and velocity in the pre-normalization (x, y) chart."""

    x: float
    y: float
    x_dot: float
    y_dot: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.x_dot, self.y_dot])


_UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SphericalState:
    """Point on the unit sphere with a tangent velocity, both in embedded 3-space.

    Invariants |q| = 1 and q.v = 0 are enforced to 1e-12 on construction;
    use :meth:`project` to build a state from slightly off-constraint data.
    Pole avoidance (q != +-Z1) is checked by the force evaluation, which
    knows the center.
    """

    q: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        v = np.asarray(self.v, dtype=float)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "v", v)
        if q.shape != (3,) or v.shape != (3,):
            raise ValueError("q and v must be 3-vectors")
        if abs(np.linalg.norm(q) - 1.0) > _UNIT_TOL:
            raise ValueError("|q| must equal 1 within 1e-12")
        if abs(float(np.dot(q, v))) > _UNIT_TOL * max(1.0, float(np.linalg.norm(v))):
            raise ValueError("v must be tangent to the sphere within 1e-12")

    @classmethod
    def project(cls, q: Sequence[float], v: Sequence[float]) -> "SphericalState":
        """Renormalize q and remove the normal velocity component, then construct."""
        q = np.asarray(q, dtype=float)
        v = np.asarray(v, dtype=float)
        q = q / np.linalg.norm(q)
        v = v - np.dot(q, v) * q
        return cls(q, v)

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.v))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.q, self.v])

    @classmethod
    def from_array(cls, y: Sequence[float]) -> "SphericalState":
        y = np.asarray(y, dtype=float)
        return cls(y[:3].copy(), y[3:6].copy())


State = Union[PlanarState, SphericalState]


@dataclass(frozen=True)
class Wall:
    """A reflection wall, one of four families.

    The ``side`` sign selects the half-space the dynamics occupies:
    the signed distance of :func:`kcbilliards.billiard.wall_signed_distance`
    is positive there.
    """

    kind: str
    side: int = 1
    h: Optional[float] = None
    radius: Optional[float] = None
    normal: Optional[tuple] = None
    colatitude: Optional[float] = None
    center: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in WALL_KINDS:
            raise ConfigError(f"unknown wall kind {self.kind!r}")
        if self.side not in (-1, 1):
            raise ConfigError("wall side must be +1 or -1")

    @classmethod
    def line(cls, h: float, side: int = 1) -> "Wall":
        """Planar line wall eta = h."""
        return cls(kind=PLANAR_LINE, side=side, h=float(h))

    @classmethod
    def centered_circle(cls, radius: float, side: int = 1) -> "Wall":
        """Planar circle of given radius centered at the force center."""
        if radius <= 0.0:
            raise NegativeRadius("circle wall radius must be positive")
        return cls(kind=PLANAR_CENTERED_CIRCLE, side=side, radius=float(radius))

    @classmethod
    def great_circle(cls, normal: Sequence[float], side: int = 1) -> "Wall":
        """Spherical great circle; ``normal`` is the unit normal of its plane."""
        n = np.asarray(normal, dtype=float)
        nn = np.linalg.norm(n)
        if nn == 0.0:
            raise ConfigError("great-circle normal must be nonzero")
        n = n / nn
        return cls(kind=SPHERICAL_GREAT_CIRCLE, side=side, normal=tuple(n))

    @classmethod
    def centered_small_circle(
        cls, colatitude: float, center: Sequence[float], side: int = 1
    ) -> "Wall":
        """Spherical circle of given colatitude about the center direction."""
        if not 0.0 < colatitude < math.pi:
            raise ConfigError("colatitude must lie in (0, pi)")
        c = np.asarray(center, dtype=float)
        c = c / np.linalg.norm(c)
        return cls(
            kind=SPHERICAL_CENTERED_CIRCLE,
            side=side,
            colatitude=float(colatitude),
            center=tuple(c),
        )

    @property
    def is_planar(self) -> bool:
        return self.kind in (PLANAR_LINE, PLANAR_CENTERED_CIRCLE)

    @property
    def is_spherical(self) -> bool:
        return not self.is_planar


@dataclass(frozen=True)
class IntegralSet:
    """Values of the six conserved quantities at one state.

    For beta = 0 these satisfy E_sph = (1+a^2)(E_pl + D/2); for
    beta != 0, E_pl is the flow energy including the centrifugal
    potential and D is generically not conserved.
    """

    E_pl: float
    L: float
    A_xi: float
    A_eta: float
    D: float
    E_sph: float

    def as_dict(self) -> dict:
        return {
            "E_pl": self.E_pl,
            "L": self.L,
            "A_xi": self.A_xi,
            "A_eta": self.A_eta,
            "D": self.D,
            "E_sph": self.E_sph,
        }


@dataclass(frozen=True)
class BounceRecord:
    """State and first integrals on both sides of one wall hit."""

    t_hit: float
    state_in: State
    state_out: State
    integrals_in: IntegralSet
    integrals_out: IntegralSet
    tangent: bool = False


def spherical_center(params: SystemParams) -> np.ndarray:
    """Unit-sphere position of the attractive (for m' > 0) center Z1."""
    s = math.sqrt(1.0 + params.a * params.a)
    return np.array([0.0, params.a / s, -1.0 / s])


@dataclass(frozen=True)
class Model:
    """A validated (params, wall) pair."""

    params: SystemParams
    wall: Wall

    @property
    def domain(self) -> str:
        return "planar" if self.wall.is_planar else "spherical"


_H_TOL = 1e-12


def validate_config(params: SystemParams, wall: Wall) -> Model:
    """Check wall/params consistency and return a model handle.

    Raises:
        InconsistentWall: line level differs from h(a), or the small-circle
            center differs from Z1(a).
        NegativeRadius: nonpositive circle radius.
        ZeroMass: raised earlier by SystemParams itself.
    """
    if wall.kind == PLANAR_LINE:
        if wall.h is None or abs(wall.h - params.h) > _H_TOL:
            raise InconsistentWall(
                f"line level {wall.h!r} does not equal h(a) = {params.h!r}"
            )
    elif wall.kind == PLANAR_CENTERED_CIRCLE:
        if wall.radius is None or wall.radius <= 0.0:
            raise NegativeRadius("circle wall radius must be positive")
    elif wall.kind == SPHERICAL_GREAT_CIRCLE:
        n = np.asarray(wall.normal, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > _UNIT_TOL:
            raise ConfigError("great-circle normal must be a unit vector")
    elif wall.kind == SPHERICAL_CENTERED_CIRCLE:
        z1 = spherical_center(params)
        if wall.center is None or np.linalg.norm(np.asarray(wall.center) - z1) > 1e-9:
            raise InconsistentWall("small-circle center must be Z1 of the params")
    return Model(params=params, wall=wall)


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances for event-detecting numerical integration."""

    rtol: float = 1e-10
    atol: float = 1e-10
    max_step: float = math.inf


@dataclass(frozen=True)
class RunSpec:
    n_bounces: int = 0
    t_max: float = 100.0


@dataclass(frozen=True)
class RunConfig:
    """Fully parsed simulation configuration."""

    model: Model
    model_name: str
    initial: State
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    run: RunSpec = field(default_factory=RunSpec)


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def parse_config(doc: dict) -> RunConfig:
    """Parse and validate the JSON configuration document.

    Schema::

        {"system": {"model": "kepler"|"boltzmann"|"spherical",
                    "m": num, "a": num, "beta": num},
         "wall": {"kind": str, "radius"?: num, "colatitude"?: num, "side": +-1},
         "initial": {"state": [4 or 6 numbers]},
         "integrator": {"rtol": num, "atol": num, "max_step": num},
         "run": {"n_bounces": int, "t_max": num}}
    """
    _require(isinstance(doc, dict), "config must be a JSON object")
    for key in ("system", "wall", "initial"):
        _require(key in doc, f"config is missing the {key!r} section")

    sys_sec = doc["system"]
    name = sys_sec.get("model", "kepler")
    _require(
        name in ("kepler", "boltzmann", "spherical"),
        "system.model must be 'kepler', 'boltzmann' or 'spherical'",
    )
    beta = float(sys_sec.get("beta", 0.0))
    if name == "kepler":
        _require(beta == 0.0, "kepler model requires beta = 0")
    params = SystemParams(
        m=float(sys_sec.get("m", 1.0)), a=float(sys_sec.get("a", 0.0)), beta=beta
    )

    wall_sec = doc["wall"]
    kind = wall_sec.get("kind")
    side = int(wall_sec.get("side", 1))
    if kind == PLANAR_LINE:
        wall = Wall.line(params.h, side=side)
    elif kind == PLANAR_CENTERED_CIRCLE:
        _require("radius" in wall_sec, "planar circle wall requires 'radius'")
        wall = Wall.centered_circle(float(wall_sec["radius"]), side=side)
    elif kind == SPHERICAL_GREAT_CIRCLE:
        # The canonical great circle corresponds to the planar line wall.
        wall = Wall.great_circle((0.0, 1.0, 0.0), side=side)
    elif kind == SPHERICAL_CENTERED_CIRCLE:
        _require("colatitude" in wall_sec, "centered circle wall requires 'colatitude'")
        wall = Wall.centered_small_circle(
            float(wall_sec["colatitude"]), spherical_center(params), side=side
        )
    else:
        raise ConfigError(f"unknown wall kind {kind!r}")

    if name == "spherical":
        _require(wall.is_spherical, "spherical model requires a spherical wall")
    else:
        _require(wall.is_planar, f"{name} model requires a planar wall")

    model = validate_config(params, wall)

    state_vec = doc["initial"].get("state")
    _require(
        isinstance(state_vec, (list, tuple)) and len(state_vec) in (4, 6),
        "initial.state must hold 4 (planar) or 6 (spherical) numbers",
    )
    if model.domain == "planar":
        _require(len(state_vec) == 4, "planar run requires a 4-number state")
        initial: State = PlanarState.from_array([float(x) for x in state_vec])
    else:
        _require(len(state_vec) == 6, "spherical run requires a 6-number state")
        try:
            initial = SphericalState.from_array([float(x) for x in state_vec])
        except ValueError as exc:
            raise ConfigError(f"invalid spherical state: {exc}") from exc

    integ_sec = doc.get("integrator", {})
    integ = IntegratorConfig(
        rtol=float(integ_sec.get("rtol", 1e-10)),
        atol=float(integ_sec.get("atol", 1e-10)),
        max_step=float(integ_sec.get("max_step", math.inf)),
    )

    run_sec = doc.get("run", {})
    run = RunSpec(
        n_bounces=int(run_sec.get("n_bounces", 0)),
        t_max=float(run_sec.get("t_max", 100.0)),
    )
    _require(run.n_bounces >= 0, "run.n_bounces must be >= 0")
    _require(run.t_max > 0, "run.t_max must be positive")

    return RunConfig(model=model, model_name=name, initial=initial, integrator=integ, run=run)


def load_config(path: str) -> RunConfig:
    """Read and parse a JSON configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(doc)
