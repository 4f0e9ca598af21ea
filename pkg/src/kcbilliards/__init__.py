"""Kepler-Coulomb billiards in the plane and on the sphere.

Simulates billiards defined by a Kepler-Coulomb force with line or
centered-circle walls (and their spherical counterparts), implements the
central-projection correspondence between the planar and spherical
systems, and evaluates the full set of first integrals, including the
line-wall billiard invariant D = L^2 - 2 h A_eta.
"""

from .billiard import (
    BilliardRun,
    Collision,
    Escape,
    Hit,
    HitOutcome,
    Tangency,
    billiard_map,
    next_hit_analytic_line,
    next_hit_numeric,
    reflect,
    wall_signed_distance,
)
from .conformal import (
    HyperbolaWall,
    hooke_invariant,
    kepler_to_hooke_point,
    line_image_wall,
    transport_trajectory,
)
from .errors import (
    BilliardError,
    CollisionInsideInterval,
    ConfigError,
    InconsistentWall,
    NegativeRadius,
    NonConvergence,
    NotACollisionOrbit,
    NotInSouthHemisphere,
    NotOnWall,
    OriginSingularity,
    PerturbedModel,
    PoleSingularity,
    SingularPosition,
    StepFailure,
    Undetermined,
    WrongHalfPlane,
    ZeroMass,
)
from .integrals import (
    angular_momentum,
    gj_integral,
    integral_set,
    lrl_eta,
    lrl_xi,
    planar_energy,
    spherical_energy_chart,
)
from .model import (
    BounceRecord,
    ChartState,
    IntegralSet,
    IntegratorConfig,
    Model,
    PlanarState,
    RunConfig,
    SphericalState,
    SystemParams,
    Wall,
    load_config,
    parse_config,
    spherical_center,
    validate_config,
)
from .planar import (
    ConicElements,
    collision_bounce,
    kepler_accel,
    orbit_elements,
    propagate_analytic,
    solve_kepler_equation,
)
from .projective import (
    AffinePlane,
    Metric2,
    denormalize_chart,
    metric2_norm,
    normalize_chart,
    plane_plane_project,
    planar_energy_prenorm,
)
from .spherical import (
    SphericalCenter,
    chart_to_sphere,
    integrate_spherical,
    sphere_to_chart,
    spherical_accel,
    spherical_energy_embedded,
)

__version__ = "0.1.0"
