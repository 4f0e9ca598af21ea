"""Exception types shared across the package."""


class BilliardError(Exception):
    """Base class for all domain errors raised by this package."""


class ConfigError(BilliardError):
    """A configuration file or parameter set failed validation."""


class ZeroMass(ConfigError):
    """The mass factor of the center must be nonzero."""


class NegativeRadius(ConfigError):
    """A circular wall radius must be positive."""


class InconsistentWall(ConfigError):
    """Wall geometry does not match the system parameters (line level != h(a))."""


class SingularPosition(BilliardError):
    """Position too close to the force center for the field to be evaluated."""


class PerturbedModel(BilliardError):
    """Operation requires the unperturbed (beta = 0) Kepler-Coulomb field."""


class NonConvergence(BilliardError):
    """An iterative solver exhausted its iteration cap."""


class CollisionInsideInterval(BilliardError):
    """Analytic propagation interval contains a collision with the center."""


class NotACollisionOrbit(BilliardError):
    """Collision continuation requested for a state with |L| above tolerance."""


class PoleSingularity(BilliardError):
    """Spherical state too close to a force pole."""


class NotInSouthHemisphere(BilliardError):
    """Central projection to the chart plane requires q_z < 0."""


class WrongHalfPlane(BilliardError):
    """Plane-plane projection requested outside the admissible half-plane."""


class NotOnWall(BilliardError):
    """Reflection requested for a state not on the wall."""


class Undetermined(BilliardError):
    """Hit search exhausted t_max without a hit or an escape certificate."""


class StepFailure(BilliardError):
    """The ODE integrator failed to meet its tolerance."""


class OriginSingularity(BilliardError):
    """Conformal map undefined at the origin."""
