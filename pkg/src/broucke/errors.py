"""Exception types shared across the package."""


class BrouckeError(Exception):
    """Base class for all package-specific errors."""


class SingularConfigurationError(BrouckeError):
    """A square-root argument of the potential is non-positive.

    Raised when a trajectory reaches (or a caller supplies) a configuration
    at, or numerically indistinguishable from, a collision between one of
    the equal-mass bodies and the third body, or the triple collision.
    Only the binary collision of the two equal masses is regularized.
    """


class NoCrossingError(BrouckeError):
    """A requested section crossing does not occur on the trajectory."""


class StepFailureError(BrouckeError):
    """The adaptive integrator's step size collapsed."""


class IntegrationBudgetError(BrouckeError):
    """An integration exceeded its right-hand-side evaluation budget."""


class OrbitError(BrouckeError):
    """The periodic-orbit solver failed (no bracket or no convergence)."""
