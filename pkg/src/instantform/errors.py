"""Exception types shared across the package.

Everything derives from InstantFormError so callers can catch the package's
failures with a single except clause.  Errors that carry diagnostic payloads
(last good state, residuals, search intervals) expose them as attributes.
"""


class InstantFormError(Exception):
    """Base class for all errors raised by this package."""


class NonTimelikeError(InstantFormError, ValueError):
    """A four-vector required to be timelike (usually future-pointing) is not."""


class DegenerateSurfaceError(InstantFormError, ValueError):
    """Tangent vectors of a 3-surface are (numerically) linearly dependent."""


class AdmissibilityError(InstantFormError, ValueError):
    """A foliation quantity was requested where the chart is inadmissible.

    Raised e.g. when the lapse is non-positive at the evaluation point, or
    when a chart Jacobian is singular, which signals the boundary of the
    region the embedding covers.
    """


class NoSolutionError(InstantFormError, RuntimeError):
    """Radar synchronization found no signal solution on the search domain.

    Attributes
    ----------
    interval : tuple
        The (s_min, s_max) parameter range that was searched.
    missing : str
        Which leg is absent: "emission", "absorption" or "both".
    """

    def __init__(self, message, interval=None, missing="both"):
        super().__init__(message)
        self.interval = interval
        self.missing = missing


class InversionError(InstantFormError, RuntimeError):
    """Chart inversion (event -> surface coordinates) failed to converge.

    Carries the last residual norm in the attribute ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularPotentialError(InstantFormError, ValueError):
    """Two interacting particles coincide, so the potential is undefined."""


class CollisionError(InstantFormError, RuntimeError):
    """Relative separation collapsed below threshold during evolution.

    The attribute ``last_state`` holds the last good (tau, rho, pi) sample.
    """

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class NonConvergenceError(InstantFormError, RuntimeError):
    """An iterative solver (implicit integrator substep, eigensolver) stalled."""


class ConfigError(InstantFormError, ValueError):
    """Run configuration is invalid.  ``problems`` lists every violation found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(self.problems))
