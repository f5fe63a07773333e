"""Exception and warning types raised across the package."""


class ParameterError(ValueError):
    """A physical or numerical parameter violates its invariant."""


class PoleError(ZeroDivisionError):
    """A formula was evaluated at (or numerically on top of) a pole."""


class IntegrationError(RuntimeError):
    """Adaptive integration failed.

    Attributes
    ----------
    time : float
        Integration time at which the failure was detected.
    """

    def __init__(self, message, time):
        super().__init__(f"{message} (t = {time!r})")
        self.time = time


class InvariantViolation(IntegrationError):
    """A density-matrix invariant broke by more than 1e-6: integrator bug."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class ConvergenceError(RuntimeError):
    """An iterative solver ran out of iterations.

    Attributes
    ----------
    last : complex
        The last iterate.
    residual : float
        Residual of the last iterate.
    """

    def __init__(self, message, last, residual):
        super().__init__(f"{message}; last iterate {last!r}, residual {residual:.3e}")
        self.last = last
        self.residual = residual


class NoPhysicalModeError(ValueError):
    """No real group-velocity root lies strictly inside (0, c)."""


class InsufficientDataError(ValueError):
    """Too few samples to perform a fit."""


class ConfigError(ValueError):
    """Scenario configuration could not be parsed or validated."""


class RegimeWarning(UserWarning):
    """Inputs sit outside the regime an approximation was derived for."""


class BranchCutWarning(UserWarning):
    """A complex square root was evaluated close to its branch cut."""
