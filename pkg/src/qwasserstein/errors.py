"""Exception and warning types raised across the package."""


class QWassersteinError(Exception):
    """Base class for all errors raised by this package."""


class NonPositiveDefinite(QWassersteinError, ValueError):
    pass


class NotHermitian(QWassersteinError, ValueError):
    pass


class SingularInput(QWassersteinError, ValueError):
    pass


class UnphysicalState(QWassersteinError, ValueError):
    """Covariance matrix violates the uncertainty principle."""


class NotSymplectic(QWassersteinError, ValueError):
    pass


class DisplacedStateUnsupported(QWassersteinError, ValueError):
    """Closed-form comparison distances only cover centered states."""


class DivergentEntropy(QWassersteinError, ValueError):
    """Relative entropy against a pure, different state is infinite."""


class OutOfRange(QWassersteinError, ValueError):
    pass


class InfeasibleInput(QWassersteinError, ValueError):
    """The supplied off-diagonal block does not give a physical coupling."""


class NoFeasiblePoint(QWassersteinError, RuntimeError):
    pass


class DegenerateChannel(UserWarning):
    """Optimal channel is not unique because the target state is pure.

    Emitted as a warning: a valid (replacement) channel is still returned.
    """
