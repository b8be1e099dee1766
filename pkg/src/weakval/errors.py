"""Exception types raised by weakval."""


class WeakValueError(ValueError):
    """Base class for every configuration or domain error in the package."""


class DomainError(WeakValueError):
    """A parameter lies outside the open interval its model requires."""


class NotHermitian(WeakValueError):
    pass


class NotNormalized(WeakValueError):
    pass


class OrthogonalSelection(WeakValueError):
    """Pre- and post-selected states are orthogonal; the weak value is undefined."""


class InadmissibleStrength(WeakValueError):
    """First-order outcome probabilities would go negative.

    ``max_lambda`` carries the largest strength for which the setup stays
    admissible, i.e. ``1 / max |Re a_w|`` over the measured basis.
    """

    def __init__(self, message, max_lambda=None):
        super().__init__(message)
        self.max_lambda = max_lambda


class UnsupportedObservable(WeakValueError):
    pass


class VanishingPostselection(WeakValueError):
    pass


class QuadratureError(RuntimeError):
    def __init__(self, message, error_estimate):
        super().__init__(message)
        self.error_estimate = error_estimate


class InsufficientPostselection(RuntimeError):
    """Too few trials survived post-selection to form an estimate."""

    def __init__(self, message, n_postselected, rate):
        super().__init__(message)
        self.n_postselected = n_postselected
        self.rate = rate


class ConfigMismatch(ValueError):
    pass
