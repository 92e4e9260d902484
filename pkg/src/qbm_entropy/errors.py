"""Exception hierarchy shared by all modules."""


class QBMError(Exception):
    """Base class for every error raised by this package."""


class EvaluationError(QBMError, ValueError):
    """A user-supplied callable produced a non-finite value."""


class SingularityError(QBMError, ArithmeticError):
    """Integration could not proceed past a singular point.

    ``last_time`` holds the last time the solver reached.
    """

    def __init__(self, message, last_time=None):
        super().__init__(message)
        self.last_time = last_time


class ResonanceError(QBMError, ArithmeticError):
    """Im X vanishes at the requested time, so the propagator diverges there."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class DegeneracyError(QBMError, ArithmeticError):
    """The propagator coefficients give a non-normalizable state."""


class PurityError(QBMError, ValueError):
    """A Gaussian state with A < C (purity above one) was supplied."""


class AxisDegenerateError(QBMError, ValueError):
    """The superfluctuant transform is singular for angles on the q/p axes."""


class ValidityError(QBMError, ValueError):
    """Parameters fall outside the regime where a formula holds."""


class FitError(QBMError, ValueError):
    """Not enough data to fit an asymptote."""


class ConfigError(QBMError, ValueError):
    """Invalid run configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
