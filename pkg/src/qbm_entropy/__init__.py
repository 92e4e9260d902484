"""Entropy, fluctuations and coherence of squeezed open quantum systems."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .errors import (AxisDegenerateError, ConfigError, DegeneracyError, EvaluationError,
                     FitError, PurityError, QBMError, ResonanceError, SingularityError,
                     ValidityError)
from .estimator import EntropyEvolution
from .kernels import BathSpec, Regime
from .models import fit_asymptote, make_desitter, make_inverted, make_static
from .propagator import PropagatorCoeffs
from .simulation import COLUMNS, RunRecord, simulate
from .squeeze import Constant, SystemLagrangian
from .state import EvolvedGaussian, InitialGaussian

__all__ = [
    "AxisDegenerateError", "BathSpec", "COLUMNS", "ConfigError", "Constant", "DegeneracyError",
    "EntropyEvolution", "EvaluationError", "EvolvedGaussian", "FitError", "InitialGaussian",
    "PropagatorCoeffs", "PurityError", "QBMError", "Regime", "ResonanceError", "RunRecord",
    "SingularityError", "SystemLagrangian", "ValidityError", "fit_asymptote", "make_desitter",
    "make_inverted", "make_static", "simulate",
]
