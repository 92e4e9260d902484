"""Concrete scenarios: static oscillator, inverted oscillator, de Sitter mode."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy import stats

from .errors import FitError, ValidityError
from .kernels import BathSpec, Regime, equivalent_lagrangian
from .propagator import inverted_white_noise_closed, static_white_noise_closed
from .squeeze import Constant, ModeSolution, SystemLagrangian, solve_mode


class ScenarioName(str, Enum):
    STATIC = "static"
    INVERTED = "inverted"
    DESITTER = "desitter"


class LawKind(str, Enum):
    ENTROPY_CONSTANT = "entropy_constant"
    ENTROPY_LINEAR_IN_R = "entropy_linear_in_r"


@dataclass(frozen=True)
class AsymptoticLaw:
    kind: LawKind
    slope: float
    intercept: Optional[float]
    validity: str
    name: str = ""


@dataclass(frozen=True)
class Scenario:
    """A system, its bath and the closed-form facts known about it.

    ``lagr`` is the physical system; ``equivalent`` is the undamped
    oscillator whose X drives the propagator.  Times are physical; the
    dimensionless time is z = kappa * t.
    """

    name: ScenarioName
    lagr: SystemLagrangian
    bath: BathSpec
    equivalent: SystemLagrangian
    analytic_X: Optional[Callable] = None
    analytic_Xdot: Optional[Callable] = None
    predictions: tuple = ()
    params: dict = field(default_factory=dict)
    closed_white_noise: Optional[Callable] = None
    singular_time: Optional[float] = None

    @property
    def kappa(self):
        return self.equivalent.kappa

    @property
    def t_i(self):
        return self.equivalent.t_i

    def z_to_t(self, z):
        return np.asarray(z, dtype=float) / self.kappa if self.name is ScenarioName.DESITTER \
            else self.t_i + np.asarray(z, dtype=float) / self.kappa

    def t_to_z(self, t):
        return self.kappa * np.asarray(t, dtype=float) if self.name is ScenarioName.DESITTER \
            else self.kappa * (np.asarray(t, dtype=float) - self.t_i)

    def law(self, name):
        for p in self.predictions:
            if p.name == name:
                return p
        raise KeyError(f"scenario {self.name.value} has no law {name!r}")

    def mode(self, t_end, source="analytic", tol=1e-10, atol=1e-12):
        """Mode solution of the equivalent oscillator up to ``t_end``."""
        span = (self.t_i, float(t_end))
        if source == "analytic":
            if self.analytic_X is None:
                raise ValueError(f"{self.name.value} has no analytic X")
            return ModeSolution.analytic(self.equivalent, self.analytic_X, self.analytic_Xdot, span)
        if source == "numeric":
            return solve_mode(self.equivalent, span, tol=tol, atol=atol)
        raise ValueError(f"unknown mode source {source!r}")


def _with_bath(lagr, bath, kappa):
    return equivalent_lagrangian(lagr, bath, kappa=kappa)


def make_static(k, gamma0=0.0, T=0.0, sigma=None, omega_max=None, regime=Regime.WHITE_NOISE):
    """Oscillator of frequency k with a static ohmic coupling; kappa^2 = k^2 - gamma0^2."""
    if not k > gamma0:
        raise ValueError(f"static oscillator needs k > gamma0 (k={k}, gamma0={gamma0})")
    kap = float(np.sqrt(k * k - gamma0 * gamma0))
    lagr = SystemLagrangian(Constant(1.0), Constant(0.0), Constant(k * k), kap, 0.0)
    bath = BathSpec(gamma0, T, Constant(1.0), omega_max or 1e3 * kap, regime)
    laws = [AsymptoticLaw(LawKind.ENTROPY_CONSTANT, 0.0, 1 + np.log(T / k) if T > 0 else None,
                          "T >> k", name="high_T")]
    params = dict(k=k, gamma0=gamma0, T=T, kappa=kap, relaxation_time=np.inf, decoherence_time=np.inf)
    if gamma0 > 0:
        params["relaxation_time"] = 1 / (2 * gamma0)
        if sigma is not None and T > 0:
            params["decoherence_time"] = 1 / (4 * gamma0 * T * sigma**2)
    return Scenario(ScenarioName.STATIC, lagr, bath, _with_bath(lagr, bath, kap),
                    analytic_X=lambda t: np.exp(-1j * kap * t),
                    analytic_Xdot=lambda t: -1j * kap * np.exp(-1j * kap * t),
                    predictions=tuple(laws), params=params,
                    closed_white_noise=static_white_noise_closed)


def make_inverted(k, gamma0=0.0, T=0.0, sigma=None, omega_max=None, regime=Regime.WHITE_NOISE):
    """Inverted oscillator -k^2 with a static ohmic coupling; kappa^2 = k^2 + gamma0^2."""
    if not k > 0:
        raise ValueError("k must be positive")
    kap = float(np.sqrt(k * k + gamma0 * gamma0))
    lagr = SystemLagrangian(Constant(1.0), Constant(0.0), Constant(-k * k), kap, 0.0)
    bath = BathSpec(gamma0, T, Constant(1.0), omega_max or 1e3 * kap, regime)
    laws = [AsymptoticLaw(LawKind.ENTROPY_LINEAR_IN_R, 1.0,
                          1 + np.log(T * gamma0 / kap**2) if T > 0 and gamma0 > 0 else None,
                          "white noise, gamma0 << kappa", name="high_T"),
            AsymptoticLaw(LawKind.ENTROPY_LINEAR_IN_R, 1.0, None,
                          "T = 0, cutoff-dependent constant", name="zero_T")]
    params = dict(k=k, gamma0=gamma0, T=T, kappa=kap)
    return Scenario(ScenarioName.INVERTED, lagr, bath, _with_bath(lagr, bath, kap),
                    analytic_X=lambda t: np.cosh(kap * t) - 1j * np.sinh(kap * t),
                    analytic_Xdot=lambda t: kap * (np.sinh(kap * t) - 1j * np.cosh(kap * t)),
                    predictions=tuple(laws), params=params,
                    closed_white_noise=inverted_white_noise_closed)


def desitter_X(z, z_i=None):
    """Small-c de Sitter mode and its z-derivative.

    Built from f(z) = (1 - i/z) e^{-iz} and its conjugate.  With ``z_i`` the
    combination matching X = 1, X' = -i - 1/z_i at z_i; without it the
    early-time limit with the constant phase dropped, which is f itself.
    """
    def basis(x):
        x = np.asarray(x, dtype=float)
        f = (1 - 1j / x) * np.exp(-1j * x)
        fp = (1j / x**2 - 1j * (1 - 1j / x)) * np.exp(-1j * x)
        return f, fp

    f, fp = basis(z)
    if z_i is None:
        return f, fp
    fi, fpi = basis(z_i)
    X0, Xp0 = 1.0, -1j - 1 / z_i
    W = fi * np.conj(fpi) - fpi * np.conj(fi)
    a = (X0 * np.conj(fpi) - Xp0 * np.conj(fi)) / W
    b = (Xp0 * fi - X0 * fpi) / W
    return a * f + b * np.conj(f), a * fp + b * np.conj(fp)


def make_desitter(k, H, c, T=0.0, z_i=-1e3, omega_max=None, regime=Regime.WHITE_NOISE,
                  x_variant="renamed"):
    """Massless minimally coupled field mode in de Sitter space, time eta = z/k.

    ``x_variant`` picks the mode: "renamed" (early-time limit, phase
    dropped), "initial" (small-c solution with exact data at z_i), or
    "numeric" (the full equation including c^2, integrated).
    """
    if not 0 <= c < 0.5:
        raise ValidityError(f"de Sitter scenario needs 0 <= c < 1/2, got {c!r}")
    if not (k > 0 and H > 0 and z_i < 0):
        raise ValueError("need k > 0, H > 0, z_i < 0")
    gamma0 = c * H
    eta_i = z_i / k
    lagr = SystemLagrangian(Constant(1.0), lambda t: 1 / t, lambda t: k * k - 1 / t**2, k, eta_i,
                            mass_dot=Constant(0.0), cross_term_dot=lambda t: -1 / t**2)
    bath = BathSpec(gamma0, T, lambda t: 1 / np.sqrt(-H * t), omega_max or 1e3 * k, regime,
                    coupling_dot=lambda t: 0.5 * H / (-H * t) ** 1.5,
                    coupling_sq_integral=lambda t0, t1: np.log(t0 / t1) / H)
    equiv = _with_bath(lagr, bath, k)
    if x_variant == "numeric":
        aX = aXd = None
    elif x_variant in ("renamed", "initial"):
        zi = None if x_variant == "renamed" else z_i
        aX = lambda t: desitter_X(k * np.asarray(t), zi)[0]
        aXd = lambda t: k * desitter_X(k * np.asarray(t), zi)[1]
    else:
        raise ValueError(f"unknown x_variant {x_variant!r}")
    laws = [AsymptoticLaw(LawKind.ENTROPY_LINEAR_IN_R, 1 - c, None, "white noise, |z| << 1",
                          name="high_T"),
            AsymptoticLaw(LawKind.ENTROPY_LINEAR_IN_R, 0.5 - c, None,
                          "finite T with omega_max << 1/|lambda|", name="finite_T")]
    params = dict(k=k, H=H, c=c, gamma0=gamma0, T=T, z_i=z_i, kappa=k, x_variant=x_variant)
    return Scenario(ScenarioName.DESITTER, lagr, bath, equiv, analytic_X=aX, analytic_Xdot=aXd,
                    predictions=tuple(laws), params=params, singular_time=0.0)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr: float
    n: int
    r_range: tuple


def fit_asymptote(r, S, window=None, min_samples=10, min_spread=2.0):
    """Least-squares line S = slope * r + intercept over a window in r."""
    r, S = np.asarray(r, dtype=float), np.asarray(S, dtype=float)
    if r.shape != S.shape:
        raise FitError("r and S must have the same shape")
    mask = np.isfinite(r) & np.isfinite(S)
    if window is not None:
        mask &= (r >= window[0]) & (r <= window[1])
    r, S = r[mask], S[mask]
    if r.size < min_samples:
        raise FitError(f"need at least {min_samples} samples in the window, got {r.size}")
    spread = float(np.ptp(r))
    if spread < min_spread:
        raise FitError(f"r spread {spread:.3g} below the required {min_spread}")
    res = stats.linregress(r, S)
    return FitResult(float(res.slope), float(res.intercept), float(res.stderr), int(r.size),
                     (float(r.min()), float(r.max())))
