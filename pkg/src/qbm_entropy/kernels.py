"""Ohmic bath: dissipation and noise kernels and the smoothed delta calculus."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .squeeze import Constant, SystemLagrangian, evaluate

DEFAULT_OMEGA_MAX_FACTOR = 1e3


class Regime(str, Enum):
    WHITE_NOISE = "white"
    SPECTRAL = "spectral"


@dataclass(frozen=True)
class BathSpec:
    """Ohmic environment with coupling profile c(t).

    ``temperature`` and ``omega_max`` are in the same units as the system
    frequencies (not scaled by kappa).  ``coupling_sq_integral(t0, t1)``, when
    given, returns the integral of c^2 over [t0, t1]; otherwise it is
    evaluated by quadrature.
    """

    gamma0: float = 0.0
    temperature: float = 0.0
    coupling: Callable = Constant(1.0)
    omega_max: float = 1e3
    regime: Regime = Regime.WHITE_NOISE
    coupling_dot: Optional[Callable] = None
    coupling_sq_integral: Optional[Callable] = None

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if not self.gamma0 >= 0:
            raise ValueError(f"gamma0 must be >= 0, got {self.gamma0!r}")
        if not self.temperature >= 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature!r}")
        if not self.omega_max > 0:
            raise ValueError(f"omega_max must be positive, got {self.omega_max!r}")
        if self.coupling_dot is None and isinstance(self.coupling, Constant):
            object.__setattr__(self, "coupling_dot", Constant(0.0))

    def c(self, t):
        return evaluate(self.coupling, "coupling", t)

    def c_dot(self, t):
        if self.coupling_dot is None:
            raise ValueError("coupling_dot is required for a non-constant coupling")
        return evaluate(self.coupling_dot, "coupling_dot", t)


@dataclass(frozen=True)
class KernelEval:
    value: float
    s: float
    s_prime: float


def omega_coth(omega, T):
    """omega * coth(omega / 2T), with coth = 1 at T = 0 and the finite 2T limit at omega = 0."""
    omega = np.asarray(omega, dtype=float)
    if T == 0:
        return omega
    x = omega / (2 * T)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    # x coth x = 1 + x^2/3 near zero
    series = 2 * T * (1 + x**2 / 3)
    return np.where(small, series, omega / np.tanh(safe))


def noise_kernel(bath, s, s_prime, epsrel=1e-10):
    """nu(s, s') for the ohmic bath with a sharp frequency cutoff."""
    if bath.regime is not Regime.SPECTRAL:
        raise ValueError("noise_kernel needs the spectral regime; use white_noise_kernel")
    T = bath.temperature
    if not np.isfinite(T):
        raise ValueError("infinite temperature has no spectral kernel; use the white-noise regime")
    dt = float(s - s_prime)
    g = lambda w: float(omega_coth(w, T))
    wmax = bath.omega_max
    if dt == 0.0:
        val, _ = quad(g, 0.0, wmax, epsabs=0.0, epsrel=epsrel, limit=200)
    else:
        # QAWO handles the oscillation; split into pieces it can resolve
        n = max(1, int(np.ceil(wmax * abs(dt) / (50 * np.pi))))
        edges = np.linspace(0.0, wmax, n + 1)
        val = sum(quad(g, a, b, weight="cos", wvar=dt, epsabs=0.0, epsrel=epsrel, limit=200)[0]
                  for a, b in zip(edges[:-1], edges[1:]))
    return 2 * bath.gamma0 / np.pi * bath.c(s) * bath.c(s_prime) * val


def white_noise_kernel(bath, s):
    """Weight of delta(s - s') in the high-temperature noise kernel."""
    return 4 * bath.gamma0 * bath.temperature * bath.c(s) ** 2


def step(x):
    """Smoothed Heaviside step with step(0) = 1/2."""
    return np.where(x > 0, 1.0, np.where(x < 0, 0.0, 0.5))


def integrate_delta(f, a, bounds):
    """Integral of f(x) delta(x - a) over bounds with the smoothed step."""
    x0, x1 = bounds
    return f(a) * step(x1 - a) * step(a - x0)


def integrate_delta_prime(fprime, a, bounds):
    """Integral of f(x) delta'(x - a) over bounds; needs f'(a)."""
    x0, x1 = bounds
    return -fprime(a) * step(x1 - a) * step(a - x0)


def apply_dissipation(bath, f, fprime, s, bounds):
    """Integral over s' in bounds of mu(s, s') f(s'), mu = 2 gamma0 c(s) c(s') delta'(s - s').

    Since delta' is odd, delta'(s - s') = -delta'(s' - s), so the result is
    +2 gamma0 c(s) (c f)'(s) weighted by the smoothed steps.  Returns
    ``(value, inside)`` where ``inside`` is False when s lies outside bounds.
    """
    x0, x1 = bounds
    weight = float(step(x1 - s) * step(s - x0))
    if weight == 0.0:
        return 0.0, False
    cf_prime = bath.c_dot(s) * f(s) + bath.c(s) * fprime(s)
    return 2 * bath.gamma0 * bath.c(s) * cf_prime * weight, True


def effective_frequency(lagr, bath, t):
    """Omega_eff^2 = Omega^2 - gamma0^2 c^4 / M^2."""
    return lagr.Omega2(t) - bath.gamma0**2 * bath.c(t) ** 4 / lagr.M(t) ** 2


def equivalent_lagrangian(lagr, bath, kappa=None):
    """The undamped oscillator whose X generates the damped elementary solutions."""
    if bath.gamma0 == 0:
        return lagr if kappa is None else SystemLagrangian(
            lagr.mass, lagr.cross_term, lagr.omega_sq, kappa, lagr.t_i,
            lagr.mass_dot, lagr.cross_term_dot)
    if isinstance(lagr.omega_sq, Constant) and isinstance(bath.coupling, Constant) \
            and isinstance(lagr.mass, Constant):
        w2 = Constant(lagr.omega_sq.value - bath.gamma0**2 * bath.coupling.value**4
                      / lagr.mass.value**2)
    else:
        def w2(t, _l=lagr, _b=bath):
            return effective_frequency(_l, _b, t)
    return SystemLagrangian(lagr.mass, lagr.cross_term, w2,
                            lagr.kappa if kappa is None else kappa, lagr.t_i,
                            lagr.mass_dot, lagr.cross_term_dot)


def damping_log(lagr, bath, t0, t1):
    """gamma0 * integral of c^2/M over [t0, t1]."""
    if bath.gamma0 == 0:
        return np.zeros_like(np.asarray(t1, dtype=float)) + 0.0
    t1 = np.asarray(t1, dtype=float)
    if bath.coupling_sq_integral is not None and isinstance(lagr.mass, Constant):
        return bath.gamma0 * bath.coupling_sq_integral(t0, t1) / lagr.mass.value
    if isinstance(bath.coupling, Constant) and isinstance(lagr.mass, Constant):
        return bath.gamma0 * bath.coupling.value**2 / lagr.mass.value * (t1 - t0)
    g = lambda s: bath.c(s) ** 2 / lagr.M(s)
    out = np.array([quad(g, t0, b, epsabs=0.0, epsrel=1e-12, limit=500)[0] for b in t1.ravel()])
    return bath.gamma0 * out.reshape(t1.shape)
