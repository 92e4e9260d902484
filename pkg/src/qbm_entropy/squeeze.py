"""Closed-system squeeze dynamics of a time-dependent oscillator.

The system Lagrangian is

    L = M(t)/2 * (xdot**2 + 2*E(t)*xdot*x - Omega2(t)*x**2)

and everything here is expressed through X = alpha + beta, the sum of the
Bogoliubov coefficients, which obeys the classical equation of motion.
Units are hbar = k_B = 1.  Mode equations are integrated in the
dimensionless time z = kappa*t.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import EvaluationError, SingularityError

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
R_MIN = 1e-8
# |beta| below this fraction of |alpha| is rounding noise: phi is undefined
PHASE_EPS = 1e-12


class Constant:
    """Vectorized constant time function with a known (zero) derivative."""

    def __init__(self, value):
        self.value = float(value)

    def __call__(self, t):
        return np.full(np.shape(t), self.value) if np.ndim(t) else self.value

    def __repr__(self):
        return f"Constant({self.value!r})"


def _zero_derivative(fn):
    return Constant(0.0) if isinstance(fn, Constant) else None


def evaluate(fn, name, t):
    """Evaluate a time callable and reject non-finite output."""
    t_arr = np.asarray(t, dtype=float)
    val = np.asarray(fn(t_arr), dtype=float)
    val = np.broadcast_to(val, t_arr.shape) if val.shape != t_arr.shape else val
    if not np.all(np.isfinite(val)):
        bad = t_arr[~np.isfinite(val)] if t_arr.ndim else t_arr
        raise EvaluationError(f"callable {name!r} is not finite at t={float(np.ravel(bad)[0])!r}")
    return val if t_arr.ndim else float(val)


@dataclass(frozen=True)
class SystemLagrangian:
    """Oscillator with time-dependent mass, cross term and frequency.

    ``mass_dot`` and ``cross_term_dot`` are the analytic time derivatives;
    they are inferred as zero for :class:`Constant` callables and must be
    supplied otherwise.
    """

    mass: Callable
    cross_term: Callable
    omega_sq: Callable
    kappa: float
    t_i: float = 0.0
    mass_dot: Optional[Callable] = None
    cross_term_dot: Optional[Callable] = None

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa!r}")
        if self.mass_dot is None:
            object.__setattr__(self, "mass_dot", _zero_derivative(self.mass))
        if self.cross_term_dot is None:
            object.__setattr__(self, "cross_term_dot", _zero_derivative(self.cross_term))

    @classmethod
    def constant(cls, mass=1.0, cross_term=0.0, omega_sq=1.0, kappa=1.0, t_i=0.0):
        return cls(Constant(mass), Constant(cross_term), Constant(omega_sq), kappa, t_i)

    def M(self, t):
        m = evaluate(self.mass, "mass", t)
        if np.any(np.asarray(m) <= 0):
            raise EvaluationError(f"mass must be positive, got {m!r} at t={t!r}")
        return m

    def E(self, t):
        return evaluate(self.cross_term, "cross_term", t)

    def Omega2(self, t):
        return evaluate(self.omega_sq, "omega_sq", t)

    def M_dot(self, t):
        if self.mass_dot is None:
            raise EvaluationError("mass_dot is required for a non-constant mass")
        return evaluate(self.mass_dot, "mass_dot", t)

    def E_dot(self, t):
        if self.cross_term_dot is None:
            raise EvaluationError("cross_term_dot is required for a non-constant cross term")
        return evaluate(self.cross_term_dot, "cross_term_dot", t)

    def mode_coefficient(self, t):
        """Omega^2 + Edot + Mdot*E/M, the restoring term of the mode equation."""
        M = self.M(t)
        return self.Omega2(t) + self.E_dot(t) + self.M_dot(t) * self.E(t) / M

    def initial_mode(self):
        """(X, Xdot) at t_i for the vacuum defined by kappa."""
        t0 = self.t_i
        return 1.0 + 0.0j, -1j * self.kappa / self.M(t0) - self.E(t0)


@dataclass(frozen=True)
class HamiltonianCoeffs:
    f: complex
    h: float


@dataclass(frozen=True)
class ModePoint:
    t: float
    X: complex
    Xdot: complex


@dataclass(frozen=True)
class BogoliubovPair:
    alpha: complex
    beta: complex

    @property
    def unitarity_defect(self):
        return np.abs(self.alpha) ** 2 - np.abs(self.beta) ** 2 - 1.0


@dataclass(frozen=True)
class SqueezeAngles:
    """Squeeze parameter r with angles phi in [0, pi) and theta in [0, 2pi).

    ``phase_defined`` is False where beta vanishes (to rounding) and phi
    carries no information (it is then reported as 0).
    """

    r: float
    phi: float
    theta: float
    phase_defined: bool = True


def hamiltonian_coeffs(lagr, t):
    M, E, W2 = lagr.M(t), lagr.E(t), lagr.Omega2(t)
    k = lagr.kappa
    base = (M / k) * (W2 + E**2)
    return HamiltonianCoeffs(f=0.5 * (base - k / M) + 1j * E, h=0.5 * (base + k / M))


class ModeSolution:
    """Dense trajectory of X(t) and Xdot(t) for one Lagrangian.

    Built either from the ODE solver (:func:`solve_mode`) or from closed-form
    callables (:meth:`analytic`).  Calling the object returns ``(X, Xdot)``.
    """

    def __init__(self, lagr, evaluator, t_span, steps=None, kind="numeric"):
        self.lagr = lagr
        self._evaluator = evaluator
        self.t_span = (float(t_span[0]), float(t_span[1]))
        self.steps = steps
        self.kind = kind

    @classmethod
    def analytic(cls, lagr, X, Xdot, t_span):
        def evaluator(t):
            return np.asarray(X(t), dtype=complex), np.asarray(Xdot(t), dtype=complex)
        return cls(lagr, evaluator, t_span, kind="analytic")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.t_span
        span = hi - lo
        if np.any(t < lo - 1e-12 * abs(span)) or np.any(t > hi + 1e-12 * abs(span)):
            raise ValueError(f"t outside mode span {self.t_span}")
        X, Xd = self._evaluator(np.clip(t, lo, hi))
        if t.ndim == 0:
            return complex(X), complex(Xd)
        return X, Xd

    def point(self, t):
        X, Xd = self(t)
        return ModePoint(float(t), X, Xd)

    @property
    def points(self):
        ts = self.steps if self.steps is not None else np.linspace(*self.t_span, 101)
        X, Xd = self(ts)
        return [ModePoint(float(a), complex(b), complex(c)) for a, b, c in zip(ts, X, Xd)]


def solve_mode(lagr, t_span, tol=DEFAULT_RTOL, atol=DEFAULT_ATOL, initial=None):
    """Integrate the classical mode equation for X from ``t_span[0]``.

    The equation is solved in z = kappa*t with an 8th-order Dormand-Prince
    pair.  ``initial`` overrides the vacuum data (X, Xdot) at t_span[0].
    """
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    if not tol > 0:
        raise ValueError("tol must be positive")
    k = lagr.kappa
    if initial is None:
        if t0 != lagr.t_i:
            raise ValueError("vacuum initial data applies at lagr.t_i only")
        initial = lagr.initial_mode()
    X0, Xd0 = complex(initial[0]), complex(initial[1])

    def rhs(z, y):
        t = z / k
        damp = lagr.M_dot(t) / lagr.M(t) / k
        q = lagr.mode_coefficient(t) / k**2
        return [y[2], y[3], -damp * y[2] - q * y[0], -damp * y[3] - q * y[1]]

    y0 = [X0.real, X0.imag, Xd0.real / k, Xd0.imag / k]
    sol = solve_ivp(rhs, (k * t0, k * t1), y0, method="DOP853", rtol=tol, atol=atol,
                    dense_output=True)
    if sol.status != 0:
        raise SingularityError(f"mode integration stopped: {sol.message}",
                               last_time=float(sol.t[-1] / k))
    dense = sol.sol

    def evaluator(t):
        y = dense(k * np.atleast_1d(t))
        X = y[0] + 1j * y[1]
        Xd = k * (y[2] + 1j * y[3])
        if np.ndim(t) == 0:
            return X[0], Xd[0]
        return X, Xd

    return ModeSolution(lagr, evaluator, (t0, t1), steps=sol.t / k)


def bogoliubov_from_mode(lagr, p):
    M, E, k = lagr.M(p.t), lagr.E(p.t), lagr.kappa
    X, Xd = np.asarray(p.X), np.asarray(p.Xdot)
    half = 0.5 * X
    cross = 0.5j * E * M / k * X
    kin = 0.5j * M / k * Xd
    alpha = half + cross + kin
    beta = half - cross - kin
    if alpha.ndim == 0:
        return BogoliubovPair(complex(alpha), complex(beta))
    return BogoliubovPair(alpha, beta)


def _wrap(angle, period):
    return np.mod(angle, period)


def squeeze_from_bogoliubov(pair):
    """Squeeze parameters from Bogoliubov coefficients.

    alpha = exp(-i theta) ch r,  beta = -exp(-i(theta + 2 phi)) sh r.
    """
    alpha = np.asarray(pair.alpha)
    beta = np.asarray(pair.beta)
    abs_beta = np.abs(beta)
    r = np.arcsinh(abs_beta)
    theta = _wrap(-np.angle(alpha), 2 * np.pi)
    defined = abs_beta > PHASE_EPS * np.abs(alpha)
    phi = np.where(defined, _wrap(0.5 * (-np.angle(beta) - theta) - np.pi / 2, np.pi), 0.0)
    if r.ndim == 0:
        return SqueezeAngles(float(r), float(phi), float(theta), bool(defined))
    return SqueezeAngles(r, phi, theta, defined)


def squeeze_from_mode(lagr, mode, t):
    X, Xd = mode(t)
    return squeeze_from_bogoliubov(bogoliubov_from_mode(lagr, ModePoint(t, X, Xd)))


@dataclass(frozen=True)
class SqueezeTrajectory:
    t: np.ndarray
    r: np.ndarray
    phi: np.ndarray
    theta: np.ndarray

    def angles(self):
        return SqueezeAngles(self.r, _wrap(self.phi, np.pi), _wrap(self.theta, 2 * np.pi))


def integrate_squeeze_flow(lagr, init, t_span, tol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                           t_eval=None, r_min=R_MIN):
    """Integrate the (r, phi, theta) flow equations directly.

    The coth(2r) term is singular at r = 0, so the flow refuses to start or
    continue below ``r_min``; use the X route there instead.
    """
    t0, t1 = map(float, t_span)
    if init.r < r_min:
        raise SingularityError(f"initial r={init.r!r} below floor {r_min}", last_time=t0)
    k = lagr.kappa

    def rhs(z, y):
        r, phi, _ = y
        hc = hamiltonian_coeffs(lagr, z / k)
        af, eps = abs(hc.f), np.angle(hc.f)
        c, s = np.cos(2 * phi + eps), np.sin(2 * phi + eps)
        return [af * s / k,
                (-hc.h + af * c / np.tanh(2 * r)) / k,
                (hc.h - af * np.tanh(r) * c) / k]

    def floor(z, y):
        return y[0] - r_min
    floor.terminal = True
    floor.direction = -1

    z_eval = None if t_eval is None else k * np.asarray(t_eval, dtype=float)
    sol = solve_ivp(rhs, (k * t0, k * t1), [init.r, init.phi, init.theta], method="DOP853",
                    rtol=tol, atol=atol, t_eval=z_eval, events=floor)
    if sol.status == 1 or sol.status < 0:
        last = float(sol.t_events[0][0] / k if sol.status == 1 else sol.t[-1] / k)
        raise SingularityError("squeeze flow reached the r floor; use the X route",
                               last_time=last)
    return SqueezeTrajectory(sol.t / k, sol.y[0], sol.y[1], sol.y[2])


def fixed_point_exists(lagr, t):
    """Whether phi, theta admit constant solutions at time t.

    Uses h**2 - |f|**2 = Omega^2, so the answer is exactly Omega^2(t) <= 0.
    Returns ``(exists, phi_star)`` with phi_star in [0, pi) or None.
    """
    hc = hamiltonian_coeffs(lagr, t)
    af = abs(hc.f)
    if lagr.Omega2(t) > 0 or af == 0.0:
        return False, None
    ratio = np.clip(hc.h / af, -1.0, 1.0)
    phi = _wrap(0.5 * (np.arccos(ratio) - np.angle(hc.f)), np.pi)
    return True, float(phi)


def surface_term_transform(lagr):
    """Remove the cross term by a total derivative; the mode equation is unchanged."""
    if lagr.mass_dot is None or lagr.cross_term_dot is None:
        raise EvaluationError("surface term transform needs analytic mass_dot and cross_term_dot")
    if isinstance(lagr.cross_term, Constant) and lagr.cross_term.value == 0.0:
        return lagr

    def omega_sq(t, _l=lagr):
        return _l.mode_coefficient(t)

    return SystemLagrangian(lagr.mass, Constant(0.0), omega_sq, lagr.kappa, lagr.t_i,
                            mass_dot=lagr.mass_dot, cross_term_dot=Constant(0.0))
