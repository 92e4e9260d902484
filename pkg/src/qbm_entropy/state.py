"""Gaussian reduced density matrices: evolution, entropy and fluctuations.

An evolved state is stored as the triple (A, B, C) of

    rho(Sigma, Delta) = N exp(-A Delta^2 - 2i B Delta Sigma - 4 C Sigma^2)

with Sigma = (x + x')/2 and Delta = x - x', so that the position variance
is 1/(8C) and the purity is sqrt(C/A).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AxisDegenerateError, DegeneracyError, PurityError

PURITY_RTOL = 1e-9
SMALL_Q = 1e-6


@dataclass(frozen=True)
class InitialGaussian:
    """rho_0(x, x') = exp(-xi x^2 - xi* x'^2 + chi x x')."""

    xi: complex
    chi: float = 0.0

    def __post_init__(self):
        xi = complex(self.xi)
        object.__setattr__(self, "xi", xi)
        if not xi.real > 0:
            raise ValueError(f"Re xi must be positive, got {xi!r}")
        if not 2 * xi.real - self.chi > 0:
            raise ValueError("2 Re xi - chi must be positive")

    @property
    def is_pure(self):
        return self.chi == 0.0


@dataclass(frozen=True)
class EvolvedGaussian:
    A: float
    B: float
    C: float

    @property
    def N(self):
        return 2 * np.sqrt(self.C / np.pi)

    @property
    def purity(self):
        return np.sqrt(self.C / self.A)

    def covariance(self):
        """(Var x, Cov(x, p), Var p) of the state."""
        A, B, C = self.A, self.B, self.C
        return 1 / (8 * C), -B / (4 * C), 2 * A + B**2 / (2 * C)


@dataclass(frozen=True)
class FluctuationReport:
    du2: float
    dv2: float
    Lu2: float
    Lv2: float
    sigma: float
    lam: float
    gamma_rot: float
    rho_u: tuple
    rho_v: tuple

    @property
    def uncertainty(self):
        return np.sqrt(self.du2 * self.dv2)


def initial_from_width(sigma, kappa):
    """Pure Gaussian of position width sigma, and its squeeze r = ln(sigma_0/sigma)."""
    if not sigma > 0 or not kappa > 0:
        raise ValueError("sigma and kappa must be positive")
    sigma0 = np.sqrt(1 / (2 * kappa))
    return InitialGaussian(1 / (4 * sigma**2), 0.0), float(np.log(sigma0 / sigma))


def width_from_r(r, kappa):
    return np.exp(-r) / np.sqrt(2 * kappa)


def evolve(init, pc):
    """Apply the superpropagator with coefficients ``pc`` to ``init``.

    Works elementwise when the coefficients are arrays.
    """
    xr, xi = init.xi.real, init.xi.imag
    chi = init.chi
    a11, a12, a22 = np.asarray(pc.a11), np.asarray(pc.a12), np.asarray(pc.a22)
    b1, b2, b3, b4 = (np.asarray(getattr(pc, f"b{i}")) for i in range(1, 5))
    D = 4 * abs(init.xi) ** 2 - chi**2 + 4 * (2 * xr - chi) * a11 + 4 * xi * b4 + b4**2
    if np.any(~(D > 0)):
        raise DegeneracyError(f"propagator determinant D={float(np.min(D))!r} is not positive")
    A = a22 + (((2 * xr + chi) / 4 + a11) * b3**2 + (2 * xi + b4) * a12 * b3
               - (2 * xr - chi) * a12**2) / D
    B = -b1 / 2 + ((xi + b4 / 2) * b2 * b3 - (2 * xr - chi) * a12 * b2) / D
    C = (2 * xr - chi) * b2**2 / (4 * D)
    if A.ndim == 0:
        return EvolvedGaussian(float(A), float(B), float(C))
    return EvolvedGaussian(A, B, C)


def entropy(st, rtol=PURITY_RTOL):
    """Von Neumann entropy, linear entropy and w = 2q/(1+q), q = sqrt(C/A)."""
    A, C = np.asarray(st.A, dtype=float), np.asarray(st.C, dtype=float)
    if np.any(~(C > 0)):
        raise PurityError("C must be positive")
    if np.any(C > A * (1 + rtol)):
        raise PurityError(f"purity sqrt(C/A) exceeds 1: C/A={float(np.max(C / A))!r}")
    q = np.sqrt(np.minimum(C / A, 1.0))
    w = 2 * q / (1 + q)
    # 1 - w = (1-q)/(1+q), written to keep relative accuracy near q = 1
    one_minus_w = np.maximum(A - C, 0.0) / (np.sqrt(A) * (np.sqrt(A) + np.sqrt(C))) / (1 + q)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.where(one_minus_w > 0, one_minus_w * np.log(one_minus_w), 0.0)
        S = -np.log(w) - term / w
        S = np.where(q < SMALL_Q, 1 - np.log(w) - w / 2, S)
    S = np.maximum(S, 0.0)
    if S.ndim == 0:
        return float(S), float(-q), float(w)
    return S, -q, w


def squeezed_vacuum_ABC(r, phi, kappa):
    """Pure squeezed vacuum in (A, B, C) form."""
    th = np.tanh(r)
    den = 1 - 2 * np.cos(2 * phi) * th + th**2
    if np.any(den <= 0) or not np.all(np.isfinite(den)):
        raise OverflowError("squeezed vacuum denominator vanishes")
    A = kappa / 4 * (1 - th**2) / den
    B = kappa * np.sin(2 * phi) * th / den
    return EvolvedGaussian(A, B, A)


def superfluctuant_basis(st, phi, kappa, axis_tol=1e-12):
    """Fluctuations and coherence lengths in the rotated (U, V) basis.

    Returns a :class:`FluctuationReport`; ``rho_u`` and ``rho_v`` hold the
    (A, B, C) coefficients of the marginal kernels in the new variables.
    """
    s, c = np.sin(phi), np.cos(phi)
    if abs(s) < axis_tol or abs(c) < axis_tol:
        raise AxisDegenerateError("phi on an axis: use the position or momentum marginals directly")
    A, B, C = st.A, st.B, st.C
    gam = kappa / 2 * c / s
    sig = s**2 / kappa**2 * (4 * A * C + (B - gam) ** 2)
    Bp = 4 * gam * sig + B - gam
    lam = (4 * A * C + Bp**2) / (4 * sig**2)
    rho_u = (A / (4 * sig * lam), Bp / (4 * sig * lam), C / (4 * sig * lam))
    rho_v = (A / (4 * sig), -Bp / (4 * sig), C / (4 * sig))
    return FluctuationReport(
        du2=sig * lam / (2 * C), dv2=sig / (2 * C), Lu2=sig * lam / (2 * A), Lv2=sig / (2 * A),
        sigma=sig, lam=lam, gamma_rot=gam, rho_u=rho_u, rho_v=rho_v)
