"""Superpropagator coefficients a11, a12, a22, b1..b4 for an ohmic bath.

All quadratures run on a shared set of Gauss-Legendre panels whose
breakpoints contain every requested output time, so one pass over the mode
trajectory serves a whole time series.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ResonanceError, ValidityError
from .kernels import Regime, damping_log, omega_coth

log = logging.getLogger(__name__)

RESONANCE_RTOL = 1e-8
_GL_T = np.polynomial.legendre.leggauss(16)
_GL_W = np.polynomial.legendre.leggauss(8)
_CHUNK = 2**22


@dataclass(frozen=True)
class PropagatorCoeffs:
    a11: float
    a12: float
    a22: float
    b1: float
    b2: float
    b3: float
    b4: float
    t_i: float
    t: float

    def take(self, idx):
        """Coefficients at one output index of a vectorized evaluation."""
        f = lambda v: float(np.asarray(v)[idx]) if np.ndim(v) else float(v)
        return PropagatorCoeffs(*(f(getattr(self, k)) for k in
                                  ("a11", "a12", "a22", "b1", "b2", "b3", "b4", "t_i", "t")))


def _check_resonance(X_t, t):
    X_t = np.asarray(X_t)
    bad = np.abs(X_t.imag) < RESONANCE_RTOL * np.abs(X_t)
    if np.any(bad):
        tb = float(np.ravel(np.broadcast_to(t, X_t.shape))[np.ravel(bad)][0])
        raise ResonanceError(f"Im X vanishes at t={tb!r}; coefficients diverge there", time=tb)


class ElementarySolutions:
    """u1, u2, v1, v2 on [t_i, t] built from the equivalent-oscillator X."""

    def __init__(self, mode, lagr, bath, t_i, t):
        self.mode, self.lagr, self.bath = mode, lagr, bath
        self.t_i, self.t = float(t_i), float(t)
        X_t, _ = mode(self.t)
        _check_resonance(X_t, self.t)
        self.X_t = complex(X_t)
        self.gamma_t = float(damping_log(lagr, bath, self.t_i, self.t))

    def _parts(self, s):
        X, Xd = self.mode(s)
        G = damping_log(self.lagr, self.bath, self.t_i, s)
        return np.asarray(X), np.asarray(Xd), np.asarray(G)

    def _shape(self, s):
        X, _, G = self._parts(s)
        Xt = self.X_t
        w1 = np.imag(Xt * np.conj(X)) / Xt.imag
        w2 = X.imag / Xt.imag
        return w1, w2, G

    def u1(self, s):
        w1, _, G = self._shape(s)
        return w1 * np.exp(-G)

    def u2(self, s):
        _, w2, G = self._shape(s)
        return w2 * np.exp(self.gamma_t - G)

    def v1(self, s):
        w1, _, G = self._shape(s)
        return w1 * np.exp(G)

    def v2(self, s):
        _, w2, G = self._shape(s)
        return w2 * np.exp(G - self.gamma_t)

    def derivative(self, name, s):
        """First time derivative of one of u1, u2, v1, v2."""
        X, Xd, G = self._parts(s)
        Xt = self.X_t
        dG = self.bath.gamma0 * self.bath.c(s) ** 2 / self.lagr.M(s)
        if name in ("u1", "v1"):
            w, dw = np.imag(Xt * np.conj(X)) / Xt.imag, np.imag(Xt * np.conj(Xd)) / Xt.imag
        else:
            w, dw = X.imag / Xt.imag, Xd.imag / Xt.imag
        sign = -1.0 if name[0] == "u" else 1.0
        base = {"u1": -G, "u2": self.gamma_t - G, "v1": G, "v2": G - self.gamma_t}[name]
        return np.exp(base) * (dw + sign * dG * w)


def elementary_solutions(mode, lagr, bath, t_i, t):
    return ElementarySolutions(mode, lagr, bath, t_i, t)


def b_coeffs(mode, lagr, bath, t_i, t, include_initial_cross_term=False):
    """b1..b4 at time(s) t; never reads the temperature.

    ``include_initial_cross_term`` adds M(t_i) E(t_i) to b4.  It is off by
    default because the position variance of a pure evolved state then
    disagrees with |X|^2 / 2 kappa.
    """
    t = np.asarray(t, dtype=float)
    X, Xd = mode(t)
    X, Xd = np.asarray(X), np.asarray(Xd)
    _check_resonance(X, t)
    k = lagr.kappa
    g0 = bath.gamma0
    G = damping_log(lagr, bath, t_i, t)
    M = lagr.M(t)
    b1 = -g0 * bath.c(t) ** 2 + M * Xd.imag / X.imag + M * lagr.E(t)
    b2 = -k * np.exp(G) / X.imag
    b3 = k * np.exp(-G) / X.imag
    b4 = -g0 * bath.c(t_i) ** 2 + k * X.real / X.imag
    if include_initial_cross_term:
        b4 = b4 + lagr.M(t_i) * lagr.E(t_i)
    if t.ndim == 0:
        return float(b1), float(b2), float(b3), float(b4)
    return b1, b2, b3, b4


# ---------------------------------------------------------------------------
# quadrature grid


class TimeGrid:
    """Gauss-Legendre nodes on [t_i, max(t_out)] with every output time a breakpoint.

    Panel length is capped at ``h_max`` in z-units, at ``phase_max / omega_max``
    when a frequency transform is needed, and at ``rel`` times the distance to
    ``singular_time`` when the coefficients blow up there.
    """

    def __init__(self, lagr, bath, t_i, t_out, h_max=1.0, omega_max=None, phase_max=2.0,
                 singular_time=None, rel=0.25):
        t_out = np.asarray(t_out, dtype=float)
        if t_out.ndim != 1 or t_out.size == 0:
            raise ValueError("t_out must be a nonempty 1-D array")
        if np.any(np.diff(t_out) <= 0) or t_out[0] <= t_i:
            raise ValueError("output times must be strictly increasing and after t_i")
        k = lagr.kappa
        h = h_max / k
        if omega_max is not None:
            h = min(h, phase_max / omega_max)
        edges = [float(t_i)]
        for target in t_out:
            while edges[-1] < target:
                a = edges[-1]
                step = h if singular_time is None else min(h, rel * abs(a - singular_time))
                b = a + step
                if b >= target - 1e-9 * step:
                    b = float(target)
                edges.append(b)
        edges = np.asarray(edges)
        self.edges = edges
        self.out_panel = np.searchsorted(edges, t_out) - 1
        x, w = _GL_T
        a, b = edges[:-1, None], edges[1:, None]
        self.nodes = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
        self.weights = (0.5 * (b - a) * w).ravel()
        self.n_per = len(x)
        # node count up to and including the panel that ends at each output time
        self.out_stop = (self.out_panel + 1) * self.n_per
        self.t_out = t_out
        self.t_i = float(t_i)
        self.gamma = self._damping(lagr, bath)

    def _damping(self, lagr, bath):
        if bath.gamma0 == 0:
            return np.zeros_like(self.nodes)
        if bath.coupling_sq_integral is not None or (
                hasattr(bath.coupling, "value") and hasattr(lagr.mass, "value")):
            return damping_log(lagr, bath, self.t_i, self.nodes)
        # panel-local Gauss-Legendre for the running integral of c^2/M
        x, w = _GL_T
        a = np.repeat(self.edges[:-1], self.n_per)
        s = self.nodes
        sub = 0.5 * (s - a)[:, None] * x + 0.5 * (s + a)[:, None]
        rate = bath.c(sub) ** 2 / lagr.M(sub)
        partial = (0.5 * (s - a)[:, None] * w * rate).sum(axis=1)
        panel_rate = bath.c(self.nodes) ** 2 / lagr.M(self.nodes) * self.weights
        panel_tot = panel_rate.reshape(-1, self.n_per).sum(axis=1)
        start = np.concatenate([[0.0], np.cumsum(panel_tot)[:-1]])
        return bath.gamma0 * (np.repeat(start, self.n_per) + partial)


def _output_state(mode, grid, lagr, bath):
    X_t, _ = mode(grid.t_out)
    X_t = np.asarray(X_t)
    _check_resonance(X_t, grid.t_out)
    G_t = damping_log(lagr, bath, grid.t_i, grid.t_out)
    return X_t, np.asarray(G_t, dtype=float)


# ---------------------------------------------------------------------------
# white noise


def static_white_noise_closed(z, g, T):
    """Closed-form a_ij of the damped static oscillator; g = gamma0/kappa."""
    s = np.sin(z)
    d = 1 + g * g
    a11 = T / s**2 * (np.exp(2 * g * z) - 1 - g * np.sin(2 * z) - g * g * (1 - np.cos(2 * z))) / (2 * d)
    a12 = 2 * T / s**2 * (-np.cos(z) * np.sinh(g * z) + g * s * np.cosh(g * z)) / d
    a22 = T / s**2 * (1 - np.exp(-2 * g * z) - g * np.sin(2 * z) + g * g * (1 - np.cos(2 * z))) / (2 * d)
    return a11, a12, a22


def inverted_white_noise_closed(z, g, T):
    """Closed-form a_ij of the damped inverted oscillator; g = gamma0/kappa."""
    kh2 = 1 - g * g
    sh2 = np.sinh(z) ** 2
    e = np.exp(2 * g * z)
    a11 = T / (2 * kh2 * sh2) * (kh2 - e + g * np.sinh(2 * z) + g * g * np.cosh(2 * z))
    a12 = T * np.exp(-g * z) / (kh2 * sh2) * ((e - 1) * np.cosh(z) - (1 + e) * g * np.sinh(z))
    a22 = T * np.exp(-2 * g * z) / (2 * kh2 * sh2) * (1 - kh2 * e + g * e * (np.sinh(2 * z) - g * np.cosh(2 * z)))
    return a11, a12, a22


def _direct_v(grid, X_nodes, X_t, G_t, stop):
    """v1, v2 at the first ``stop`` nodes for one output time."""
    Xs = X_nodes[:stop]
    E = np.exp(grid.gamma[:stop])
    v1 = E * np.imag(X_t * np.conj(Xs)) / X_t.imag
    v2 = E * np.exp(-G_t) * Xs.imag / X_t.imag
    return v1, v2


def a_coeffs_white_noise(mode, lagr, bath, t_i, t, closed_form=None, grid_opts=None):
    """a_ij in the white-noise limit at one or many output times.

    ``closed_form(z, g, T)`` short-circuits the quadrature (static and
    inverted oscillators).  Otherwise the delta function collapses one time
    integral and the other is done on Gauss-Legendre panels.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t_out = np.atleast_1d(t)
    g0, T = bath.gamma0, bath.temperature
    if g0 == 0:
        z = np.zeros_like(t_out)
        return (0.0, 0.0, 0.0) if scalar else (z, z.copy(), z.copy())
    if closed_form is not None:
        X_t, _ = mode(t_out)
        _check_resonance(X_t, t_out)
        k = lagr.kappa
        out = closed_form(k * (t_out - t_i), g0 / k, T)
    else:
        grid = TimeGrid(lagr, bath, t_i, t_out, **(grid_opts or {}))
        X_nodes, _ = mode(grid.nodes)
        X_out, G_out = _output_state(mode, grid, lagr, bath)
        cw = bath.c(grid.nodes) ** 2 * grid.weights
        out = np.zeros((3, t_out.size))
        for j, stop in enumerate(grid.out_stop):
            v1, v2 = _direct_v(grid, X_nodes, X_out[j], G_out[j], stop)
            w = cw[:stop]
            out[:, j] = (w @ (v1 * v1), w @ (v1 * v2), w @ (v2 * v2))
        out = 2 * g0 * T * out * np.array([[1.0], [2.0], [1.0]])
    a11, a12, a22 = (np.asarray(v, dtype=float) for v in out)
    if scalar:
        return float(a11[0]), float(a12[0]), float(a22[0])
    return a11, a12, a22


# ---------------------------------------------------------------------------
# spectral (finite temperature)


def omega_nodes(omega_max, span, width_factor=0.25):
    """Gauss-Legendre frequency nodes resolving structure of width ~ 1/span."""
    n = max(4, int(np.ceil(omega_max * span / (width_factor * np.pi))))
    edges = np.linspace(0.0, omega_max, n + 1)
    x, w = _GL_W
    a, b = edges[:-1, None], edges[1:, None]
    return (0.5 * (b - a) * x + 0.5 * (a + b)).ravel(), (0.5 * (b - a) * w).ravel()


def fourier_transforms(mode, lagr, bath, t_i, t_out, omegas, grid_opts=None, method="auto",
                       cond_max=1e6):
    """F_i(omega, t) = integral over [t_i, t] of c(s) v_i(s) exp(i omega s).

    Returns two complex arrays of shape (len(omegas), len(t_out)).  The
    cumulative method sums running moments of c E Re X and c E Im X once
    and combines them per output; outputs where that combination cancels
    by more than ``cond_max`` are recomputed directly.
    """
    t_out = np.atleast_1d(np.asarray(t_out, dtype=float))
    omegas = np.asarray(omegas, dtype=float)
    opts = dict(grid_opts or {})
    opts.setdefault("omega_max", float(np.max(omegas)) if omegas.size else None)
    grid = TimeGrid(lagr, bath, t_i, t_out, **opts)
    X_nodes, _ = mode(grid.nodes)
    X_out, G_out = _output_state(mode, grid, lagr, bath)
    wce = grid.weights * bath.c(grid.nodes) * np.exp(grid.gamma)
    nw, nt = omegas.size, t_out.size
    F1 = np.empty((nw, nt), dtype=complex)
    F2 = np.empty((nw, nt), dtype=complex)
    rho = X_out.real / X_out.imag
    direct = np.zeros(nt, dtype=bool) if method == "cumulative" else np.ones(nt, dtype=bool)
    if method in ("auto", "cumulative"):
        seg = np.concatenate([[0], grid.out_stop])
        rows = max(1, _CHUNK // max(1, grid.nodes.size))
        for lo in range(0, nw, rows):
            ph = np.exp(1j * np.outer(omegas[lo:lo + rows], grid.nodes))
            GR = np.cumsum(np.add.reduceat(ph * (wce * X_nodes.real), seg[:-1], axis=1), axis=1)
            GI = np.cumsum(np.add.reduceat(ph * (wce * X_nodes.imag), seg[:-1], axis=1), axis=1)
            F1[lo:lo + rows] = GR - rho * GI
            F2[lo:lo + rows] = GI * np.exp(-G_out) / X_out.imag
            if method == "auto":
                scale = np.linalg.norm(np.abs(GR) + np.abs(rho * GI), axis=0)
                num = np.linalg.norm(F1[lo:lo + rows], axis=0)
                bad = scale > cond_max * np.maximum(num, np.finfo(float).tiny)
                direct = direct & bad if lo else bad
    for j in np.flatnonzero(direct):
        stop = grid.out_stop[j]
        v1, v2 = _direct_v(grid, X_nodes, X_out[j], G_out[j], stop)
        cw = grid.weights[:stop] * bath.c(grid.nodes[:stop])
        rows = max(1, _CHUNK // max(1, stop))
        for lo in range(0, nw, rows):
            ph = np.exp(1j * np.outer(omegas[lo:lo + rows], grid.nodes[:stop]))
            F1[lo:lo + rows, j] = ph @ (cw * v1)
            F2[lo:lo + rows, j] = ph @ (cw * v2)
    return F1, F2


def inverted_T0_integrands(z, g, w):
    """Time double integrals of the damped inverted-oscillator solutions.

    Returns (I11, I12, I22) with I_ij = 2 Re[f_i f_j*], f_1 = integral of
    e^{g s} sh(z-s) e^{iws}, f_2 = integral of e^{g s} sh(s) e^{iws}, s in [0, z].
    """
    kh2 = 1 - g * g
    den = kh2**2 + 2 * w * w * (1 + g * g) + w**4
    ch, sh, e = np.cosh, np.sinh, np.exp
    cw, sw = np.cos(w * z), np.sin(w * z)
    I11 = (kh2 - w * w + 2 * e(2 * g * z) + (1 + g * g + w * w) * ch(2 * z)
           - 4 * e(g * z) * (cw * (ch(z) + g * sh(z)) + w * sw * sh(z)) + 2 * g * sh(2 * z)) / den
    I12 = (-2 * ch(z) * (1 + e(2 * g * z)) - 2 * g * sh(z) * (1 - e(2 * g * z))
           + e(g * z) * cw * (3 + g * g + w * w + (kh2 - w * w) * ch(2 * z))
           + 2 * w * e(g * z) * sw * sh(2 * z)) / den
    I22 = (2 + e(2 * g * z) * (kh2 - w * w + (1 + g * g + w * w) * ch(2 * z) - 2 * g * sh(2 * z))
           + 4 * e(g * z) * (cw * (-ch(z) + g * sh(z)) - w * sw * sh(z))) / den
    return I11, I12, I22


def _freq_sum(bath, omegas, wts, P11, P12, P22):
    wc = wts * omega_coth(omegas, bath.temperature)
    pre = 2 * bath.gamma0 / np.pi
    return 0.5 * pre * (wc @ P11), pre * (wc @ P12), 0.5 * pre * (wc @ P22)


def a_coeffs_spectral(mode, lagr, bath, t_i, t, method="numeric", grid_opts=None,
                      omega_grid=None):
    """a_ij with the full finite-temperature noise kernel and a sharp cutoff.

    ``method="inverted_closed"`` uses the analytic time integrals of the
    damped inverted oscillator and integrates only over frequency.
    """
    if bath.regime is not Regime.SPECTRAL:
        raise ValueError("a_coeffs_spectral needs the spectral regime")
    T = bath.temperature
    if T > 0 and bath.omega_max >= 50 * T:
        warnings.warn("omega_max >= 50 T: the coth tail is ~1 and dominates runtime",
                      RuntimeWarning, stacklevel=2)
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t_out = np.atleast_1d(t)
    if bath.gamma0 == 0:
        z = np.zeros_like(t_out)
        return (0.0, 0.0, 0.0) if scalar else (z, z.copy(), z.copy())
    k = lagr.kappa
    span = float(t_out[-1] - t_i)
    if omega_grid is None:
        omegas, wts = omega_nodes(bath.omega_max, span)
    else:
        omegas, wts = omega_grid
    if method == "inverted_closed":
        X_t, _ = mode(t_out)
        _check_resonance(X_t, t_out)
        g = bath.gamma0 / k
        z = k * (t_out - t_i)
        out = np.zeros((3, t_out.size))
        for j, zj in enumerate(z):
            w_hat = omegas / k
            I11, I12, I22 = inverted_T0_integrands(zj, g, w_hat)
            sh2 = np.sinh(zj) ** 2
            # F_hat = f/(kappa sh z) with the damping e^{-g z} on F_2
            P11 = I11 / (2 * sh2 * k**2)
            P12 = np.exp(-g * zj) * I12 / (2 * sh2 * k**2)
            P22 = np.exp(-2 * g * zj) * I22 / (2 * sh2 * k**2)
            out[:, j] = _freq_sum(bath, omegas, wts, P11, P12, P22)
    else:
        F1, F2 = fourier_transforms(mode, lagr, bath, t_i, t_out, omegas, grid_opts=grid_opts)
        out = np.array(_freq_sum(bath, omegas, wts, np.abs(F1) ** 2,
                                 np.real(F1 * np.conj(F2)), np.abs(F2) ** 2))
    a11, a12, a22 = (np.asarray(v, dtype=float) for v in out)
    if scalar:
        return float(a11[0]), float(a12[0]), float(a22[0])
    return a11, a12, a22


# ---------------------------------------------------------------------------
# de Sitter high-temperature check


def a_coeffs_desitter_highT(mode, bath, z_i, z, c):
    """White-noise a_ij for the de Sitter mode by adaptive 1-D quadrature.

    Independent of the panel machinery: uses scipy's adaptive quadrature on
    the mode in z with the explicit power-law damping (z_i/zeta)^c.
    ``mode`` is a callable of z returning X (complex).
    """
    if not c < 0.5:
        raise ValidityError(f"the late-time de Sitter result needs c < 1/2, got {c!r}")
    T = bath.temperature
    Xz = complex(mode(z))
    _check_resonance(Xz, z)

    def v(zeta):
        X = complex(mode(zeta))
        E = (z_i / zeta) ** c
        return E * np.imag(Xz * np.conj(X)) / Xz.imag, E * (z_i / z) ** (-c) * X.imag / Xz.imag

    def piece(fn, a, b):
        return quad(fn, a, b, epsabs=0.0, epsrel=1e-12, limit=200)[0]

    edges = [z_i]
    while edges[-1] < z:
        a = edges[-1]
        edges.append(min(z, a + min(np.pi, 0.25 * abs(a))))
    res = np.zeros(3)
    for a, b in zip(edges[:-1], edges[1:]):
        res += [piece(lambda x: v(x)[0] ** 2 / -x, a, b),
                piece(lambda x: v(x)[0] * v(x)[1] / -x, a, b),
                piece(lambda x: v(x)[1] ** 2 / -x, a, b)]
    return 2 * c * T * res[0], 4 * c * T * res[1], 2 * c * T * res[2]
