"""Run a scenario over a grid of output times and collect every observable."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import AxisDegenerateError
from .kernels import Regime
from .models import Scenario, ScenarioName
from .propagator import (RESONANCE_RTOL, PropagatorCoeffs, a_coeffs_spectral,
                         a_coeffs_white_noise, b_coeffs)
from .squeeze import ModePoint, bogoliubov_from_mode, squeeze_from_bogoliubov
from .state import (EvolvedGaussian, entropy, evolve, initial_from_width,
                    superfluctuant_basis, width_from_r)

log = logging.getLogger(__name__)

COLUMNS = ("z", "r", "phi", "theta", "a11", "a12", "a22", "b1", "b2", "b3", "b4",
           "A", "B", "C", "S", "S_lin", "du2", "dv2", "Lu2", "Lv2", "dudv")


@dataclass
class RunRecord:
    columns: dict
    dropped_z: np.ndarray = field(default_factory=lambda: np.empty(0))
    notes: list = field(default_factory=list)

    def __getitem__(self, key):
        return self.columns[key]

    def __len__(self):
        return len(self.columns["z"])

    def as_array(self):
        return np.column_stack([self.columns[c] for c in COLUMNS])


def rotated_fluctuations(st, phi, kappa):
    """Delta u^2 and Delta v^2 from the covariance matrix; valid for any phi."""
    vx, vxp, vp = st.covariance()
    s, c = np.sin(phi), np.cos(phi)
    du2 = kappa**2 * s**2 * vx - 2 * kappa * s * c * vxp + c**2 * vp
    dv2 = c**2 * vx + 2 * s * c / kappa * vxp + s**2 / kappa**2 * vp
    return du2, dv2


def fluctuation_columns(st, phi, kappa):
    """du2, dv2, Lu2, Lv2 per row; on the axes the covariance form is used."""
    A, B, C = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (st.A, st.B, st.C))
    phi = np.atleast_1d(phi)
    out = np.empty((4, A.size))
    for j in range(A.size):
        sj = EvolvedGaussian(A[j], B[j], C[j])
        try:
            rep = superfluctuant_basis(sj, phi[j], kappa)
            out[:, j] = rep.du2, rep.dv2, rep.Lu2, rep.Lv2
        except AxisDegenerateError:
            du2, dv2 = rotated_fluctuations(sj, phi[j], kappa)
            ratio = C[j] / A[j]
            out[:, j] = du2, dv2, du2 * ratio, dv2 * ratio
    return out


def simulate(scn: Scenario, z, r0=0.0, sigma=None, mode_source="analytic",
             a_method="auto", rtol=1e-10, atol=1e-12, grid_opts=None,
             include_initial_cross_term=False, omega_grid=None):
    """Evolve the initial Gaussian of squeeze r0 (or width sigma) to each z.

    ``a_method``: "auto" uses a closed form when the scenario has one,
    "quadrature" forces the numerical path.  Output rows whose time sits on
    a zero of Im X are dropped and listed in ``dropped_z``.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size == 0:
        raise ValueError("z must be a nonempty 1-D array")
    if np.any(np.diff(z) <= 0):
        raise ValueError("z must be strictly increasing")
    t = scn.z_to_t(z)
    if np.any(t <= scn.t_i):
        raise ValueError("output times must be after the initial time")
    if scn.singular_time is not None and np.any(t >= scn.singular_time):
        raise ValueError("output times must stop short of the singular time")
    kap = scn.kappa
    mode = scn.mode(t[-1], source=mode_source, tol=rtol, atol=atol)
    X, Xd = mode(t)
    res = np.abs(X.imag) < RESONANCE_RTOL * np.abs(X)
    notes = []
    if np.any(res):
        notes.append(f"dropped {int(res.sum())} row(s) at zeros of Im X: z={z[res].tolist()}")
        log.warning(notes[-1])
    keep = ~res
    z_k, t_k, X, Xd = z[keep], t[keep], X[keep], Xd[keep]
    lagr, bath = scn.equivalent, scn.bath

    b = b_coeffs(mode, lagr, bath, scn.t_i, t_k, include_initial_cross_term)
    if bath.regime is Regime.WHITE_NOISE:
        closed = scn.closed_white_noise if a_method == "auto" else None
        if a_method not in ("auto", "quadrature"):
            raise ValueError(f"unknown a_method {a_method!r}")
        a = a_coeffs_white_noise(mode, lagr, bath, scn.t_i, t_k, closed_form=closed,
                                 grid_opts=_grid(scn, grid_opts))
    else:
        method = "numeric"
        if a_method == "auto" and scn.name is ScenarioName.INVERTED:
            method = "inverted_closed"
        a = a_coeffs_spectral(mode, lagr, bath, scn.t_i, t_k, method=method,
                              grid_opts=_grid(scn, grid_opts), omega_grid=omega_grid)
    pc = PropagatorCoeffs(*a, *b, scn.t_i, t_k)

    if sigma is None:
        sigma = width_from_r(r0, kap)
    init, _ = initial_from_width(sigma, kap)
    st = evolve(init, pc)
    S, S_lin, _ = entropy(st)

    ang = squeeze_from_bogoliubov(bogoliubov_from_mode(lagr, ModePoint(t_k, X, Xd)))
    du2, dv2, Lu2, Lv2 = fluctuation_columns(st, ang.phi, kap)
    cols = dict(z=z_k, r=ang.r, phi=ang.phi, theta=ang.theta,
                a11=a[0], a12=a[1], a22=a[2], b1=b[0], b2=b[1], b3=b[2], b4=b[3],
                A=st.A, B=st.B, C=st.C, S=S, S_lin=S_lin,
                du2=du2, dv2=dv2, Lu2=Lu2, Lv2=Lv2, dudv=np.sqrt(du2 * dv2))
    cols = {k: np.asarray(v, dtype=float) * np.ones(z_k.size) for k, v in cols.items()}
    return RunRecord(cols, dropped_z=z[res], notes=notes)


def _grid(scn, grid_opts):
    opts = dict(grid_opts or {})
    opts.setdefault("singular_time", scn.singular_time)
    return opts
