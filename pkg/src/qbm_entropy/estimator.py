"""Estimator-style front end: configure once, then transform output times."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .kernels import Regime
from .models import make_desitter, make_inverted, make_static
from .simulation import COLUMNS, simulate


class EntropyEvolution(TransformerMixin, BaseEstimator):
    """Entropy and fluctuation time series for one scenario.

    ``fit`` builds the scenario; ``transform(z)`` returns one row of
    :data:`COLUMNS` per output time z (rows on zeros of Im X are NaN);
    ``predict(z)`` returns the von Neumann entropy alone.

    Parameters
    ----------
    scenario : {"static", "inverted", "desitter"}
    k, gamma0, temperature : physical frequency, ohmic strength and T.
    sigma, r0 : initial width, or its squeeze r0 = ln(sigma_0/sigma).
    c, H, z_i, x_variant : de Sitter coupling, Hubble rate, start and mode.
    regime : "white" or "spectral" noise kernel.
    omega_max : frequency cutoff in units of kappa.
    """

    def __init__(self, scenario="static", k=1.0, gamma0=0.0, temperature=0.0, sigma=None,
                 r0=0.0, c=0.1, H=1.0, z_i=-1e3, x_variant="renamed", regime="white",
                 omega_max=1e3, mode_source="analytic", a_method="auto", rtol=1e-10,
                 atol=1e-12):
        self.scenario = scenario
        self.k = k
        self.gamma0 = gamma0
        self.temperature = temperature
        self.sigma = sigma
        self.r0 = r0
        self.c = c
        self.H = H
        self.z_i = z_i
        self.x_variant = x_variant
        self.regime = regime
        self.omega_max = omega_max
        self.mode_source = mode_source
        self.a_method = a_method
        self.rtol = rtol
        self.atol = atol

    def _build(self):
        regime = Regime(self.regime)
        if self.scenario == "static":
            kap = np.sqrt(self.k**2 - self.gamma0**2) if self.k > self.gamma0 else 1.0
            return make_static(self.k, self.gamma0, self.temperature, sigma=self.sigma,
                               omega_max=self.omega_max * kap, regime=regime)
        if self.scenario == "inverted":
            kap = np.sqrt(self.k**2 + self.gamma0**2)
            return make_inverted(self.k, self.gamma0, self.temperature, sigma=self.sigma,
                                 omega_max=self.omega_max * kap, regime=regime)
        if self.scenario == "desitter":
            return make_desitter(self.k, self.H, self.c, self.temperature, self.z_i,
                                 omega_max=self.omega_max * self.k, regime=regime,
                                 x_variant=self.x_variant)
        raise ValueError(f"unknown scenario {self.scenario!r}")

    def fit(self, X=None, y=None):
        self.scenario_ = self._build()
        self.kappa_ = self.scenario_.kappa
        src = self.mode_source
        if self.scenario == "desitter" and self.x_variant == "numeric":
            src = "numeric"
        self.mode_source_ = src
        self.n_features_in_ = 1
        return self

    def _z(self, X):
        z = check_array(X, ensure_2d=False, dtype=float)
        if z.ndim == 2:
            if z.shape[1] != 1:
                raise ValueError(f"expected a single column of z values, got {z.shape[1]}")
            z = z[:, 0]
        return z

    def transform(self, X):
        check_is_fitted(self, "scenario_")
        z = self._z(X)
        order = np.argsort(z, kind="stable")
        zs = z[order]
        if np.any(np.diff(zs) == 0):
            raise ValueError("z values must be distinct")
        rec = simulate(self.scenario_, zs, r0=self.r0, sigma=self.sigma,
                       mode_source=self.mode_source_, a_method=self.a_method,
                       rtol=self.rtol, atol=self.atol)
        self.record_ = rec
        out = np.full((z.size, len(COLUMNS)), np.nan)
        rows = np.searchsorted(zs, rec["z"])
        out[order[rows]] = rec.as_array()
        return out

    def predict(self, X):
        return self.transform(X)[:, COLUMNS.index("S")]

    def get_feature_names_out(self, input_features=None):
        return np.asarray(COLUMNS, dtype=object)
