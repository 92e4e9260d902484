import numpy as np
import pytest

from qbm_entropy.errors import FitError, ValidityError
from qbm_entropy.kernels import Regime
from qbm_entropy.models import (LawKind, ScenarioName, fit_asymptote, make_desitter,
                                make_inverted, make_static)


def test_static_scenario_facts():
    scn = make_static(1.0, 0.1, 1e5, sigma=1.0)
    assert scn.name is ScenarioName.STATIC
    assert scn.kappa == pytest.approx(np.sqrt(0.99))
    law = scn.law("high_T")
    assert law.kind is LawKind.ENTROPY_CONSTANT
    assert law.intercept == pytest.approx(1 + np.log(1e5))
    assert scn.params["relaxation_time"] == pytest.approx(5.0)
    assert scn.params["decoherence_time"] == pytest.approx(1 / (4 * 0.1 * 1e5))
    with pytest.raises(KeyError):
        scn.law("zero_T")
    with pytest.raises(ValueError):
        make_static(1.0, 1.0)


def test_inverted_scenario_facts():
    scn = make_inverted(0.8, 0.6, 50.0)
    assert scn.kappa == pytest.approx(1.0)
    assert scn.law("high_T").slope == 1.0
    assert scn.law("high_T").intercept == pytest.approx(1 + np.log(50.0 * 0.6))
    assert scn.law("zero_T").intercept is None


def test_desitter_scenario_facts():
    scn = make_desitter(2.0, 0.5, 0.2, 10.0)
    assert scn.bath.gamma0 == pytest.approx(0.1)
    assert scn.law("high_T").slope == pytest.approx(0.8)
    assert scn.law("finite_T").slope == pytest.approx(0.3)
    assert scn.t_i == pytest.approx(-500.0)
    # coupling 1/sqrt(-H eta) squared integrates to a logarithm
    t0, t1 = -3.0, -0.5
    assert scn.bath.coupling_sq_integral(t0, t1) == pytest.approx(np.log(6.0) / 0.5)
    for bad in (0.5, 0.7, -0.1):
        with pytest.raises(ValidityError):
            make_desitter(1.0, 1.0, bad)
    with pytest.raises(ValueError):
        make_desitter(1.0, 1.0, 0.1, x_variant="other")


def test_time_conversions_round_trip():
    for scn in (make_static(2.0, 0.5), make_inverted(1.0, 0.1), make_desitter(3.0, 1.0, 0.1)):
        z = np.array([-2.0, -0.5]) if scn.name is ScenarioName.DESITTER else np.array([0.5, 2.0])
        np.testing.assert_allclose(scn.t_to_z(scn.z_to_t(z)), z)


@pytest.mark.parametrize("maker", [make_static, make_inverted])
def test_numeric_and_analytic_modes_agree(maker):
    scn = maker(1.2, 0.1, 1.0)
    t = np.linspace(0, 5, 11)
    a = scn.mode(5.0, source="analytic")(t)
    n = scn.mode(5.0, source="numeric", tol=1e-12, atol=1e-14)(t)
    np.testing.assert_allclose(n[0], a[0], rtol=1e-9, atol=1e-10)
    with pytest.raises(ValueError):
        scn.mode(5.0, source="other")


def test_numeric_desitter_mode_has_no_closed_form():
    scn = make_desitter(1.0, 1.0, 0.1, x_variant="numeric")
    with pytest.raises(ValueError):
        scn.mode(-1.0)


def test_spectral_bath_settings():
    scn = make_static(1.0, 0.1, 2.0, regime=Regime.SPECTRAL, omega_max=30.0)
    assert scn.bath.regime is Regime.SPECTRAL and scn.bath.omega_max == 30.0


def test_fit_exact_line():
    r = np.linspace(0, 10, 50)
    fit = fit_asymptote(r, 0.7 * r + 2.0, window=(3, 9))
    assert fit.slope == pytest.approx(0.7) and fit.intercept == pytest.approx(2.0)
    assert fit.r_range[0] >= 3 and fit.r_range[1] <= 9


def test_fit_noisy_line():
    rng = np.random.default_rng(5)
    r = np.linspace(0, 10, 400)
    fit = fit_asymptote(r, 0.95 * r - 1 + rng.normal(scale=0.01, size=r.size))
    assert fit.slope == pytest.approx(0.95, abs=3 * fit.stderr + 1e-3)


def test_fit_rejects_thin_windows():
    r = np.linspace(0, 10, 50)
    with pytest.raises(FitError):
        fit_asymptote(r, r, window=(0, 1.5))
    with pytest.raises(FitError):
        fit_asymptote(r[:5], r[:5])
    with pytest.raises(FitError):
        fit_asymptote(r, r[:-1])
    # NaN rows are ignored
    S = r.copy()
    S[3] = np.nan
    assert fit_asymptote(r, S).n == 49
