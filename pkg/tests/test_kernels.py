import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from qbm_entropy.kernels import (BathSpec, Regime, apply_dissipation, damping_log,
                                 effective_frequency, equivalent_lagrangian, integrate_delta,
                                 integrate_delta_prime, noise_kernel, omega_coth, step,
                                 white_noise_kernel)
from qbm_entropy.squeeze import Constant, SystemLagrangian

EPS = 1e-3


def _moll(x, eps=EPS):
    return np.exp(-0.5 * (x / eps) ** 2) / (np.sqrt(2 * np.pi) * eps)


def _moll_prime(x, eps=EPS):
    return -x / eps**2 * _moll(x, eps)


def _mollified(f, kernel, a, bounds):
    """Gaussian-mollified integral, Richardson-extrapolated in the width.

    A boundary at the spike leaves an O(eps) error; 2 I(eps/2) - I(eps) removes it.
    """
    lo, hi = bounds

    def at(eps):
        x0, x1 = max(lo, a - 12 * eps), min(hi, a + 12 * eps)
        pts = [p for p in (a - 5 * eps, a, a + 5 * eps) if x0 < p < x1]
        return quad(lambda x: f(x) * kernel(x - a, eps), x0, x1, points=pts or None,
                    limit=400, epsabs=1e-13)[0]
    return 2 * at(EPS / 2) - at(EPS)


def test_omega_coth_limits():
    assert omega_coth(3.0, 0.0) == 3.0
    assert omega_coth(0.0, 2.0) == pytest.approx(4.0)
    # both sides of the series switch agree with extended precision
    for x in (0.999e-4, 1.001e-4, 3e-7):
        w = 2 * 5.0 * x
        ref = float(mpmath.mpf(w) / mpmath.tanh(mpmath.mpf(w) / 10))
        assert omega_coth(w, 5.0) == pytest.approx(ref, rel=1e-13)
    assert omega_coth(2.0, 1.0) == pytest.approx(2.0 / np.tanh(1.0), rel=1e-14)


def test_step_is_half_at_origin():
    np.testing.assert_array_equal(step(np.array([-1.0, 0.0, 2.0])), [0.0, 0.5, 1.0])


# bounds [0, 2]; f vanishes on both ends so the mollified delta' has no edge term
def _f(x):
    return np.sin(x + 0.3) * x * (2 - x)


def _fp(x):
    return np.cos(x + 0.3) * x * (2 - x) + np.sin(x + 0.3) * (2 - 2 * x)


@pytest.mark.parametrize("a", [0.7, 0.0, 2.0, -0.5, 2.5])
def test_delta_prime_matches_mollified(a):
    got = integrate_delta_prime(_fp, a, (0.0, 2.0))
    ref = _mollified(_f, _moll_prime, a, (-1.0, 3.0) if not 0 <= a <= 2 else (0.0, 2.0))
    if not 0 <= a <= 2:
        ref = 0.0
    assert got == pytest.approx(ref, abs=1e-5)


@pytest.mark.parametrize("a,weight", [(0.7, 1.0), (0.0, 0.5), (2.0, 0.5), (-0.5, 0.0), (2.5, 0.0)])
def test_delta_matches_mollified(a, weight):
    g = lambda x: np.exp(x) + 1
    got = integrate_delta(g, a, (0.0, 2.0))
    assert got == pytest.approx(weight * g(a), rel=1e-14)
    if weight:
        assert got == pytest.approx(_mollified(g, _moll, a, (0.0, 2.0)), rel=1e-5)


def test_dissipation_sign_matches_mollified_kernel():
    bath = BathSpec(0.2, 1.0, coupling=lambda t: 1 + 0.3 * t, coupling_dot=Constant(0.3))
    f, fp = np.cos, lambda x: -np.sin(x)
    s = 0.9
    got, inside = apply_dissipation(bath, f, fp, s, (0.0, 2.0))
    assert inside
    ref = 2 * 0.2 * (1 + 0.3 * s) * quad(
        lambda x: (1 + 0.3 * x) * f(x) * _moll_prime(s - x), s - 12 * EPS, s + 12 * EPS,
        points=[s], limit=400)[0]
    assert got == pytest.approx(ref, rel=1e-5)
    assert apply_dissipation(bath, f, fp, 3.0, (0.0, 2.0)) == (0.0, False)
    edge, inside = apply_dissipation(bath, f, fp, 2.0, (0.0, 2.0))
    assert inside and edge == pytest.approx(0.5 * apply_dissipation(bath, f, fp, 2.0, (0.0, 3.0))[0])


def _zero_T_kernel(gamma0, W, d):
    if d == 0:
        return 2 * gamma0 / np.pi * W**2 / 2
    return 2 * gamma0 / np.pi * (W * np.sin(W * d) / d + (np.cos(W * d) - 1) / d**2)


@pytest.mark.parametrize("d", [0.0, 0.3, 2.0, 17.0])
def test_noise_kernel_zero_temperature(d):
    bath = BathSpec(0.1, 0.0, omega_max=50.0, regime=Regime.SPECTRAL)
    got = noise_kernel(bath, 1.0 + d, 1.0)
    assert got == pytest.approx(_zero_T_kernel(0.1, 50.0, d), rel=1e-8, abs=1e-10)


def test_noise_kernel_high_temperature_is_sinc():
    T, W, d = 1e6, 10.0, 0.4
    bath = BathSpec(0.1, T, omega_max=W, regime=Regime.SPECTRAL)
    ref = 2 * 0.1 / np.pi * 2 * T * np.sin(W * d) / d
    assert noise_kernel(bath, d, 0.0) == pytest.approx(ref, rel=1e-6)


def test_noise_kernel_symmetric_and_coupling_weighted():
    bath = BathSpec(0.3, 2.0, coupling=lambda t: 1 + t, omega_max=20.0, regime=Regime.SPECTRAL)
    a, b = noise_kernel(bath, 0.2, 1.1), noise_kernel(bath, 1.1, 0.2)
    assert a == pytest.approx(b, rel=1e-12)
    flat = BathSpec(0.3, 2.0, omega_max=20.0, regime=Regime.SPECTRAL)
    assert a == pytest.approx(1.2 * 2.1 * noise_kernel(flat, 0.2, 1.1), rel=1e-9)


def test_noise_kernel_grows_with_cutoff():
    vals = [noise_kernel(BathSpec(0.1, 1.0, omega_max=W, regime=Regime.SPECTRAL), 0.0, 0.0)
            for W in (1.0, 5.0, 25.0)]
    assert vals[0] < vals[1] < vals[2]


def test_noise_kernel_rejects_white_regime():
    with pytest.raises(ValueError):
        noise_kernel(BathSpec(0.1, 1.0), 0.0, 0.0)


def test_white_noise_kernel_weight():
    bath = BathSpec(0.05, 300.0, coupling=lambda t: np.sqrt(t + 1))
    assert white_noise_kernel(bath, 3.0) == pytest.approx(4 * 0.05 * 300.0 * 4.0)


def test_bath_validation():
    with pytest.raises(ValueError):
        BathSpec(-0.1)
    with pytest.raises(ValueError):
        BathSpec(0.1, -1.0)
    with pytest.raises(ValueError):
        BathSpec(0.1, 1.0, omega_max=0.0)


def test_effective_frequency_and_equivalent_oscillator():
    lagr = SystemLagrangian.constant(2.0, 0.0, 3.0, 1.0)
    bath = BathSpec(0.4, 1.0, coupling=Constant(1.5))
    w2 = 3.0 - 0.4**2 * 1.5**4 / 4.0
    assert effective_frequency(lagr, bath, 0.0) == pytest.approx(w2)
    eq = equivalent_lagrangian(lagr, bath, kappa=1.7)
    assert eq.Omega2(0.3) == pytest.approx(w2)
    assert eq.kappa == 1.7
    varying = BathSpec(0.4, 1.0, coupling=lambda t: 1 + t)
    eq = equivalent_lagrangian(lagr, varying)
    assert eq.Omega2(1.0) == pytest.approx(3.0 - 0.16 * 16 / 4.0)


def test_damping_log_quadrature_and_closed_paths():
    lagr = SystemLagrangian.constant()
    bath = BathSpec(0.2, coupling=lambda t: 1 + t)
    got = damping_log(lagr, bath, 0.0, np.array([0.5, 2.0]))
    np.testing.assert_allclose(got, 0.2 * ((1 + np.array([0.5, 2.0])) ** 3 - 1) / 3, rtol=1e-12)
    assert damping_log(lagr, BathSpec(0.2), 1.0, 4.0) == pytest.approx(0.6)
    assert damping_log(lagr, BathSpec(0.0), 1.0, 4.0) == 0.0
