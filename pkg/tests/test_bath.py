import numpy as np
import pytest

from numpy.testing import assert_allclose
from scipy.integrate import quad, trapezoid

from wigdil import EmptyBand, PhysicsError
from wigdil.bath import BathSpec, SpectralPreset, discretize, memory_kernel

def test_bath_spec(detuned_bath):
    assert detuned_bath.K == 3
    assert_allclose(detuned_bath.delta, [0.3, -0.4, 0.9])
    assert_allclose(detuned_bath.total_coupling, 0.16 + 0.09 + 0.25)

def test_bath_spec_invalid():
    with pytest.raises(EmptyBand):
        BathSpec(0., ())
    with pytest.raises(PhysicsError):
        BathSpec(0., ((0., -1.),))
    with pytest.raises(PhysicsError):
        BathSpec(0., ((np.inf, 1.),))

@pytest.mark.parametrize("K", [1, 10, 400])
def test_flat_discretisation(K):
    kappa = 0.7
    bath = discretize(SpectralPreset("flat", omega = 1., kappa = kappa, K = K))
    width = 40 * kappa
    assert bath.K == K
    assert_allclose(bath.gamma, np.sqrt(kappa * width / (np.pi * K)))
    ## Σγ² reproduces ∫J dΩ/2π over the band
    assert_allclose(bath.total_coupling, 2 * kappa * width / (2 * np.pi))
    assert_allclose(bath.Omega.min() - 1. + 20 * kappa, width / (2 * K))

def test_single_mode_band():
    bath = discretize(SpectralPreset("flat", kappa = 1., band = (-1., 1.), K = 1))
    assert_allclose(bath.Omega, [0.])
    assert_allclose(bath.gamma, [np.sqrt(2 / np.pi)])

def test_ohmic_sum_rule():
    preset = SpectralPreset("ohmic", amplitude = 0.2, cutoff = 2., K = 2000)
    bath = discretize(preset)
    exact = quad(lambda w: preset.density(w) / (2 * np.pi), 0., 20.)[0]
    assert_allclose(bath.total_coupling, exact, rtol = 1e-5)
    assert preset.resolved_band == (0., 20.)

def test_lorentzian_defaults():
    preset = SpectralPreset("lorentzian", omega = 2., kappa = 0.5)
    assert_allclose(preset.resolved_band, (-8., 12.))
    assert_allclose(preset.density(2.), 1.)
    assert_allclose(preset.density(2.5), 0.5)

def test_empty_band():
    with pytest.raises(EmptyBand):
        discretize(SpectralPreset("flat", kappa = 1., K = 0))
    with pytest.raises(PhysicsError):
        SpectralPreset("flat", kappa = 1., band = (1., 1.))

def test_invalid_presets():
    with pytest.raises(PhysicsError):
        SpectralPreset("gaussian", kappa = 1.)
    with pytest.raises(PhysicsError):
        SpectralPreset("flat")
    with pytest.raises(PhysicsError):
        SpectralPreset("ohmic", amplitude = 1.)
    with pytest.raises(PhysicsError):
        SpectralPreset("ohmic", amplitude = 1., cutoff = 1., band = (-1., 1.))
    with pytest.raises(PhysicsError):
        SpectralPreset("flat", omega = 5., kappa = 1., band = (-1., 1.))

def test_memory_kernel(detuned_bath):
    assert_allclose(memory_kernel(detuned_bath, 0.), detuned_bath.total_coupling)
    tau = np.linspace(-3, 3, 13)
    K = memory_kernel(detuned_bath, tau)
    assert K.shape == tau.shape
    assert_allclose(K[::-1], K.conj())
    expected = sum(gamma**2 * np.exp(1j * delta * 1.5) for gamma, delta in zip(detuned_bath.gamma, detuned_bath.delta))
    assert_allclose(memory_kernel(detuned_bath, 1.5), expected)

def test_flat_kernel_area():
    ## a dense flat band behaves like κδ(τ): ∫₀^∞ Re𝒦 dτ ≈ κ
    kappa = 1.
    bath = discretize(SpectralPreset("flat", kappa = kappa, K = 1000))
    tau = np.linspace(0., 30., 6001)
    assert_allclose(trapezoid(np.real(memory_kernel(bath, tau)), tau), kappa, rtol = 0.05)
