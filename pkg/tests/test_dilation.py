import numpy as np
import pytest

from numpy.testing import assert_allclose
from scipy.integrate import quad

from wigdil import PhysicsError, VanishingG
from wigdil.bath import BathSpec, SpectralPreset, discretize, memory_kernel
from wigdil.gaussian import SystemInit, logdet, state_from_init, vacuum_state
from wigdil.dilation import (
    integrate_aux,
    tim_aux,
    tim_trajectory,
    make_grid,
    gamma_rate,
    assemble_covariance,
    system_state,
    environment_state,
    drift_matrix,
    lyapunov_propagate
)

def test_resonant_single_mode(resonant_bath):
    traj = integrate_aux(resonant_bath, 5., rtol = 1e-11, atol = 1e-13, n_points = 51)
    assert_allclose(traj.g, np.cos(traj.grid), atol = 1e-9)
    assert_allclose(traj.f[:, 0], -1j * np.sin(traj.grid), atol = 1e-9)
    assert_allclose(traj.gdot, -np.sin(traj.grid), atol = 1e-9)
    p = traj.at(2.345)
    assert_allclose(p.g, np.cos(2.345), atol = 1e-9)
    assert traj.K == 1
    assert traj.bath is resonant_bath

def test_norm_conserved(detuned_traj):
    assert_allclose(detuned_traj.norm, 1., atol = 1e-10)

def test_trajectory_range(detuned_traj):
    with pytest.raises(PhysicsError):
        detuned_traj.at(7.)
    with pytest.raises(PhysicsError):
        detuned_traj.at(-0.1)

def test_make_grid():
    assert_allclose(make_grid(2., 5), [0., 0.5, 1., 1.5, 2.])
    with pytest.raises(PhysicsError):
        make_grid(0., 5)
    with pytest.raises(PhysicsError):
        make_grid(1., 1)

def test_bad_grid(resonant_bath):
    with pytest.raises(PhysicsError):
        integrate_aux(resonant_bath, 1., grid = [0., 0.5, 0.5, 1.])
    with pytest.raises(PhysicsError):
        integrate_aux(resonant_bath, 1., grid = [0.1, 0.5, 1.])

def test_tim_trajectory(tim):
    assert_allclose(tim.Gamma, 1.)
    assert_allclose(tim.norm, 1., atol = 1e-14)
    assert_allclose(np.abs(tim.g), np.exp(-tim.grid))
    assert np.isnan(tim.fdot[0, 0])
    assert tim.kappa_ref == 1. and tim.bath is None
    assert_allclose(tim.time_unit, 1.)
    with pytest.raises(PhysicsError):
        tim_trajectory(0., 1.)

def test_tim_aux(detuned_bath):
    t = np.array([0., 0.5, 2.])
    g, f = tim_aux(0.8, detuned_bath, t)
    assert_allclose(g, np.exp(-0.8 * t))
    assert_allclose(f[0], 0.)
    rate = 0.8 + 1j * detuned_bath.delta[1]
    assert_allclose(f[2, 1], 1j * detuned_bath.gamma[1] * (np.exp(-2 * rate) - 1) / rate)

def test_gamma_rate(exact_resonant):
    traj = exact_resonant(1., 3., 31)
    assert_allclose(gamma_rate(traj, 0.7), np.tan(0.7))
    assert gamma_rate(traj, 2.) < 0
    with pytest.raises(VanishingG):
        gamma_rate(traj, np.pi / 2)
    Gamma = traj.Gamma
    assert np.all(np.isfinite(Gamma))
    assert_allclose(Gamma[:15], np.tan(traj.grid[:15]))

def test_gamma_grid_vanishing(exact_resonant):
    traj = exact_resonant(1., np.pi, 3)
    assert np.isnan(traj.Gamma[1])
    assert np.isfinite(traj.Gamma[[0, 2]]).all()

def test_covariance_at_zero(squeezed, detuned_traj):
    joint = assemble_covariance(squeezed, detuned_traj, 0.)
    assert joint.n_modes == 4
    assert_allclose(joint.cov[:2, :2], state_from_init(squeezed).cov)
    assert_allclose(joint.cov[2:, 2:], vacuum_state(3).cov)
    assert_allclose(joint.cov[:2, 2:], 0.)
    assert_allclose(joint.mean[:2], [squeezed.mu, np.conj(squeezed.mu)])
    assert_allclose(joint.mean[2:], 0.)

def test_coherent_covariance(coherent, detuned_traj):
    ## a coherent state stays a product of coherent states
    joint = assemble_covariance(coherent, detuned_traj, 3.)
    assert_allclose(joint.cov, vacuum_state(4).cov, atol = 1e-14)
    p = detuned_traj.at(3.)
    assert_allclose(joint.mean[0::2], coherent.mu * np.concatenate([[p.g], p.f]))

def test_marginals(squeezed, detuned_traj):
    p = detuned_traj.at(2.)
    S = system_state(squeezed, p)
    x = abs(p.g)**2
    assert_allclose(S.cov[0, 0], squeezed.N * x + 0.5)
    assert_allclose(S.cov[0, 1], squeezed.M * p.g**2)
    E = environment_state(squeezed, p)
    joint = assemble_covariance(squeezed, p)
    assert_allclose(joint.cov[2:, 2:], E.cov)
    assert_allclose(joint.cov[:2, :2], S.cov)

def test_global_determinant_conserved(squeezed, detuned_traj):
    expected = np.log(squeezed.det0) - 3 * np.log(4)
    for t in np.linspace(0., 6., 7):
        assert_allclose(logdet(assemble_covariance(squeezed, detuned_traj, t).cov), expected, atol = 1e-9)

def test_drift_matrix(detuned_bath):
    W = drift_matrix(detuned_bath, 0.7)
    assert W.shape == (8, 8)
    assert_allclose(W + W.conj().T, 0.)
    assert_allclose(W[:2, :2], 0.)
    assert_allclose(W[2:, 2:], 0.)
    assert_allclose(W[0, 2], -1j * 0.4 * np.exp(1j * 0.3 * 0.7))

def test_lyapunov_matches_closed_form(squeezed, detuned_bath):
    traj = integrate_aux(detuned_bath, 4., rtol = 1e-12, atol = 1e-14, n_points = 9)
    covs = lyapunov_propagate(detuned_bath, squeezed, traj.grid, rtol = 1e-12, atol = 1e-14)
    for i, t in enumerate(traj.grid):
        assert_allclose(covs[i], assemble_covariance(squeezed, traj, t).cov, atol = 1e-8)

def test_lyapunov_vacuum_stationary(detuned_bath):
    covs = lyapunov_propagate(detuned_bath, SystemInit(), [0., 1., 2.])
    assert_allclose(covs, np.broadcast_to(0.5 * np.eye(8), covs.shape), atol = 1e-12)

def test_convolution_form():
    ## dg/dt = −∫₀ᵗ 𝒦(t − t′) g(t′) dt′
    rng = np.random.default_rng(7)
    bath = BathSpec(0.3, tuple(zip(rng.uniform(-2., 2., 8), rng.uniform(0.1, 0.5, 8))))
    traj = integrate_aux(bath, 3., rtol = 1e-12, atol = 1e-14, n_points = 7)
    for t in traj.grid[1:]:
        integrand = lambda tp: memory_kernel(bath, t - tp) * traj.at(tp).g
        re = quad(lambda tp: np.real(integrand(tp)), 0., t, epsabs = 1e-12, epsrel = 1e-12)[0]
        im = quad(lambda tp: np.imag(integrand(tp)), 0., t, epsabs = 1e-12, epsrel = 1e-12)[0]
        assert_allclose(traj.at(t).gdot, -(re + 1j * im), atol = 1e-6)

def _tim_deviation(half_width, K, t_min = 0., kappa = 1.):
    bath = discretize(SpectralPreset("flat", kappa = kappa, band = (-half_width * kappa, half_width * kappa), K = K))
    traj = integrate_aux(bath, 3. / kappa, n_points = 301)
    late = traj.grid >= t_min / kappa
    return np.max(np.abs(np.abs(traj.g) - np.exp(-kappa * traj.grid))[late])

def test_tim_emergence():
    deviation = _tim_deviation(20., 400)
    ## worst near κt ≈ 0.1: a band of half-width B delays the onset of exponential decay by ~1/B
    assert deviation <= 0.045
    assert _tim_deviation(20., 400, t_min = 0.5) <= 0.012
    assert 0.35 <= _tim_deviation(40., 800) / deviation <= 0.65
