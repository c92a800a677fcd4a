import numpy as np
import pytest

from wigdil.bath import BathSpec
from wigdil.gaussian import SystemInit, GaussianState
from wigdil.dilation import AuxPoint, AuxTrajectory, tim_trajectory, integrate_aux, passive_covariance

def _random_init(rng, coherent = True):
    N = rng.uniform(0., 2.)
    M = 0.9 * np.sqrt(N * (N + 1)) * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    mu = complex(*rng.normal(size = 2)) if coherent else 0j
    return SystemInit(mu = mu, N = N, M = M)

def _random_state(rng, n_modes):
    '''Physical n-mode state: a random passive covariance plus thermal noise per mode.'''
    h = rng.normal(size = n_modes) + 1j * rng.normal(size = n_modes)
    h *= rng.uniform(0.3, 1.) / np.linalg.norm(h)
    cov = passive_covariance(_random_init(rng), h)
    cov = cov + np.diag(np.repeat(rng.uniform(0., 0.5, size = n_modes), 2))
    mean = rng.normal(size = n_modes) + 1j * rng.normal(size = n_modes)
    return GaussianState(np.column_stack([mean, mean.conj()]).ravel(), cov)

@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

@pytest.fixture
def random_init(rng):
    return lambda coherent = True: _random_init(rng, coherent = coherent)

@pytest.fixture
def random_state(rng):
    return lambda n_modes: _random_state(rng, n_modes)

@pytest.fixture
def thermal():
    return SystemInit(N = 1.)

@pytest.fixture
def coherent():
    return SystemInit(mu = 2.)

@pytest.fixture
def squeezed():
    return SystemInit.from_squeezed_thermal(mu = 0.3 - 0.2j, nbar = 0.4, r = 0.3, theta = 0.7)

@pytest.fixture
def resonant_bath():
    return BathSpec(0., ((0., 1.),))

@pytest.fixture
def detuned_bath():
    return BathSpec(0.5, ((0.2, 0.4), (0.9, 0.3), (-0.4, 0.5)))

@pytest.fixture
def tim():
    return tim_trajectory(1., 4., n_points = 81)

@pytest.fixture
def detuned_traj(detuned_bath):
    return integrate_aux(detuned_bath, 6., rtol = 1e-11, atol = 1e-13, n_points = 61)

def _exact_resonant(gamma, t_max, n_points):
    '''g = cos(γt), f = −i sin(γt): the K = 1 resonant solution in closed form.'''
    bath = BathSpec(0., ((0., gamma),))
    def evaluate(t):
        return AuxPoint(t, complex(np.cos(gamma * t)), np.array([-1j * np.sin(gamma * t)]),
                        complex(-gamma * np.sin(gamma * t)), np.array([-1j * gamma * np.cos(gamma * t)]))
    grid = np.linspace(0., t_max, n_points)
    points = [evaluate(float(t)) for t in grid]
    return AuxTrajectory(grid,
                         np.array([p.g for p in points]),
                         np.array([p.f for p in points]),
                         np.array([p.gdot for p in points]),
                         np.array([p.fdot for p in points]),
                         evaluate, bath = bath)

@pytest.fixture
def exact_resonant():
    return _exact_resonant
