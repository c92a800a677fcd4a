import functools

import numpy as np
import pytest

from numpy.testing import assert_allclose
from scipy.integrate import quad

from wigdil import VanishingGamma, VanishingGdot, SingularTransfer, VanishingG
from wigdil.gaussian import SystemInit, vacuum_state, relative_entropy, wigner_entropy, mutual_information
from wigdil.bath import BathSpec
from wigdil.dilation import (
    assemble_covariance,
    system_state,
    environment_state,
    gamma_rate,
    integrate_aux,
    tim_trajectory
)
from wigdil.oracles import time_derivative
from wigdil.production import (
    det_system,
    det_environment,
    det_global,
    system_entropy,
    environment_entropy,
    srel_S_vac,
    srel_E_init,
    mutual_information_closed,
    occupation,
    system_entropy_rate,
    production_rate,
    env_production_rate,
    env_production_rate_printed,
    mutual_info_rate,
    mutual_info_rate_determinant,
    entropy_flux,
    current_S,
    current_E,
    mode_currents,
    current_integral_S,
    current_integral_E,
    velocity_mismatch,
    global_relative_entropy,
    conservation_check,
    entropic_record
)

T_HALF = np.log(2) / 2 ## |g|² = ½ for κ = 1

def test_thermal_spot_values(tim, thermal):
    p = tim.at(T_HALF)
    assert_allclose(p.abs_g2, 0.5)
    assert_allclose(production_rate(thermal, p), 1.)
    assert_allclose(env_production_rate(thermal, p), 1.)
    assert_allclose(mutual_info_rate_determinant(thermal, p), 0., atol = 1e-14)
    assert_allclose(entropy_flux(thermal, p), -2.)
    assert_allclose(system_entropy_rate(thermal, p), -1., atol = 1e-14)

def test_thermal_closed_forms(thermal):
    for x in (0., 0.3, 1.):
        g = np.sqrt(x)
        assert_allclose(det_system(thermal, x), (x + 0.5)**2)
        assert_allclose(system_entropy(thermal, g), 1 + np.log(np.pi) + np.log(x + 0.5))
        assert_allclose(srel_S_vac(thermal, g), 2 * x - np.log(x + 0.5) - np.log(2))
        assert_allclose(occupation(thermal, g), x)
    assert_allclose(srel_S_vac(thermal, 1.), 2 - np.log(3))
    assert_allclose(srel_E_init(thermal, 1.), 0., atol = 1e-15)
    assert_allclose(mutual_information_closed(thermal, 1.), 0., atol = 1e-15)
    assert_allclose(mutual_information_closed(thermal, 0.), 0., atol = 1e-15)
    assert_allclose(det_environment(thermal, 1., 3), 4.**-3)
    assert_allclose(det_global(thermal, 3), 2.25 / 4.**3)

def test_thermal_rates(tim):
    ## Π = 4ΓN²|g|⁴/(N|g|²+½) and the environment analogue
    N = 2.
    init = SystemInit(N = N)
    for t in (0.1, 0.7, 2.5):
        x = np.exp(-2 * t)
        s = 1 - x
        p = tim.at(t)
        assert_allclose(production_rate(init, p), 4 * x * N**2 * x / (N * x + 0.5))
        assert_allclose(env_production_rate(init, p), 4 * x * N**2 * s / (N * s + 0.5))
        assert_allclose(mutual_info_rate_determinant(init, p),
                        4 * x * N**2 * (x / (N * x + 0.5) - s / (N * s + 0.5)))

def test_coherent_rates(tim, coherent):
    p = tim.at(0.4)
    x = np.exp(-0.8)
    assert_allclose(production_rate(coherent, p), 16 * x)
    assert_allclose(env_production_rate(coherent, p), 16 * x)
    assert_allclose(mutual_info_rate_determinant(coherent, p), 0., atol = 1e-14)
    assert_allclose(mutual_information_closed(coherent, p.g), 0., atol = 1e-14)
    assert_allclose(entropy_flux(coherent, p), -16 * x)

def test_vacuum_produces_nothing(detuned_traj):
    init = SystemInit()
    p = detuned_traj.at(1.3)
    for rate in (production_rate, env_production_rate, mutual_info_rate_determinant, entropy_flux):
        assert_allclose(rate(init, p), 0., atol = 1e-14)

def test_printed_environment_rate(tim, thermal):
    p = tim.at(T_HALF)
    ## 4Γ|g|²[N − Q'/Q] with Q = 1 and Q' = 2 at N = 1, |g|² = ½
    assert_allclose(env_production_rate_printed(thermal, p), -2.)
    assert not np.isclose(env_production_rate_printed(thermal, p), env_production_rate(thermal, p))

def _fd(traj, func, t):
    return time_derivative(lambda u: func(traj.at(u).g), t, unit = 1., hi = traj.t_max)

@pytest.mark.parametrize("t", [0., 0.8, 2.1, 5.])
def test_rates_match_finite_differences(detuned_traj, random_init, t):
    for _ in range(3):
        init = random_init()
        p = detuned_traj.at(t)
        assert_allclose(production_rate(init, p), -_fd(detuned_traj, lambda g: srel_S_vac(init, g), t),
                        rtol = 1e-6, atol = 1e-7)
        assert_allclose(env_production_rate(init, p), _fd(detuned_traj, lambda g: srel_E_init(init, g), t),
                        rtol = 1e-6, atol = 1e-7)
        assert_allclose(mutual_info_rate_determinant(init, p),
                        _fd(detuned_traj, lambda g: mutual_information_closed(init, g), t),
                        rtol = 1e-6, atol = 1e-7)
        assert_allclose(system_entropy_rate(init, p), _fd(detuned_traj, lambda g: system_entropy(init, g), t),
                        rtol = 1e-6, atol = 1e-7)

def test_decomposition_and_flux(detuned_traj, random_init):
    init = random_init()
    for i in range(0, len(detuned_traj.grid), 5):
        r = entropic_record(init, detuned_traj, i)
        assert_allclose(r.decomposition_residual, 0., atol = 1e-12)
        assert_allclose(r.flux_residual, 0., atol = 1e-12)
        assert_allclose(mutual_info_rate(init, detuned_traj.point(i)), r.dI_SE_dt, atol = 1e-12)
        assert r.I_AS is None

def test_closed_forms_match_covariance(detuned_traj, squeezed):
    for t in (0.5, 2., 4.5):
        p = detuned_traj.at(t)
        joint = assemble_covariance(squeezed, p)
        S, E = system_state(squeezed, p), environment_state(squeezed, p)
        assert_allclose(system_entropy(squeezed, p.g), wigner_entropy(S))
        assert_allclose(environment_entropy(squeezed, p.g, 3), wigner_entropy(E))
        assert_allclose(srel_S_vac(squeezed, p.g), relative_entropy(S, vacuum_state(1)))
        assert_allclose(srel_E_init(squeezed, p.g), relative_entropy(E, vacuum_state(3)))
        assert_allclose(mutual_information_closed(squeezed, p.g), mutual_information(joint, ([0], [1, 2, 3])),
                        atol = 1e-12)

def test_current_integrals(detuned_traj, random_init):
    for t in (0.3, 1.1, 2.7):
        if abs(gamma_rate(detuned_traj, t)) < 1e-3:
            continue
        init = random_init()
        p = detuned_traj.at(t)
        assert_allclose(current_integral_S(init, detuned_traj, t), production_rate(init, p), rtol = 1e-8, atol = 1e-12)
        assert_allclose(current_integral_E(init, detuned_traj, t), env_production_rate(init, p),
                        rtol = 1e-8, atol = 1e-12)
        assert_allclose(velocity_mismatch(init, detuned_traj, t), mutual_info_rate_determinant(init, p),
                        rtol = 1e-8, atol = 1e-12)

def test_current_integrals_tim(tim, squeezed):
    for t in (0., 0.5, 3.):
        p = tim.at(t)
        assert_allclose(current_integral_S(squeezed, tim, t), production_rate(squeezed, p), rtol = 1e-10)
        assert_allclose(current_integral_E(squeezed, tim, t), env_production_rate(squeezed, p),
                        rtol = 1e-10, atol = 1e-14)

def test_current_S(tim, coherent):
    c = current_S(coherent, tim, 0.5)
    g = np.exp(-0.5)
    assert_allclose(c.d, coherent.mu * g)
    ## vacuum noise: Γ(δα − ½·2δα) = 0
    assert_allclose(c.L, 0., atol = 1e-14)

def test_current_E_parts(tim, detuned_traj, squeezed):
    full = current_E(squeezed, tim, 1.)
    irreversible = current_E(squeezed, tim, 1., part = "irreversible")
    assert_allclose(full.L, irreversible.L)
    assert_allclose(full.d, irreversible.d)
    with pytest.raises(ValueError):
        current_E(squeezed, tim, 1., part = "lamb")
    full = current_E(squeezed, detuned_traj, 1.)
    assert full.state.n_modes == 3

def test_mode_currents(detuned_traj, thermal):
    t = 1.2
    p = detuned_traj.at(t)
    currents = mode_currents(thermal, detuned_traj, t)
    collective = current_E(thermal, detuned_traj, t)
    assert len(currents) == 3
    for fdot, c in zip(p.fdot, currents):
        assert_allclose(c.L, -fdot / p.gdot * collective.L)

def test_mode_currents_singular(tim, exact_resonant, thermal):
    with pytest.raises(SingularTransfer):
        mode_currents(thermal, tim, 0.)
    traj = exact_resonant(1., 3., 31)
    with pytest.raises(VanishingGdot):
        mode_currents(thermal, traj, 0.)

def test_vanishing_gamma(exact_resonant, thermal):
    traj = exact_resonant(1., np.pi, 41)
    with pytest.raises(VanishingGamma):
        current_integral_S(thermal, traj, np.pi)
    with pytest.raises(VanishingG):
        current_integral_E(thermal, traj, np.pi / 2)
    ## rates stay finite where g vanishes
    p = traj.at(np.pi / 2)
    assert np.isfinite(production_rate(thermal, p))
    assert_allclose(production_rate(thermal, p), 0., atol = 1e-14)

def test_conservation(detuned_traj, random_init):
    init = random_init()
    assert conservation_check(init, detuned_traj) <= 1e-8
    assert_allclose(global_relative_entropy(init, detuned_traj, 0.),
                    relative_entropy(system_state(init, detuned_traj.at(0.)), vacuum_state(1)))

def test_integrated_mutual_information(detuned_traj, squeezed):
    t = 4.
    integral, _ = quad(lambda u: mutual_info_rate_determinant(squeezed, detuned_traj, u), 0., t,
                       limit = 200, epsabs = 1e-12, epsrel = 1e-10)
    assert_allclose(integral, mutual_information_closed(squeezed, detuned_traj.at(t).g), rtol = 1e-7, atol = 1e-10)

## decomposition and conservation over a matrix of baths and initial states

def _random_bath(K, seed = 11):
    rng = np.random.default_rng(seed)
    return BathSpec(0.3, tuple(zip(rng.uniform(-2., 2., K), rng.uniform(0.1, 0.5, K))))

@functools.lru_cache(maxsize = None)
def _matrix_trajectory(name):
    if name == "tim":
        return tim_trajectory(1., 3., n_points = 31)
    bath = {"K1": BathSpec(0., ((0., 1.),)),
            "K3": BathSpec(0.5, ((0.2, 0.4), (0.9, 0.3), (-0.4, 0.5))),
            "K8": _random_bath(8)}[name]
    return integrate_aux(bath, 4., rtol = 1e-11, atol = 1e-13, n_points = 31)

MATRIX_INITS = {
    "thermal": SystemInit(N = 1.),
    "coherent": SystemInit(mu = 2.),
    "squeezed": SystemInit.from_squeezed_thermal(nbar = 0., r = 0.5, theta = 1.1),
    "squeezed thermal": SystemInit.from_squeezed_thermal(mu = 0.3 - 0.2j, nbar = 0.4, r = 0.3, theta = 0.7),
    "displaced thermal": SystemInit(mu = -0.5 + 1j, N = 2.5, M = 0.8j),
}

@pytest.mark.parametrize("init_name", list(MATRIX_INITS))
@pytest.mark.parametrize("bath_name", ["tim", "K1", "K3", "K8"])
def test_decomposition_and_conservation_matrix(bath_name, init_name):
    traj = _matrix_trajectory(bath_name)
    init = MATRIX_INITS[init_name]
    for i in range(len(traj.grid)):
        r = entropic_record(init, traj, i)
        assert abs(r.Pi - r.env_rate - r.dI_SE_dt) <= 1e-8
    assert conservation_check(init, traj) <= 1e-6

## analytic rates against finite differences and current integrals at random (init, t)

def _draw(seed):
    rng = np.random.default_rng(seed)
    init = SystemInit.from_squeezed_thermal(mu = complex(*rng.normal(size = 2)), nbar = rng.uniform(0., 2.),
                                            r = rng.uniform(0., 0.8), theta = rng.uniform(0., 2 * np.pi))
    return init, rng.uniform(0.1, 5.5)

@pytest.mark.parametrize("seed", range(50))
def test_rate_pathways_agree(detuned_traj, seed):
    init, t = _draw(seed)
    p = detuned_traj.at(t)
    Pi, env_rate = production_rate(init, p), env_production_rate(init, p)
    assert_allclose(Pi, -_fd(detuned_traj, lambda g: srel_S_vac(init, g), t), rtol = 1e-6, atol = 1e-7)
    assert_allclose(env_rate, _fd(detuned_traj, lambda g: srel_E_init(init, g), t), rtol = 1e-6, atol = 1e-7)
    if abs(gamma_rate(detuned_traj, t)) > 1e-3:
        assert_allclose(current_integral_S(init, detuned_traj, t), Pi, rtol = 1e-8, atol = 1e-12)
        assert_allclose(current_integral_E(init, detuned_traj, t), env_rate, rtol = 1e-8, atol = 1e-12)
