"""
Wigner-entropic bookkeeping of the dilated dynamics.

Closed forms are written in x = |g|² and s = 1 − x with

    P = (Nx + ½)² − |M|²x²        (det of the system covariance)
    Q = (Ns + ½)² − |M|²s²        (det of the bath covariance, up to 4^{1−K})

and every rate carries the loss Γ|g|² = −Re(ġ g*), which stays finite where g
vanishes even though Γ itself does not.
"""

import numpy as np

from dataclasses import dataclass, asdict
from typing import List, Optional, Sequence

from wigdil import VanishingG, VanishingGamma, VanishingGdot, SingularTransfer
from wigdil.gaussian import (
    SystemInit,
    LinearCurrent,
    vacuum_state,
    relative_entropy,
    moment_form,
    derivative_to_linear,
    embed_current
)
from wigdil.dilation import (
    AuxPoint,
    AuxTrajectory,
    assemble_covariance,
    system_state,
    environment_state,
    gamma_rate
)

####################
##  CLOSED FORMS  ##
####################

def _x(g):
    return abs(g)**2

def det_system(init: SystemInit, x: float) -> float:
    return (init.N * x + 0.5)**2 - abs(init.M)**2 * x**2

def _ddet(init: SystemInit, x: float) -> float:
    ## d/dx of (Nx + ½)² − |M|²x²
    return init.N + 2 * (init.N**2 - abs(init.M)**2) * x

def det_environment(init: SystemInit, x: float, K: int) -> float:
    return 4.**(1 - K) * det_system(init, 1 - x)

def det_global(init: SystemInit, K: int) -> float:
    return init.det0 / 4.**K

def system_entropy(init: SystemInit, g: complex) -> float:
    return 1 + np.log(np.pi) + 0.5 * np.log(det_system(init, _x(g)))

def environment_entropy(init: SystemInit, g: complex, K: int) -> float:
    s = 1 - _x(g)
    return K * (1 + np.log(np.pi)) + (1 - K) * np.log(2) + 0.5 * np.log(det_system(init, s))

def srel_S_vac(init: SystemInit, g: complex) -> float:
    '''S(W_S ‖ vacuum) = 2(N + |μ|²)|g|² − ½ ln P − ln 2.'''
    x = _x(g)
    return 2 * init.occupation * x - 0.5 * np.log(det_system(init, x)) - np.log(2)

def srel_E_init(init: SystemInit, g: complex) -> float:
    '''S(W_E ‖ W_E(0)) = 2(N + |μ|²)(1 − |g|²) − ½ ln Q − ln 2, independent of K.'''
    s = 1 - _x(g)
    return 2 * init.occupation * s - 0.5 * np.log(det_system(init, s)) - np.log(2)

def mutual_information_closed(init: SystemInit, g: complex) -> float:
    '''I_SE = ½ ln(4PQ / ((N+½)² − |M|²)).'''
    x = _x(g)
    return 0.5 * np.log(4 * det_system(init, x) * det_system(init, 1 - x) / init.det0)

def occupation(init: SystemInit, g: complex) -> float:
    '''⟨a†a⟩_t = (N + |μ|²)|g|².'''
    return init.occupation * _x(g)

#############
##  RATES  ##
#############

def _point(traj, t):
    return traj if isinstance(traj, AuxPoint) else traj.at(t)

def system_entropy_rate(init: SystemInit, traj, t: float = None) -> float:
    '''dS(W_S)/dt = −Γ|g|² P'/P.'''
    p = _point(traj, t)
    return -p.loss * _ddet(init, p.abs_g2) / det_system(init, p.abs_g2)

def production_rate(init: SystemInit, traj, t: float = None) -> float:
    '''Π = −d/dt S(W_S ‖ vacuum) = 4Γ|g|²(N + |μ|²) − Γ|g|² P'/P.'''
    p = _point(traj, t)
    return 4 * p.loss * init.occupation + system_entropy_rate(init, p)

def env_production_rate(init: SystemInit, traj, t: float = None) -> float:
    '''d/dt S(W_E ‖ W_E(0)) = 4Γ|g|²(N + |μ|²) − Γ|g|² Q'/Q.'''
    p = _point(traj, t)
    s = 1 - p.abs_g2
    return 4 * p.loss * init.occupation - p.loss * _ddet(init, s) / det_system(init, s)

def env_production_rate_printed(init: SystemInit, traj, t: float = None) -> float:
    '''
    Environment rate with the ¼ numerator factor dropped:
    4Γ|g|²[(N + |μ|²) − Q'/Q]. Reported for comparison only.
    '''
    p = _point(traj, t)
    s = 1 - p.abs_g2
    return 4 * p.loss * (init.occupation - _ddet(init, s) / det_system(init, s))

def mutual_info_rate(init: SystemInit, traj, t: float = None) -> float:
    '''dI_SE/dt as Π minus the environment rate.'''
    p = _point(traj, t)
    return production_rate(init, p) - env_production_rate(init, p)

def mutual_info_rate_determinant(init: SystemInit, traj, t: float = None) -> float:
    '''dI_SE/dt from the determinants, −Γ|g|² P'/P + Γ|g|² Q'/Q.'''
    p = _point(traj, t)
    s = 1 - p.abs_g2
    return system_entropy_rate(init, p) + p.loss * _ddet(init, s) / det_system(init, s)

def entropy_flux(init: SystemInit, traj, t: float = None) -> float:
    '''Φ = −4Γ⟨a†a⟩_t, so that Φ = dS(W_S)/dt − Π.'''
    p = _point(traj, t)
    return -4 * p.loss * init.occupation

################
##  CURRENTS  ##
################

def _gamma(traj, t):
    if isinstance(traj, AuxPoint):
        if traj.g == 0:
            raise VanishingG(traj.t)
        return -float(np.real(traj.gdot / traj.g))
    return gamma_rate(traj, t)

def current_S(init: SystemInit, traj: AuxTrajectory, t: float) -> LinearCurrent:
    '''
    J_S = Γ(α + ½∂_{α*})W_S, canonicalised to d = Γμg and
    L = Γ(e₁ − ½ [Θ_S⁻¹]₁).
    '''
    Gamma = _gamma(traj, t)
    p = _point(traj, t)
    state = system_state(init, p)
    L = Gamma * np.array([1., 0.]) + derivative_to_linear(state, [0.5 * Gamma, 0.])
    return LinearCurrent(Gamma * init.mu * p.g, L, state)

def current_E(init: SystemInit, traj: AuxTrajectory, t: float, part: str = "full") -> LinearCurrent:
    '''
    Collective bath current J_E = ġ{μ − Σ_q(N f_q* ∂_{β_q*} + M f_q ∂_{β_q})}W_E.

    part="irreversible" replaces ġ by −Γg, dropping the Lamb-shift component;
    the two coincide when ġ/g is real.
    '''
    p = _point(traj, t)
    if part == "full":
        rate = p.gdot
    elif part == "irreversible":
        rate = -_gamma(traj, t) * p.g
    else:
        raise ValueError(f"Unknown current part '{part}'.")
    state = environment_state(init, p)
    f = np.asarray(p.f, dtype = complex)
    D = np.empty(2 * len(f), dtype = complex)
    D[0::2] = -rate * init.N * f.conj()
    D[1::2] = -rate * init.M * f
    return LinearCurrent(rate * init.mu, derivative_to_linear(state, D), state)

def mode_currents(init: SystemInit, traj: AuxTrajectory, t: float) -> List[LinearCurrent]:
    '''
    Per-mode bath currents J_k = −(ḟ_k/ġ) J_E.

    Raises
    ------
    VanishingGdot
        If |ġ| ≤ ε_Γ
    SingularTransfer
        If any ḟ_k is not finite
    '''
    p = traj.at(t)
    if abs(p.gdot) <= traj.eps_gamma:
        raise VanishingGdot(t)
    if not np.all(np.isfinite(p.fdot)):
        raise SingularTransfer(t)
    collective = current_E(init, traj, t)
    return [collective.scaled(-fdot / p.gdot) for fdot in p.fdot]

def _checked_gamma(traj: AuxTrajectory, t: float) -> float:
    Gamma = gamma_rate(traj, t)
    if abs(Gamma) <= traj.eps_gamma:
        raise VanishingGamma(t)
    return Gamma

def current_integral_S(init: SystemInit, traj: AuxTrajectory, t: float) -> float:
    '''(4/Γ) ∫ |J_S|²/W_S.'''
    Gamma = _checked_gamma(traj, t)
    return 4 / Gamma * moment_form(current_S(init, traj, t))

def current_integral_E(init: SystemInit, traj: AuxTrajectory, t: float, part: str = "irreversible") -> float:
    '''(4/Γ) ∫ |J_E|²/W_E.'''
    Gamma = _checked_gamma(traj, t)
    return 4 / Gamma * moment_form(current_E(init, traj, t, part = part))

def velocity_mismatch(init: SystemInit, traj: AuxTrajectory, t: float) -> float:
    '''
    (4/Γ) E_{W_SE}[|J_S/W_S|² − |J_E/W_E|²], both moments taken under the
    joint covariance; equals dI_SE/dt.
    '''
    Gamma = _checked_gamma(traj, t)
    joint = assemble_covariance(init, traj, t, check = False)
    bath_modes = range(1, joint.n_modes)
    j_s = embed_current(current_S(init, traj, t), joint, [0])
    j_e = embed_current(current_E(init, traj, t, part = "irreversible"), joint, bath_modes)
    return 4 / Gamma * (moment_form(j_s) - moment_form(j_e))

####################
##  CONSERVATION  ##
####################

def global_relative_entropy(init: SystemInit, traj: AuxTrajectory, t: float) -> float:
    '''S(W_SE(t) ‖ W_S^∞ W_E(0)); the reference is the global vacuum.'''
    joint = assemble_covariance(init, traj, t)
    return relative_entropy(joint, vacuum_state(joint.n_modes))

def conservation_check(init: SystemInit, traj: AuxTrajectory, grid: Optional[Sequence[float]] = None,
                       threads: int = 1) -> float:
    '''
    Maximum drift of S(W_SE(t) ‖ W_S^∞ W_E(0)) from its t = 0 value over grid.
    '''
    from wigdil.functions import imap_ordered
    grid = traj.grid if grid is None else grid
    values = imap_ordered(lambda t: global_relative_entropy(init, traj, t),
                          [0.] + [float(t) for t in grid], threads = threads)
    return float(np.max(np.abs(np.array(values[1:]) - values[0])))

###############
##  RECORDS  ##
###############

@dataclass(frozen = True)
class EntropicRecord:
    t: float
    g: complex
    abs_g2: float
    Gamma: float
    S_WS: float
    S_WE: float
    srel_S_vac: float
    srel_E_init: float
    I_SE: float
    Pi: float
    env_rate: float
    dI_SE_dt: float
    flux: float
    n_t: float
    dS_WS_dt: float
    I_AS: Optional[float] = None
    dI_AS_dt: Optional[float] = None

    @property
    def decomposition_residual(self) -> float:
        '''Π − env_rate − dI_SE/dt.'''
        return self.Pi - self.env_rate - self.dI_SE_dt
    @property
    def flux_residual(self) -> float:
        '''Φ − (dS(W_S)/dt − Π).'''
        return self.flux - (self.dS_WS_dt - self.Pi)

    def as_dict(self) -> dict:
        return asdict(self)

def entropic_record(init: SystemInit, traj: AuxTrajectory, i: int, ancilla = None) -> EntropicRecord:
    '''
    All entropic quantities at grid index i. ``ancilla`` is an AncillaConfig or None.
    '''
    p = traj.point(i)
    I_AS = dI_AS_dt = None
    if ancilla is not None:
        from wigdil.ancilla import ancilla_information, ancilla_rate
        I_AS = ancilla_information(ancilla, p.g)
        dI_AS_dt = ancilla_rate(ancilla, p)
    return EntropicRecord(t = p.t, g = p.g, abs_g2 = p.abs_g2, Gamma = float(traj.Gamma[i]),
                          S_WS = system_entropy(init, p.g),
                          S_WE = environment_entropy(init, p.g, traj.K),
                          srel_S_vac = srel_S_vac(init, p.g),
                          srel_E_init = srel_E_init(init, p.g),
                          I_SE = mutual_information_closed(init, p.g),
                          Pi = production_rate(init, p),
                          env_rate = env_production_rate(init, p),
                          dI_SE_dt = mutual_info_rate_determinant(init, p),
                          flux = entropy_flux(init, p),
                          n_t = occupation(init, p.g),
                          dS_WS_dt = system_entropy_rate(init, p),
                          I_AS = I_AS, dI_AS_dt = dI_AS_dt)
