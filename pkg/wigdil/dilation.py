"""
Auxiliary-function dynamics of the excitation-conserving dilation.

In the interaction picture the Heisenberg solution is a(t) = g(t)a + Σ_k f_k(t)b_k
with

    dg/dt   = −i Σ_k γ_k e^{iΔ_k t} f_k
    df_k/dt = −i γ_k e^{−iΔ_k t} g,        g(0) = 1, f_k(0) = 0,

and the joint system+bath covariance follows from (g, f_k) alone.
"""

import logging
import numpy as np

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

from scipy.integrate import solve_ivp

from wigdil import ToleranceFailure, VanishingG, PhysicsError
from wigdil.bath import BathSpec
from wigdil.gaussian import GaussianState, SystemInit
from wigdil.constants import DEFAULT_RTOL, DEFAULT_ATOL, NORM_TOL, EPS_G_REL, EPS_GAMMA_REL

logger = logging.getLogger(__name__)

class AuxPoint(NamedTuple):
    t: float
    g: complex
    f: np.ndarray
    gdot: complex
    fdot: np.ndarray

    @property
    def abs_g2(self) -> float:
        return abs(self.g)**2
    @property
    def loss(self) -> float:
        '''Γ|g|² = −Re(ġ g*), finite even where g vanishes.'''
        return -float(np.real(self.gdot * np.conj(self.g)))

@dataclass(frozen = True, eq = False)
class AuxTrajectory:
    """
    Solved auxiliary functions on a time grid plus dense evaluation.

    Arguments:
        grid (np.ndarray): strictly increasing time points, grid[0] = 0
        g (np.ndarray): g(t) on grid
        f (np.ndarray): f_k(t) on grid, shape (len(grid), K)
        gdot (np.ndarray): dg/dt on grid
        fdot (np.ndarray): df_k/dt on grid
        evaluate (callable): t -> AuxPoint, for any t in [0, grid[-1]]
        kappa_ref (float): TIM reference rate, if any
        bath (BathSpec): discrete bath, or None for the collective TIM mode
    """
    grid: np.ndarray
    g: np.ndarray
    f: np.ndarray
    gdot: np.ndarray
    fdot: np.ndarray
    evaluate: Callable[[float], AuxPoint] = field(repr = False)
    kappa_ref: Optional[float] = None
    bath: Optional[BathSpec] = None

    @property
    def K(self) -> int:
        return self.f.shape[1]
    @property
    def t_max(self) -> float:
        return float(self.grid[-1])
    @property
    def eps_g(self) -> float:
        return EPS_G_REL * max(1., abs(self.g[0]))
    @property
    def Gamma(self) -> np.ndarray:
        '''Γ on grid; NaN where |g| ≤ ε_g.'''
        vanishing = np.abs(self.g) <= self.eps_g
        with np.errstate(divide = "ignore", invalid = "ignore"):
            out = -np.real(self.gdot / np.where(vanishing, 1., self.g))
        return np.where(vanishing, np.nan, out)
    @property
    def eps_gamma(self) -> float:
        if self.kappa_ref is not None:
            return EPS_GAMMA_REL * self.kappa_ref
        finite = np.abs(self.Gamma[np.isfinite(self.Gamma)])
        return EPS_GAMMA_REL * (finite.max() if finite.size else 1.)
    @property
    def time_unit(self) -> float:
        '''1/κ with a TIM reference, else 1/sqrt(Σγ_k²).'''
        if self.kappa_ref is not None:
            return 1. / self.kappa_ref
        return 1. / np.sqrt(self.bath.total_coupling) if self.bath.total_coupling > 0 else 1.
    @property
    def norm(self) -> np.ndarray:
        return np.abs(self.g)**2 + np.sum(np.abs(self.f)**2, axis = 1)

    def at(self, t: float) -> AuxPoint:
        if t < 0 or t > self.t_max * (1 + 1e-12):
            raise PhysicsError(f"t = {t} lies outside the trajectory range [0, {self.t_max}].")
        return self.evaluate(float(t))

    def point(self, i: int) -> AuxPoint:
        return AuxPoint(float(self.grid[i]), complex(self.g[i]), self.f[i], complex(self.gdot[i]), self.fdot[i])

def _aux_rhs(bath: BathSpec):
    gamma, delta = bath.gamma, bath.delta
    def rhs(t, y):
        g, f = y[0], y[1:]
        out = np.empty_like(y)
        out[0] = -1j * np.sum(gamma * np.exp(1j * delta * t) * f)
        out[1:] = -1j * gamma * np.exp(-1j * delta * t) * g
        return out
    return rhs

def make_grid(t_max: float, n_points: int) -> np.ndarray:
    if not t_max > 0:
        raise PhysicsError(f"t_max must be positive (got {t_max}).")
    if n_points < 2:
        raise PhysicsError(f"At least 2 time points are required (got {n_points}).")
    return np.linspace(0., t_max, n_points)

def integrate_aux(bath: BathSpec, t_max: float, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
                  grid: Optional[Sequence[float]] = None, n_points: int = 300,
                  kappa_ref: Optional[float] = None) -> AuxTrajectory:
    '''
    Integrate the (1+K) complex auxiliary system with an adaptive 8th-order
    Runge-Kutta scheme and dense output.

    Raises
    ------
    ToleranceFailure
        If the integrator stops early or the norm |g|² + Σ|f_k|² drifts from 1
    '''
    grid = make_grid(t_max, n_points) if grid is None else np.asarray(grid, dtype = float)
    if grid[0] != 0 or np.any(np.diff(grid) <= 0):
        raise PhysicsError("Time grid must start at 0 and be strictly increasing.")
    rhs = _aux_rhs(bath)
    y0 = np.zeros(bath.K + 1, dtype = complex)
    y0[0] = 1.
    sol = solve_ivp(rhs, (0., float(grid[-1])), y0, method = "DOP853", t_eval = grid,
                    dense_output = True, rtol = rtol, atol = atol)
    if not sol.success:
        raise ToleranceFailure(sol.message)
    logger.debug(f"integrate_aux: K={bath.K}, t_max={grid[-1]:.6g}, nfev={sol.nfev}")
    y = sol.y.T
    ydot = np.array([rhs(t, yi) for t, yi in zip(grid, y)])
    def evaluate(t):
        if t == 0:
            yt = y0
        else:
            yt = sol.sol(t)
        dt = rhs(t, yt)
        return AuxPoint(t, complex(yt[0]), yt[1:], complex(dt[0]), dt[1:])
    traj = AuxTrajectory(grid, y[:, 0], y[:, 1:], ydot[:, 0], ydot[:, 1:], evaluate,
                         kappa_ref = kappa_ref, bath = bath)
    drift = np.max(np.abs(traj.norm - 1))
    if drift > NORM_TOL:
        raise ToleranceFailure(f"norm drift {drift:.3e} exceeds {NORM_TOL:.0e}")
    return traj

def tim_aux(kappa: float, bath: BathSpec, t):
    '''
    Wigner-Weisskopf forms g = e^{−κt} and f_k = iγ_k[e^{−(κ+iΔ_k)t} − 1]/(κ + iΔ_k).
    '''
    if not kappa > 0:
        raise PhysicsError(f"kappa must be positive (got {kappa}).")
    t = np.asarray(t, dtype = float)
    rate = kappa + 1j * bath.delta
    g = np.exp(-kappa * t)
    f = 1j * bath.gamma * (np.exp(-np.multiply.outer(t, rate)) - 1) / rate
    return g, f

def _tim_point(kappa):
    def evaluate(t):
        g = np.exp(-kappa * t)
        s = -np.expm1(-2 * kappa * t)
        f = np.array([-1j * np.sqrt(s)])
        fdot = np.array([-1j * kappa * np.exp(-2 * kappa * t) / np.sqrt(s) if s > 0 else complex(np.nan, np.nan)])
        return AuxPoint(t, complex(g), f, complex(-kappa * g), fdot)
    return evaluate

def tim_trajectory(kappa: float, t_max: float, grid: Optional[Sequence[float]] = None,
                   n_points: int = 300) -> AuxTrajectory:
    '''
    Exact dilation of the time-independent Markovian channel by a single
    collective bath mode with f(t) = −i sqrt(1 − e^{−2κt}).

    df/dt is singular at t = 0 and stored as NaN there.
    '''
    if not kappa > 0:
        raise PhysicsError(f"kappa must be positive (got {kappa}).")
    grid = make_grid(t_max, n_points) if grid is None else np.asarray(grid, dtype = float)
    evaluate = _tim_point(kappa)
    points = [evaluate(float(t)) for t in grid]
    return AuxTrajectory(grid,
                         np.array([p.g for p in points]),
                         np.array([p.f for p in points]),
                         np.array([p.gdot for p in points]),
                         np.array([p.fdot for p in points]),
                         evaluate, kappa_ref = kappa)

def gamma_rate(traj: AuxTrajectory, t: float) -> float:
    '''
    Γ(t) = −Re(ġ/g).

    Raises
    ------
    VanishingG
        If |g(t)| ≤ ε_g
    '''
    p = traj.at(t)
    if abs(p.g) <= traj.eps_g:
        raise VanishingG(t)
    return -float(np.real(p.gdot / p.g))

##################
##  COVARIANCE  ##
##################

def amplitude_vectors(h):
    '''
    u = (h₀, 0, h₁, 0, ...) and w = (0, h₀*, 0, h₁*, ...) for amplitudes h.
    '''
    h = np.asarray(h, dtype = complex)
    u = np.zeros(2 * len(h), dtype = complex)
    w = np.zeros(2 * len(h), dtype = complex)
    u[0::2] = h
    w[1::2] = h.conj()
    return u, w

def passive_covariance(init: SystemInit, h) -> np.ndarray:
    '''
    ½I + U C U† with U = [u w] and C = [[N, M], [M*, N]]: the covariance of
    modes whose annihilators carry amplitude h of the initial system mode.
    '''
    u, w = amplitude_vectors(h)
    U = np.column_stack([u, w])
    C = np.array([[init.N, init.M], [np.conj(init.M), init.N]])
    return 0.5 * np.eye(len(u)) + U @ C @ U.conj().T

def _as_point(traj, t):
    return traj if isinstance(traj, AuxPoint) else traj.at(t)

def assemble_covariance(init: SystemInit, traj, t: float = None, check: bool = True) -> GaussianState:
    '''
    Joint system+bath state at time t, modes ordered (a, b₁, ..., b_K).

    Blocks: Θ_S = [[N|g|²+½, Mg²], ...], Θ_{S,k} = [[Ngf_k*, Mgf_k], ...],
    Θ_{k,q} = [[Nf_kf_q* + δ_kq/2, Mf_kf_q], ...]; means μg and μf_k.
    '''
    p = _as_point(traj, t)
    h = np.concatenate([[p.g], p.f])
    mean = np.column_stack([init.mu * h, np.conj(init.mu * h)]).ravel()
    return GaussianState(mean, passive_covariance(init, h), check = check)

def system_state(init: SystemInit, traj, t: float = None) -> GaussianState:
    p = _as_point(traj, t)
    cov = passive_covariance(init, [p.g])
    return GaussianState([init.mu * p.g, np.conj(init.mu * p.g)], cov, check = False)

def environment_state(init: SystemInit, traj, t: float = None) -> GaussianState:
    p = _as_point(traj, t)
    h = np.asarray(p.f, dtype = complex)
    mean = np.column_stack([init.mu * h, np.conj(init.mu * h)]).ravel()
    return GaussianState(mean, passive_covariance(init, h), check = False)

def drift_matrix(bath: BathSpec, t: float) -> np.ndarray:
    '''
    W(t) with zero diagonal blocks, W_{S,k} = η_k = −iγ_k diag(e^{iΔ_k t}, −e^{−iΔ_k t})
    and W_{k,S} = −η_k†.
    '''
    K = bath.K
    W = np.zeros((2 + 2*K, 2 + 2*K), dtype = complex)
    phase = np.exp(1j * bath.delta * t)
    eta_a = -1j * bath.gamma * phase
    eta_ad = 1j * bath.gamma * phase.conj()
    cols = 2 + 2 * np.arange(K)
    W[0, cols] = eta_a
    W[1, cols + 1] = eta_ad
    W[cols, 0] = -eta_a.conj()
    W[cols + 1, 1] = -eta_ad.conj()
    return W

def lyapunov_propagate(bath: BathSpec, init: SystemInit, grid: Sequence[float],
                       rtol: float = 1e-10, atol: float = 1e-13) -> np.ndarray:
    '''
    Integrate dΘ/dt = WΘ + ΘW† from the product initial state.

    Returns
    -------
    np.ndarray
        covariances on grid, shape (len(grid), 2+2K, 2+2K)
    '''
    grid = np.asarray(grid, dtype = float)
    n = 2 + 2 * bath.K
    theta0 = passive_covariance(init, np.eye(bath.K + 1)[0])
    def rhs(t, y):
        theta = y.reshape(n, n)
        W = drift_matrix(bath, t)
        return (W @ theta + theta @ W.conj().T).ravel()
    sol = solve_ivp(rhs, (0., float(grid[-1])), theta0.ravel(), method = "DOP853",
                    t_eval = grid, rtol = rtol, atol = atol)
    if not sol.success:
        raise ToleranceFailure(sol.message)
    logger.debug(f"lyapunov_propagate: K={bath.K}, nfev={sol.nfev}")
    return sol.y.T.reshape(len(grid), n, n)
