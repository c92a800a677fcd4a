"""
Gaussian Wigner functions in the (a, a†)-paired complex representation.

A state over n modes is the mean vector (⟨a₁⟩, ⟨a₁†⟩, ⟨a₂⟩, ...) and the
2n×2n covariance Θ_ij = ½⟨{δR_i, δR_j†}⟩. Every phase-space integral used by
the package reduces to first and second moments of such a state.
"""

import numpy as np

from dataclasses import dataclass, field
from typing import Sequence, Tuple

from scipy.linalg import cho_factor, cho_solve, LinAlgError

from wigdil import (
    UnphysicalInit,
    NonPositiveDeterminant,
    DimensionMismatch,
    SingularReference,
    BadPartition,
    BadIndex,
    PhysicsError
)
from wigdil.constants import HERMITIAN_RTOL, SYMPLECTIC_TOL, INIT_TOL

#############
##  TYPES  ##
#############

def _freeze(arr):
    arr = np.array(arr, dtype = complex)
    arr.setflags(write = False)
    return arr

def pair_swap(n_modes: int):
    '''
    Index permutation exchanging every (2i, 2i+1) pair.
    '''
    return np.arange(2 * n_modes).reshape(-1, 2)[:, ::-1].ravel()

def commutator_signature(n_modes: int):
    '''
    Diagonal of Z = diag(1, -1, 1, -1, ...), i.e. [δR_i, δR_j†] = Z_ij.
    '''
    return np.tile([1., -1.], n_modes)

def coordinates(modes: Sequence[int]):
    '''
    Phase-space coordinate indices (2m, 2m+1) for each mode m, in order.
    '''
    return np.array([[2*m, 2*m + 1] for m in modes], dtype = int).ravel()

@dataclass(frozen = True, eq = False)
class GaussianState:
    """
    Immutable Gaussian state.

    Arguments:
        mean (array-like): complex vector of length 2n, ordered (⟨a₁⟩, ⟨a₁†⟩, ...)
        cov (array-like): complex 2n×2n covariance matrix
        check (bool): verify Hermiticity, conjugation pairing and physicality (default=True)

    Raises
    ------
    PhysicsError
        If the covariance is not Hermitian or violates pairing
    NonPositiveDeterminant
        If any symplectic eigenvalue lies below ½ (beyond tolerance)
    """
    mean: np.ndarray
    cov: np.ndarray
    check: bool = field(default = True, repr = False, compare = False)

    def __post_init__(self):
        object.__setattr__(self, "mean", _freeze(self.mean))
        object.__setattr__(self, "cov", _freeze(self.cov))
        if self.cov.ndim != 2 or self.cov.shape[0] != self.cov.shape[1] or self.cov.shape[0] % 2:
            raise DimensionMismatch(self.cov.shape, self.mean.shape)
        if self.mean.shape != (self.cov.shape[0],):
            raise DimensionMismatch(self.cov.shape[0], self.mean.shape[0])
        if self.check:
            self.validate()

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def validate(self):
        scale = max(1., np.max(np.abs(self.cov)))
        if np.max(np.abs(self.cov - self.cov.conj().T)) > HERMITIAN_RTOL * scale:
            raise PhysicsError("Covariance is not Hermitian.")
        p = pair_swap(self.n_modes)
        if np.max(np.abs(self.cov[np.ix_(p, p)] - self.cov.conj())) > HERMITIAN_RTOL * scale:
            raise PhysicsError("Covariance violates (a, a†) conjugation pairing.")
        if np.max(np.abs(self.mean[p] - self.mean.conj()), initial = 0) > HERMITIAN_RTOL * max(1., np.max(np.abs(self.mean), initial = 0)):
            raise PhysicsError("Mean vector violates (a, a†) conjugation pairing.")
        check_physical(self)
        return

    def displaced(self, alpha) -> "GaussianState":
        '''
        Copy with every mode's amplitude shifted by alpha (scalar or per-mode).
        '''
        alpha = np.broadcast_to(np.asarray(alpha, dtype = complex), (self.n_modes,))
        shift = np.column_stack([alpha, alpha.conj()]).ravel()
        return GaussianState(self.mean + shift, self.cov, check = False)

@dataclass(frozen = True)
class SystemInit:
    """
    Initial single-mode system state: μ = ⟨a⟩₀, N = ⟨δa†δa⟩₀, M = ⟨δaδa⟩₀.
    """
    mu: complex = 0j
    N: float = 0.
    M: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "mu", complex(self.mu))
        object.__setattr__(self, "N", float(self.N))
        object.__setattr__(self, "M", complex(self.M))
        if not np.isfinite(self.mu):
            raise PhysicsError(f"Initial mean must be finite (mu = {self.mu}).")
        if not (np.isfinite(self.N * (self.N + 1)) and np.isfinite(self.M)):
            raise UnphysicalInit(self.N, self.M)
        if self.N < 0 or abs(self.M) > np.sqrt(self.N * (self.N + 1) + INIT_TOL):
            raise UnphysicalInit(self.N, self.M)

    @classmethod
    def from_squeezed_thermal(cls, mu = 0j, nbar = 0., r = 0., theta = 0.):
        '''
        Displaced squeezed thermal state: N+½ = (n̄+½)cosh 2r, M = (n̄+½)e^{iθ}sinh 2r.
        '''
        if nbar < 0:
            raise UnphysicalInit(nbar, 0)
        with np.errstate(over = "ignore", invalid = "ignore"):
            N = (nbar + 0.5) * np.cosh(2*r) - 0.5
            M = (nbar + 0.5) * np.exp(1j*theta) * np.sinh(2*r)
        return cls(mu = mu, N = N, M = M)

    @property
    def det0(self) -> float:
        '''Determinant of the initial covariance, (N+½)² − |M|².'''
        return (self.N + 0.5)**2 - abs(self.M)**2
    @property
    def nbar(self) -> float:
        return np.sqrt(max(self.det0, 0.25)) - 0.5
    @property
    def r(self) -> float:
        return 0.5 * np.arctanh(abs(self.M) / (self.N + 0.5))
    @property
    def theta(self) -> float:
        return float(np.angle(self.M))
    @property
    def occupation(self) -> float:
        '''⟨a†a⟩₀ = N + |μ|².'''
        return self.N + abs(self.mu)**2

@dataclass(frozen = True, eq = False)
class LinearCurrent:
    """
    Phase-space current in canonical form J(ξ) = [d + L·(ξ − mean)] W(ξ).

    L is indexed by the coordinates of ``state``, so that L·δξ = Σ_i L_i δξ_i.
    """
    d: complex
    L: np.ndarray
    state: GaussianState

    def __post_init__(self):
        object.__setattr__(self, "d", complex(self.d))
        object.__setattr__(self, "L", _freeze(self.L))
        if self.L.shape != self.state.mean.shape:
            raise DimensionMismatch(self.L.shape[0], self.state.mean.shape[0])

    def velocity(self, xi) -> complex:
        '''Phase-space velocity J/W at ξ.'''
        return self.d + self.L @ (np.asarray(xi, dtype = complex) - self.state.mean)

    def scaled(self, factor: complex) -> "LinearCurrent":
        return LinearCurrent(factor * self.d, factor * self.L, self.state)

##################
##  VALIDATION  ##
##################

def symplectic_eigenvalues(s: GaussianState) -> np.ndarray:
    '''
    Symplectic spectrum: moduli of the eigenvalues of Z·Θ, one per mode, ascending.
    '''
    z = commutator_signature(s.n_modes)
    nu = np.sort(np.abs(np.linalg.eigvals(z[:, None] * s.cov)))
    return nu[::2]

def check_physical(s: GaussianState):
    '''
    Raise NonPositiveDeterminant unless Θ + ½Z is positive semidefinite,
    i.e. every symplectic eigenvalue is at least ½ (within tolerance).
    '''
    z = commutator_signature(s.n_modes)
    gram = s.cov + np.diag(0.5 * z) + SYMPLECTIC_TOL * np.eye(2 * s.n_modes)
    try:
        cho_factor(gram, lower = True)
    except LinAlgError:
        raise NonPositiveDeterminant("uncertainty-relation matrix Θ + Z/2")
    return

def is_pure(s: GaussianState, tol: float = SYMPLECTIC_TOL) -> bool:
    return bool(np.all(np.abs(symplectic_eigenvalues(s) - 0.5) <= tol))

####################
##  CONSTRUCTORS  ##
####################

def vacuum_state(n_modes: int) -> GaussianState:
    if n_modes < 1:
        raise BadIndex([n_modes], n_modes)
    return GaussianState(np.zeros(2 * n_modes), 0.5 * np.eye(2 * n_modes), check = False)

def state_from_init(init: SystemInit) -> GaussianState:
    cov = np.array([[init.N + 0.5, init.M],
                    [np.conj(init.M), init.N + 0.5]])
    return GaussianState([init.mu, np.conj(init.mu)], cov)

def two_mode_squeezed_state(z: float) -> GaussianState:
    '''
    Two-mode squeezed vacuum ordered (c, c†, a, a†), with thermal marginals N = sinh²z.
    '''
    n = np.sinh(z)**2
    v = np.sinh(z) * np.cosh(z)
    cov = (n + 0.5) * np.eye(4, dtype = complex)
    cov[0, 3] = cov[1, 2] = cov[2, 1] = cov[3, 0] = v
    return GaussianState(np.zeros(4), cov)

def marginal(s: GaussianState, modes: Sequence[int]) -> GaussianState:
    modes = list(modes)
    if (not modes or len(set(modes)) != len(modes)
        or any((not isinstance(m, (int, np.integer))) or m < 0 or m >= s.n_modes for m in modes)):
        raise BadIndex(modes, s.n_modes)
    idx = coordinates(modes)
    return GaussianState(s.mean[idx], s.cov[np.ix_(idx, idx)], check = False)

###################
##  FUNCTIONALS  ##
###################

def logdet(cov, error = NonPositiveDeterminant) -> float:
    '''
    log det of a Hermitian positive-definite matrix through its Cholesky factor.
    '''
    try:
        c, _ = cho_factor(cov, lower = True)
    except LinAlgError:
        raise error()
    return 2. * float(np.sum(np.log(np.real(np.diag(c)))))

def wigner_entropy(s: GaussianState) -> float:
    return s.n_modes * (1. + np.log(np.pi)) + 0.5 * logdet(s.cov)

def relative_entropy(s1: GaussianState, s2: GaussianState) -> float:
    '''
    Wigner relative entropy S(W₁‖W₂) between two Gaussian states.
    '''
    if s1.n_modes != s2.n_modes:
        raise DimensionMismatch(s1.n_modes, s2.n_modes)
    try:
        factor = cho_factor(s2.cov, lower = True)
    except LinAlgError:
        raise SingularReference()
    logdet2 = 2. * float(np.sum(np.log(np.real(np.diag(factor[0])))))
    logdet1 = logdet(s1.cov)
    dmu = s1.mean - s2.mean
    trace_term = np.real(np.trace(cho_solve(factor, s1.cov)))
    mean_term = np.real(dmu.conj() @ cho_solve(factor, dmu))
    return 0.5 * (logdet2 - logdet1) + 0.5 * trace_term - s1.n_modes + 0.5 * mean_term

def mutual_information(joint: GaussianState, split: Tuple[Sequence[int], Sequence[int]]) -> float:
    '''
    Wigner mutual information ½ ln(|Θ_A||Θ_B|/|Θ_AB|) across the mode partition ``split``.
    '''
    try:
        side_a, side_b = (list(x) for x in split)
    except (TypeError, ValueError):
        raise BadPartition(split, joint.n_modes)
    if (not side_a or not side_b or set(side_a) & set(side_b)
        or sorted(side_a + side_b) != list(range(joint.n_modes))):
        raise BadPartition(split, joint.n_modes)
    cov_a = marginal(joint, side_a).cov
    cov_b = marginal(joint, side_b).cov
    return 0.5 * (logdet(cov_a) + logdet(cov_b) - logdet(joint.cov))

def moment_form(c: LinearCurrent) -> float:
    '''
    ∫|J|²/W = |d|² + L Θ L†, from ∫ δξ δξ† W = Θ.
    '''
    return abs(c.d)**2 + float(np.real(c.L @ c.state.cov @ c.L.conj()))

################
##  CURRENTS  ##
################

def derivative_to_linear(s: GaussianState, D) -> np.ndarray:
    '''
    Convert Σ_j D_j ∂W/∂ξ_j* into L·δξ W using ∂W/∂ξ* = −Θ⁻¹δξ W, i.e. L = −D Θ⁻¹.
    '''
    D = np.asarray(D, dtype = complex)
    try:
        factor = cho_factor(s.cov.T, lower = True)
    except LinAlgError:
        raise NonPositiveDeterminant()
    return -cho_solve(factor, D)

def linear_to_derivative(s: GaussianState, L) -> np.ndarray:
    '''
    Inverse of derivative_to_linear: D = −L Θ.
    '''
    return -np.asarray(L, dtype = complex) @ s.cov

def current_velocity(c: LinearCurrent, xi) -> complex:
    return c.velocity(xi)

def embed_current(c: LinearCurrent, joint: GaussianState, modes: Sequence[int]) -> LinearCurrent:
    '''
    Lift a current defined on the marginal over ``modes`` to the coordinates of ``joint``.
    '''
    idx = coordinates(modes)
    if len(idx) != c.L.shape[0]:
        raise DimensionMismatch(len(idx) // 2, c.state.n_modes)
    L = np.zeros(2 * joint.n_modes, dtype = complex)
    L[idx] = c.L
    return LinearCurrent(c.d, L, joint)
