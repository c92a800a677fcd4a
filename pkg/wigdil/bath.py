"""
Bosonic baths coupled to the system by excitation-conserving terms.
"""

import numpy as np

from dataclasses import dataclass
from typing import Optional, Tuple

from wigdil import EmptyBand, PhysicsError
from wigdil.constants import (
    BAND_HALF_WIDTH,
    DEFAULT_K,
    OHMIC_BAND_CUTOFFS,
    SHAPE_FLAT,
    SHAPE_OHMIC,
    SHAPE_LORENTZIAN,
    SPECTRAL_SHAPES
)

@dataclass(frozen = True)
class BathSpec:
    """
    Discrete bath: system frequency ``omega`` and (Omega_k, gamma_k) pairs.
    """
    omega: float
    modes: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        modes = tuple((float(Omega), float(gamma)) for Omega, gamma in self.modes)
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "modes", modes)
        if not modes:
            raise EmptyBand(None, 0)
        if any(gamma < 0 for _, gamma in modes):
            raise PhysicsError("Couplings gamma_k must be non-negative.")
        if not np.all(np.isfinite(self.delta)) or not np.all(np.isfinite(self.gamma)):
            raise PhysicsError("Bath frequencies and couplings must be finite.")

    @property
    def K(self) -> int:
        return len(self.modes)
    @property
    def Omega(self) -> np.ndarray:
        return np.array([Omega for Omega, _ in self.modes])
    @property
    def gamma(self) -> np.ndarray:
        return np.array([gamma for _, gamma in self.modes])
    @property
    def delta(self) -> np.ndarray:
        '''Detunings Δ_k = ω − Ω_k.'''
        return self.omega - self.Omega
    @property
    def total_coupling(self) -> float:
        '''Σ γ_k², i.e. the memory kernel at zero delay.'''
        return float(np.sum(self.gamma**2))

@dataclass(frozen = True)
class SpectralPreset:
    """
    Continuous spectral density J(Ω) to be discretised on a uniform grid.

    flat:        J = 2κ
    lorentzian:  J = A w² / ((Ω − c)² + w²), with A = 2κ, c = ω, w = κ unless given
    ohmic:       J = A Ω exp(−Ω/Ω_c)

    The band defaults to [ω − 20κ, ω + 20κ] (flat, lorentzian) or [0, 10Ω_c] (ohmic).
    """
    shape: str
    omega: float = 0.
    kappa: Optional[float] = None
    amplitude: Optional[float] = None
    center: Optional[float] = None
    width: Optional[float] = None
    cutoff: Optional[float] = None
    band: Optional[Tuple[float, float]] = None
    K: int = DEFAULT_K

    def __post_init__(self):
        if self.shape not in SPECTRAL_SHAPES:
            raise PhysicsError(f"Unknown spectral shape '{self.shape}'. Valid shapes: {', '.join(SPECTRAL_SHAPES)}.")
        if self.shape in {SHAPE_FLAT, SHAPE_LORENTZIAN} and self.kappa is None and (
                self.shape == SHAPE_FLAT or self.amplitude is None or self.width is None):
            raise PhysicsError(f"Spectral shape '{self.shape}' requires kappa.")
        if self.shape == SHAPE_OHMIC and (self.amplitude is None or self.cutoff is None):
            raise PhysicsError("Spectral shape 'ohmic' requires amplitude and cutoff.")
        lo, hi = self.resolved_band
        if self.shape in {SHAPE_FLAT, SHAPE_LORENTZIAN} and not (lo <= self.omega <= hi):
            raise PhysicsError(f"Band [{lo}, {hi}] does not contain omega = {self.omega}.")
        if self.shape == SHAPE_OHMIC and lo < 0:
            raise PhysicsError(f"Ohmic density is negative on band [{lo}, {hi}].")

    @property
    def resolved_band(self) -> Tuple[float, float]:
        if self.band is not None:
            return tuple(float(x) for x in self.band)
        if self.shape == SHAPE_OHMIC:
            return (0., OHMIC_BAND_CUTOFFS * self.cutoff)
        half = BAND_HALF_WIDTH * (self.kappa if self.kappa is not None else self.width)
        return (self.omega - half, self.omega + half)

    def density(self, Omega) -> np.ndarray:
        Omega = np.asarray(Omega, dtype = float)
        if self.shape == SHAPE_FLAT:
            return np.full_like(Omega, 2 * self.kappa)
        if self.shape == SHAPE_LORENTZIAN:
            amplitude = 2 * self.kappa if self.amplitude is None else self.amplitude
            center = self.omega if self.center is None else self.center
            width = self.kappa if self.width is None else self.width
            return amplitude * width**2 / ((Omega - center)**2 + width**2)
        return self.amplitude * Omega * np.exp(-Omega / self.cutoff)

def discretize(preset: SpectralPreset) -> BathSpec:
    '''
    Midpoint discretisation: Ω_k = Ω_min + (k+½)ΔΩ and γ_k = sqrt(J(Ω_k)ΔΩ/2π),
    so that Σγ_k² reproduces the midpoint rule for ∫J dΩ/2π.

    Raises
    ------
    EmptyBand
        If K < 1 or the band has no width
    '''
    lo, hi = preset.resolved_band
    if preset.K < 1 or not hi > lo:
        raise EmptyBand((lo, hi), preset.K)
    step = (hi - lo) / preset.K
    Omega = lo + (np.arange(preset.K) + 0.5) * step
    J = preset.density(Omega)
    if np.any(J < 0):
        raise PhysicsError("Spectral density is negative on the band.")
    gamma = np.sqrt(J * step / (2 * np.pi))
    return BathSpec(preset.omega, tuple(zip(Omega, gamma)))

def memory_kernel(bath: BathSpec, tau):
    '''
    𝒦(τ) = Σ_k γ_k² exp(iΔ_k τ). Accepts scalar or array τ.
    '''
    tau = np.asarray(tau, dtype = float)
    out = np.exp(1j * np.multiply.outer(tau, bath.delta)) @ bath.gamma**2
    return complex(out) if out.ndim == 0 else out
