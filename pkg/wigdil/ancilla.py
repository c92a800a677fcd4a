"""
Ancilla mode c, initially two-mode squeezed with the system, that never
interacts with S or E. Its correlation with S tracks the channel.
"""

import numpy as np

from dataclasses import dataclass
from typing import List, NamedTuple, Optional

from wigdil import PhysicsError
from wigdil.gaussian import GaussianState, SystemInit, mutual_information
from wigdil.dilation import AuxPoint, AuxTrajectory
from wigdil.production import (
    production_rate,
    env_production_rate,
    mutual_info_rate_determinant
)

@dataclass(frozen = True)
class AncillaConfig:
    """
    Squeezing z of the ancilla-system pair; the system marginal is thermal with N = sinh²z.
    """
    z: float

    def __post_init__(self):
        object.__setattr__(self, "z", float(self.z))
        if not np.isfinite(self.z):
            raise PhysicsError(f"Ancilla squeezing must be finite (got {self.z}).")

    @classmethod
    def from_occupation(cls, N: float) -> "AncillaConfig":
        return cls(np.arcsinh(np.sqrt(N)))

    @property
    def N(self) -> float:
        return np.sinh(self.z)**2
    @property
    def V(self) -> float:
        '''Off-diagonal magnitude sqrt(N(N+1)) = sinh z cosh z.'''
        return np.sinh(self.z) * np.cosh(self.z)
    @property
    def system_init(self) -> SystemInit:
        return SystemInit(N = self.N)

def ancilla_state(cfg: AncillaConfig, g: complex) -> GaussianState:
    '''
    Θ_AS(t) ordered (c, c†, a, a†): ancilla block (N+½)I, system block
    (N|g|²+½)I, and off-diagonals V g on (c, a†), (a, c†) with their conjugates.
    '''
    x = abs(g)**2
    cov = np.diag([cfg.N + 0.5, cfg.N + 0.5, cfg.N * x + 0.5, cfg.N * x + 0.5]).astype(complex)
    cov[0, 3] = cov[2, 1] = cfg.V * g
    cov[1, 2] = cov[3, 0] = cfg.V * np.conj(g)
    return GaussianState(np.zeros(4), cov)

def ancilla_information(cfg: AncillaConfig, g: complex) -> float:
    '''I_AS = ln[2(N+½)(N|g|²+½) / (N(1−|g|²)+½)].'''
    N, x = cfg.N, abs(g)**2
    return float(np.log(2 * (N + 0.5) * (N * x + 0.5) / (N * (1 - x) + 0.5)))

def ancilla_information_covariance(cfg: AncillaConfig, g: complex) -> float:
    return mutual_information(ancilla_state(cfg, g), ([0], [1]))

def ancilla_rate(cfg: AncillaConfig, p: AuxPoint) -> float:
    '''
    dI_AS/dt = −2Γ|g|² N(N+1) / ((N|g|²+½)(N(1−|g|²)+½)), from d|g|²/dt = −2Γ|g|².
    '''
    N, x = cfg.N, p.abs_g2
    return -2 * p.loss * N * (N + 1) / ((N * x + 0.5) * (N * (1 - x) + 0.5))

def ancilla_rate_printed(cfg: AncillaConfig, p: AuxPoint) -> float:
    '''Half of ancilla_rate; reported for comparison only.'''
    return 0.5 * ancilla_rate(cfg, p)

class AncillaPoint(NamedTuple):
    t: float
    I_AS: float
    dI_AS_dt: float

def ancilla_trajectory(cfg: AncillaConfig, traj: AuxTrajectory) -> List[AncillaPoint]:
    return [AncillaPoint(float(traj.grid[i]), ancilla_information(cfg, traj.g[i]),
                         ancilla_rate(cfg, traj.point(i)))
            for i in range(len(traj.grid))]

class RelationTerm(NamedTuple):
    name: str
    prefactor: float
    rhs: float
    ratio: Optional[float] ## LHS / (prefactor * rhs); None when undefined

@dataclass(frozen = True)
class RelationReport:
    t: float
    lhs: float
    terms: List[RelationTerm]
    prefactor_signs_ok: bool

    @property
    def undefined(self) -> List[str]:
        return [term.name for term in self.terms if term.ratio is None]

def relation_prefactors(N: float, x: float):
    '''
    Printed prefactors of the three relations linking dI_AS/dt to Π, the
    environment rate and dI_SE/dt.
    '''
    c = N / (N + 1)
    return (-2 * c * x * (N * (1 - x) + 0.5),
            -2 * c * (1 - x) * (N * x + 0.5),
            c * (1 - 2 * x))

def ancilla_relation_report(cfg: AncillaConfig, traj: AuxTrajectory, t: float,
                            zero: float = 1e-14) -> RelationReport:
    '''
    LHS dI_AS/dt against each printed relation, as ratios. No pass/fail is
    implied beyond the prefactor sign claims: the first two are non-positive
    and the third carries the sign of 1 − 2|g|².
    '''
    p = traj.at(t)
    init = cfg.system_init
    lhs = ancilla_rate(cfg, p)
    rhs = (production_rate(init, p), env_production_rate(init, p), mutual_info_rate_determinant(init, p))
    pre = relation_prefactors(cfg.N, p.abs_g2)
    terms = []
    for name, a, b in zip(("Pi", "env_rate", "dI_SE_dt"), pre, rhs):
        denom = a * b
        terms.append(RelationTerm(name, a, b, None if abs(denom) <= zero else lhs / denom))
    signs_ok = (pre[0] <= 0 and pre[1] <= 0
                and np.sign(pre[2]) == np.sign(cfg.N * (1 - 2 * p.abs_g2)))
    return RelationReport(p.t, lhs, terms, bool(signs_ok))
