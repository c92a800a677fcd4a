"""
Non-Markovianity witnesses: Γ negativity, relative-entropy monotonicity
reversals, entropy-flux backflow and ancilla-correlation revivals.

I_SE is deliberately not a witness.
"""

import numpy as np

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from scipy.integrate import trapezoid

from wigdil import InsufficientData
from wigdil.constants import EVENT_THRESHOLD
from wigdil.dilation import AuxTrajectory
from wigdil.production import EntropicRecord

Interval = Tuple[float, float]
Event = Tuple[float, float] ## (t, magnitude)

def mask_intervals(grid: Sequence[float], mask: Sequence[bool]) -> List[Interval]:
    '''
    (t_start, t_end) of every contiguous run of True in mask.
    '''
    grid = np.asarray(grid)
    mask = np.asarray(mask, dtype = bool)
    if not mask.any():
        return []
    edges = np.diff(np.concatenate([[0], mask.astype(int), [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return [(float(grid[a]), float(grid[b])) for a, b in zip(starts, ends)]

def _segment_intervals(grid, rising) -> List[Interval]:
    ## rising[i] flags the segment [grid[i], grid[i+1]]
    intervals = []
    for i in np.flatnonzero(rising):
        a, b = float(grid[i]), float(grid[i + 1])
        if intervals and intervals[-1][1] == a:
            intervals[-1] = (intervals[-1][0], b)
        else:
            intervals.append((a, b))
    return intervals

def gamma_witness(traj: AuxTrajectory) -> Tuple[List[Interval], float]:
    '''
    Intervals where Γ < −ε_Γ, and ∫max(0, −Γ)dt by trapezoid (NaN points skipped).
    '''
    Gamma = traj.Gamma
    finite = np.isfinite(Gamma)
    mask = finite & (Gamma < -traj.eps_gamma)
    negative = np.maximum(0., -np.where(finite, Gamma, 0.))
    return mask_intervals(traj.grid, mask), float(trapezoid(negative, traj.grid))

def _require(records: Sequence[EntropicRecord], n: int = 3):
    if len(records) < n:
        raise InsufficientData(len(records), n)

def monotonicity_witness(records: Sequence[EntropicRecord],
                         threshold: float = EVENT_THRESHOLD) -> Tuple[List[Event], List[Event]]:
    '''
    Steps where S(W_S‖vacuum) increases, and steps where S(W_E‖W_E(0)) decreases,
    by more than threshold between consecutive records.
    '''
    _require(records)
    t = np.array([r.t for r in records])
    d_s = np.diff([r.srel_S_vac for r in records])
    d_e = np.diff([r.srel_E_init for r in records])
    s_events = [(float(t[i + 1]), float(d_s[i])) for i in np.flatnonzero(d_s > threshold)]
    e_events = [(float(t[i + 1]), float(-d_e[i])) for i in np.flatnonzero(d_e < -threshold)]
    return s_events, e_events

def flux_backflow_witness(records: Sequence[EntropicRecord],
                          threshold: float = EVENT_THRESHOLD) -> List[Interval]:
    '''Intervals where Φ > threshold, i.e. entropy flows from E back to S.'''
    _require(records)
    return mask_intervals([r.t for r in records], [r.flux > threshold for r in records])

def ancilla_witness(records: Sequence[EntropicRecord],
                    threshold: float = EVENT_THRESHOLD) -> List[Interval]:
    '''Intervals over which I_AS grows by more than threshold per step.'''
    _require(records)
    if any(r.I_AS is None for r in records):
        return []
    grid = [r.t for r in records]
    return _segment_intervals(grid, np.diff([r.I_AS for r in records]) > threshold)

@dataclass(frozen = True)
class WitnessReport:
    gamma_negative_intervals: List[Interval] = field(default_factory = list)
    gamma_measure: float = 0.
    srel_S_reversals: List[Event] = field(default_factory = list)
    srel_E_reversals: List[Event] = field(default_factory = list)
    flux_backflow_intervals: List[Interval] = field(default_factory = list)
    ancilla_revival_intervals: List[Interval] = field(default_factory = list)

    @property
    def markovian(self) -> bool:
        return not (self.gamma_negative_intervals or self.srel_S_reversals or self.srel_E_reversals
                    or self.flux_backflow_intervals or self.ancilla_revival_intervals)

    def misaligned(self, step: float) -> List[Tuple[str, float]]:
        '''
        Event times lying outside every Γ-negative interval widened by ``step``.
        '''
        step *= 1 + 1e-9 ## grid spacing is only uniform to rounding
        windows = [(a - step, b + step) for a, b in self.gamma_negative_intervals]
        inside = lambda t: any(a <= t <= b for a, b in windows)
        times = ([("srel_S", t) for t, _ in self.srel_S_reversals] +
                 [("srel_E", t) for t, _ in self.srel_E_reversals] +
                 [("flux", t) for interval in self.flux_backflow_intervals for t in interval] +
                 [("ancilla", t) for interval in self.ancilla_revival_intervals for t in interval])
        return [(kind, t) for kind, t in times if not inside(t)]

    def summary(self) -> str:
        fmt = lambda intervals: ', '.join(f"[{a:.6g}, {b:.6g}]" for a, b in intervals) or "none"
        return '\n'.join([f"markovian:\t{self.markovian}",
                          f"gamma negative:\t{fmt(self.gamma_negative_intervals)}",
                          f"gamma measure:\t{self.gamma_measure:.6g}",
                          f"srel_S reversals:\t{len(self.srel_S_reversals)}",
                          f"srel_E reversals:\t{len(self.srel_E_reversals)}",
                          f"flux backflow:\t{fmt(self.flux_backflow_intervals)}",
                          f"ancilla revivals:\t{fmt(self.ancilla_revival_intervals)}"])

def witness_report(traj: AuxTrajectory, records: Sequence[EntropicRecord]) -> WitnessReport:
    intervals, measure = gamma_witness(traj)
    s_events, e_events = monotonicity_witness(records)
    return WitnessReport(intervals, measure, s_events, e_events,
                         flux_backflow_witness(records), ancilla_witness(records))
