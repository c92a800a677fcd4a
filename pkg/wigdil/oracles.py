"""
Finite-difference derivatives used to cross-check analytic rates.
"""

import numpy as np

from typing import Callable

from wigdil.constants import FD_STEP

_CENTRAL = (np.array([-2, -1, 1, 2]), np.array([1, -8, 8, -1]) / 12.)
_FORWARD = (np.arange(5), np.array([-25, 48, -36, 16, -3]) / 12.)

def _stencil(func, t, h, offsets, weights):
    return sum(w * func(t + k * h) for k, w in zip(offsets, weights)) / h

def time_derivative(func: Callable[[float], float], t: float, unit: float = 1.,
                    lo: float = 0., hi: float = np.inf, step: float = FD_STEP) -> float:
    '''
    Five-point derivative of func at t with step ``step * unit`` and one
    Richardson extrapolation, (16 D(h) − D(2h)) / 15.

    The central stencil is used when [t − 4h, t + 4h] fits in [lo, hi];
    otherwise a one-sided five-point stencil pointing into the interval.
    '''
    h = step * unit
    if t - 4*h >= lo and t + 4*h <= hi:
        offsets, weights = _CENTRAL
        sign = 1
    elif t + 8*h <= hi:
        offsets, weights = _FORWARD
        sign = 1
    else:
        offsets, weights = _FORWARD
        sign = -1
    d = lambda hh: _stencil(func, t, sign * hh, offsets, weights)
    return (16 * d(h) - d(2*h)) / 15.
