"""
Power-law fits on log-log scale.

A fit of values y_i against scales x_i models y ≤ c·x^N. The least-squares
line gives the slope N̂; the intercept is then raised until no point lies
above the line, which gives the envelope constant.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

DEGENERATE_NOTE = 'identically bounded, slope undefined'


@dataclass(frozen=True)
class PowerLawFit:
    slope: Optional[float]
    log_constant: float
    intercept: float
    r_squared: float
    envelope_valid: bool
    points: int
    degenerate: bool = False
    note: str = ''

    @property
    def constant(self):
        return math.exp(self.log_constant)

    def envelope(self, scale):
        """c·scale^N for the fitted slope, zero for a degenerate fit."""
        scale = np.asarray(scale, dtype=float)
        if self.degenerate:
            return np.zeros_like(scale)
        return np.exp(self.log_constant + self.slope * np.log(scale))


def degenerate_fit(points, note=DEGENERATE_NOTE):
    return PowerLawFit(slope=None, log_constant=-math.inf, intercept=-math.inf, r_squared=1.0,
                       envelope_valid=True, points=points, degenerate=True, note=note)


def fit_power_law(scale, values, zero_tol=0.0):
    """
    Fit log(values) = log(c) + N·log(scale) by least squares and raise the
    intercept to an upper envelope.

    :param scale: positive abscissae, typically 1/eps or 1/omega
    :param values: nonnegative magnitudes, same length
    :param zero_tol: values at or below this count as zero
    :return: PowerLawFit; degenerate when every value is zero
    """
    scale = np.asarray(scale, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    if scale.shape != values.shape or scale.size < 2:
        raise ValueError('need at least two (scale, value) pairs of equal length')
    if not np.all(np.isfinite(values)):
        return PowerLawFit(slope=math.inf, log_constant=math.inf, intercept=math.inf, r_squared=0.0,
                           envelope_valid=False, points=values.size, note='non-finite values')
    keep = values > zero_tol
    if not np.any(keep):
        return degenerate_fit(values.size)
    x = np.log(scale[keep])
    y = np.log(values[keep])
    if x.size < 2 or np.ptp(x) == 0.0:
        return PowerLawFit(slope=0.0, log_constant=float(y.max()), intercept=float(y.max()), r_squared=1.0,
                           envelope_valid=True, points=int(x.size), note='single scale')
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    log_constant = float(intercept + max(0.0, float(np.max(y - predicted))))
    valid = bool(np.all(y <= slope * x + log_constant + 1e-12 * np.maximum(1.0, np.abs(y))))
    return PowerLawFit(slope=float(slope), log_constant=log_constant, intercept=float(intercept),
                       r_squared=r_squared, envelope_valid=valid, points=int(x.size))


def envelope_log_constant(scale, values, slope):
    """Smallest log(c) with values ≤ c·scale^slope at every point."""
    scale = np.asarray(scale, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    keep = values > 0.0
    if not np.any(keep):
        return -math.inf
    return float(np.max(np.log(values[keep]) - slope * np.log(scale[keep])))


def local_slopes(scale, values):
    """
    Slopes of log(values) against log(scale) between neighbouring points.
    A drop to exact zero counts as an infinitely steep decay.
    """
    scale = np.asarray(scale, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    out = np.empty(max(scale.size - 1, 0))
    for i in range(out.size):
        a, b = values[i], values[i + 1]
        dx = math.log(scale[i + 1]) - math.log(scale[i])
        if b == 0.0:
            out[i] = -math.inf if dx > 0 else math.inf
        elif a == 0.0:
            out[i] = math.inf if dx > 0 else -math.inf
        else:
            out[i] = (math.log(b) - math.log(a)) / dx
    return out
