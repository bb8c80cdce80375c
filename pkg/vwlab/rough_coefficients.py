"""
Distributional propagation speeds and their regularisation.

A RoughCoefficient is a finite sum of a smooth analytic part, Heaviside
jumps and Dirac atoms (with derivatives up to a declared order L) on [0, T].
Convolution with a scaled Friedrichs mollifier psi_omega(t) = psi(t/omega)/omega
is evaluated in closed form for atoms and jumps and by adaptive composite
Gauss-Legendre quadrature for the smooth part. Outside [0, T] the smooth
part is continued by its boundary values.
"""

import csv
import logging
import math
import threading
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicHermiteSpline

from .errors import ConfigurationError, DomainError, ResolutionError, ValidationError
from .fitting import DEGENERATE_NOTE, fit_power_law

logger = logging.getLogger(__name__)

SMOOTH_FAMILIES = ('constant', 'affine', 'sinusoid', 'power', 'weierstrass')
SHAPES = ('bump', 'cosine2', 'triangle')
SCHEDULES = ('identity', 'power', 'log')

QUAD_TOL = 1e-10
LOWER_BOUND_TOL = 1e-9
GROWTH_SLOPE_TOL = 0.1

_GL_ORDER = 16
_GL_NODES, _GL_WEIGHTS = leggauss(_GL_ORDER)
_CHUNK = 256


# ===== quadrature =====

def _panel_rule(panels):
    edges = np.linspace(0.0, 1.0, panels + 1)
    widths = np.diff(edges)
    u = (edges[:-1, None] + widths[:, None] * (_GL_NODES[None, :] + 1.0) / 2.0).ravel()
    w = (widths[:, None] * _GL_WEIGHTS[None, :] / 2.0).ravel()
    return u, w


def _gauss_rows(func, lo, hi, panels):
    u, w = _panel_rule(panels)
    width = hi - lo
    x = lo[:, None] + width[:, None] * u[None, :]
    return (func(x) * w[None, :]).sum(axis=1) * width


def composite_gauss(func, lo, hi, tol=QUAD_TOL, panels=2, max_panels=None):
    """
    Integrate func over [lo_i, hi_i] for every row i.

    func receives an (n, q) array of abscissae and returns values of the same
    shape, so callers may close over per-row parameters. The panel count is
    doubled until two successive composite rules agree to tol (relative for
    results above one, absolute below).
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    panels = max(1, int(panels))
    max_panels = max_panels or max(1024, 8 * panels)
    prev = _gauss_rows(func, lo, hi, panels)
    while panels < max_panels:
        panels *= 2
        cur = _gauss_rows(func, lo, hi, panels)
        if np.all(np.abs(cur - prev) <= tol * np.maximum(1.0, np.abs(cur))):
            return cur
        prev = cur
    logger.debug('quadrature stopped at %d panels without reaching tol %g', panels, tol)
    return prev


# ===== mollifier shapes =====

class _BumpShape:
    name = 'bump'
    max_order = math.inf

    def __init__(self):
        self._polys = [Polynomial([1.0])]
        self._lock = threading.Lock()

    def _poly(self, k):
        if k < len(self._polys):
            return self._polys[k]
        one_minus = Polynomial([1.0, 0.0, -1.0])
        x = Polynomial([0.0, 1.0])
        # net solves share one mollifier across worker threads
        with self._lock:
            while len(self._polys) <= k:
                j = len(self._polys) - 1
                p = self._polys[j]
                self._polys.append(one_minus ** 2 * p.deriv() + 4 * j * x * one_minus * p - 2 * x * p)
        return self._polys[k]

    def raw(self, x, k=0):
        # psi^(k) = P_k(x) / (1-x^2)^(2k) * exp(-1/(1-x^2)), zero outside (-1, 1)
        shape = np.shape(x)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        inside = np.abs(x) < 1.0
        xi = x[inside]
        one_minus = 1.0 - xi * xi
        out[inside] = self._poly(k)(xi) * np.exp(-1.0 / one_minus - 2.0 * k * np.log(one_minus))
        return out.reshape(shape)

    def raw_cdf(self, c, tol):
        c = np.clip(np.atleast_1d(np.asarray(c, dtype=float)), -1.0, 1.0)
        return composite_gauss(lambda x: self.raw(x), np.full(c.shape, -1.0), c, tol=tol, panels=4)

    def raw_fourier(self, xi, tol):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        panels = max(4, int(math.ceil(float(np.max(np.abs(xi), initial=0.0)) / 2.0)))
        ones = np.ones(xi.shape)
        return composite_gauss(lambda x: self.raw(x) * np.cos(xi[:, None] * x), -ones, ones, tol=tol,
                               panels=panels)


class _Cosine2Shape:
    name = 'cosine2'
    max_order = 1

    def raw(self, x, k=0):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) < 1.0
        if k == 0:
            vals = np.cos(np.pi * x / 2.0) ** 2
        else:
            vals = 0.5 * np.pi ** k * np.cos(np.pi * x + k * np.pi / 2.0)
        return np.where(inside, vals, 0.0)

    def raw_cdf(self, c, tol):
        c = np.clip(np.asarray(c, dtype=float), -1.0, 1.0)
        return (c + 1.0) / 2.0 + np.sin(np.pi * c) / (2.0 * np.pi)

    def raw_fourier(self, xi, tol):
        xi = np.asarray(xi, dtype=float)
        return np.sinc(xi / np.pi) + 0.5 * (np.sinc((xi - np.pi) / np.pi) + np.sinc((xi + np.pi) / np.pi))


class _TriangleShape:
    name = 'triangle'
    max_order = 0

    def raw(self, x, k=0):
        x = np.asarray(x, dtype=float)
        if k == 0:
            return np.clip(1.0 - np.abs(x), 0.0, None)
        return np.where(np.abs(x) < 1.0, -np.sign(x), 0.0)

    def raw_cdf(self, c, tol):
        c = np.clip(np.asarray(c, dtype=float), -1.0, 1.0)
        return np.where(c <= 0.0, (1.0 + c) ** 2 / 2.0, 1.0 - (1.0 - c) ** 2 / 2.0)

    def raw_fourier(self, xi, tol):
        xi = np.asarray(xi, dtype=float)
        return np.sinc(xi / (2.0 * np.pi)) ** 2


_SHAPES = {
    'bump': _BumpShape,
    'cosine2': _Cosine2Shape,
    'triangle': _TriangleShape,
}


class Mollifier:
    """
    Normalised Friedrichs mollifier psi on [-1, 1].

    `value`, `derivative`, `cdf` and `fourier` work on the unit-scale psi;
    scaling by omega is done by the callers.
    """

    def __init__(self, shape, tol):
        self.shape = shape
        self.tol = tol
        self._impl = _SHAPES[shape]()
        self._damping = {}
        self._lock = threading.Lock()
        if shape == 'bump':
            self.norm = 1.0 / float(composite_gauss(lambda x: self._impl.raw(x), [-1.0], [1.0],
                                                    tol=tol * 1e-2, panels=4)[0])
        else:
            self.norm = 1.0
        self.mass = float(composite_gauss(lambda x: self.value(x), [-1.0], [1.0], tol=tol * 1e-2, panels=4)[0])

    def __repr__(self):
        return 'Mollifier({!r}, tol={:g})'.format(self.shape, self.tol)

    @property
    def max_order(self):
        return self._impl.max_order

    def value(self, x):
        return self.norm * self._impl.raw(x, 0)

    def derivative(self, x, k):
        if k > self.max_order:
            raise ConfigurationError('mollifier {} has no derivative of order {} (max {})'
                                     .format(self.shape, k, self.max_order))
        return self.norm * self._impl.raw(x, k)

    def cdf(self, c):
        """Integral of psi over [-1, c]."""
        shape = np.shape(c)
        c = np.atleast_1d(np.asarray(c, dtype=float))
        out = np.where(c >= 1.0, 1.0, 0.0)
        inside = np.abs(c) < 1.0
        if np.any(inside):
            out[inside] = self.norm * self._impl.raw_cdf(c[inside], self.tol)
        return out.reshape(shape)

    def fourier(self, xi):
        """Integral of psi(x)·cos(xi·x); psi is even so this is the full transform."""
        return self.norm * self._impl.raw_fourier(xi, self.tol)

    def damping(self, xi):
        """Cached scalar transform, used for the trigonometric smooth parts."""
        key = float(xi)
        with self._lock:
            cached = self._damping.get(key)
        if cached is None:
            cached = float(np.atleast_1d(self.fourier(np.array([key])))[0])
            with self._lock:
                cached = self._damping.setdefault(key, cached)
        return cached

    def integral_from(self, c, k):
        """Integral of psi^(k) over [c, 1]."""
        if k == 0:
            return 1.0 - self.cdf(c)
        return -self.derivative(c, k - 1)

    def integral_to(self, c, k):
        """Integral of psi^(k) over [-1, c]."""
        if k == 0:
            return self.cdf(c)
        return self.derivative(c, k - 1)


def make_mollifier(shape, tol=QUAD_TOL):
    if tol <= 0:
        raise DomainError('mollifier tolerance must be positive, got {}'.format(tol))
    if shape not in _SHAPES:
        raise ConfigurationError('unknown mollifier shape {!r}, expected one of {}'.format(shape, ', '.join(SHAPES)))
    psi = Mollifier(shape, tol)
    logger.debug('mollifier %s: norm=%.15g mass=%.15g', shape, psi.norm, psi.mass)
    return psi


# ===== scale schedules =====

@dataclass(frozen=True)
class ScaleSchedule:
    kind: str = 'identity'
    gamma: float = 1.0
    order: int = 0

    def omega(self, eps):
        return schedule_omega(self, eps)


def make_schedule(kind, gamma=1.0, order=0):
    if kind not in SCHEDULES:
        raise ConfigurationError('unknown schedule {!r}, expected one of {}'.format(kind, ', '.join(SCHEDULES)))
    if kind == 'power' and not gamma > 0:
        raise DomainError('power schedule needs gamma > 0, got {}'.format(gamma))
    if kind == 'log' and order < 0:
        raise DomainError('log schedule needs order L >= 0, got {}'.format(order))
    return ScaleSchedule(kind, float(gamma), int(order))


def schedule_omega(s, eps):
    """omega(eps) for the schedule; log kind uses omega^(-L-1) = log(1/eps)."""
    if not 0.0 < eps <= 1.0:
        raise DomainError('eps must lie in (0, 1], got {}'.format(eps))
    if s.kind == 'identity':
        return float(eps)
    if s.kind == 'power':
        return float(eps ** s.gamma)
    if s.kind == 'log':
        if eps >= 1.0:
            raise DomainError('log schedule requires eps < 1')
        return float(math.log(1.0 / eps) ** (-1.0 / (s.order + 1)))
    raise ConfigurationError('unknown schedule {!r}'.format(s.kind))


# ===== coefficients =====

@dataclass(frozen=True)
class SmoothPart:
    """
    Analytic smooth part on [0, T].

    constant:    c0
    affine:      c0 + c1·t
    sinusoid:    c0 + c1·sin(kappa·t)
    power:       c0 + c1·t^q
    weierstrass: c0 + c1·sum_{j<terms} 2^(-alpha·j)·cos(2^j·t)
    """
    family: str = 'constant'
    c0: float = 1.0
    c1: float = 1.0
    kappa: float = 1.0
    q: float = 1.0
    alpha: float = 0.5
    terms: int = 16

    def cosine_terms(self):
        """(amplitude, frequency, phase) triples for the trigonometric families."""
        if self.family == 'sinusoid':
            return [(self.c1, self.kappa, -math.pi / 2.0)]
        if self.family == 'weierstrass':
            return [(self.c1 * 2.0 ** (-self.alpha * j), 2.0 ** j, 0.0) for j in range(self.terms)]
        return []

    def value(self, t, k=0):
        t = np.asarray(t, dtype=float)
        fam = self.family
        if fam == 'constant':
            return np.full(t.shape, self.c0 if k == 0 else 0.0)
        if fam == 'affine':
            if k == 0:
                return self.c0 + self.c1 * t
            return np.full(t.shape, self.c1 if k == 1 else 0.0)
        if fam in ('sinusoid', 'weierstrass'):
            out = np.full(t.shape, self.c0 if k == 0 else 0.0)
            for amp, freq, phase in self.cosine_terms():
                out = out + amp * freq ** k * np.cos(freq * t + phase + k * math.pi / 2.0)
            return out
        if fam == 'power':
            coef = self.c1 * math.prod(self.q - j for j in range(k))
            expo = self.q - k
            if coef == 0.0:
                out = np.zeros(t.shape)
            else:
                with np.errstate(divide='ignore', invalid='ignore'):
                    tp = np.where(t > 0.0, np.abs(t) ** expo, 0.0 if expo > 0 else (1.0 if expo == 0 else np.inf))
                out = coef * tp
            return out + (self.c0 if k == 0 else 0.0)
        raise ConfigurationError('unknown smooth family {!r}'.format(fam))


@dataclass(frozen=True)
class Jump:
    location: float
    height: float


@dataclass(frozen=True)
class Atom:
    location: float
    mass: float
    order: int = 0


@dataclass(frozen=True)
class RoughCoefficient:
    smooth: SmoothPart
    horizon: float
    jumps: Tuple[Jump, ...] = ()
    atoms: Tuple[Atom, ...] = ()
    floor: float = 0.0
    order: Optional[int] = None
    name: str = ''

    @property
    def declared_order(self):
        if self.order is not None:
            return self.order
        return self.growth_order

    @property
    def minimal_order(self):
        """Smallest order L a declaration may give: max atom order, plus one with jumps."""
        lo = max([atom.order for atom in self.atoms], default=0)
        return max(lo, 1 if self.jumps else 0)

    @property
    def growth_order(self):
        """Exponent of sup|a_eps| in 1/omega: delta^(k) mollified peaks like omega^(-k-1)."""
        lo = max([atom.order + 1 for atom in self.atoms], default=0)
        return max(lo, 1 if self.jumps else 0)

    @property
    def is_regular(self):
        return not self.jumps and not self.atoms

    def violations(self, samples=2001):
        out = []
        if not self.horizon > 0:
            out.append('horizon T must be positive, got {}'.format(self.horizon))
            return out
        if self.smooth.family not in SMOOTH_FAMILIES:
            out.append('unknown smooth family {!r}, expected one of {}'.format(self.smooth.family,
                                                                                 ', '.join(SMOOTH_FAMILIES)))
            return out
        if self.smooth.family == 'power' and self.smooth.q < 0:
            out.append('power exponent q must be >= 0, got {}'.format(self.smooth.q))
        if self.smooth.family == 'weierstrass' and not (0 < self.smooth.alpha and self.smooth.terms >= 1):
            out.append('weierstrass needs alpha > 0 and terms >= 1')
        for jump in self.jumps:
            if not 0.0 < jump.location < self.horizon:
                out.append('jump location {} outside (0, {})'.format(jump.location, self.horizon))
        for atom in self.atoms:
            if not 0.0 <= atom.location <= self.horizon:
                out.append('atom location {} outside [0, {}]'.format(atom.location, self.horizon))
            if atom.order < 0:
                out.append('atom order must be >= 0, got {}'.format(atom.order))
        if self.floor < 0:
            out.append('claimed floor must be >= 0, got {}'.format(self.floor))
        if self.floor > 0:
            grid = np.linspace(0.0, self.horizon, samples)
            low = float(np.min(self.smooth.value(grid)))
            if low < self.floor - LOWER_BOUND_TOL:
                out.append('positivity: smooth part drops to {:.6g} below claimed floor {:g}'.format(low, self.floor))
            for jump in self.jumps:
                if jump.height < 0:
                    out.append('positivity: jump at {} has negative height {}'.format(jump.location, jump.height))
            for atom in self.atoms:
                if atom.mass < 0:
                    out.append('positivity: atom at {} has negative mass {}'.format(atom.location, atom.mass))
                if atom.order != 0:
                    out.append('positivity: atom at {} has order {}, a positive distribution is a measure'
                               .format(atom.location, atom.order))
        if self.order is not None and self.order < self.minimal_order:
            out.append('declared order L={} is below the structure order {}'.format(self.order, self.minimal_order))
        return out

    def validate(self):
        problems = self.violations()
        if problems:
            raise ValidationError(problems)
        return self

    def evaluate(self, t, k=0):
        """Exact value of a regular coefficient (no jumps or atoms)."""
        if not self.is_regular:
            raise ConfigurationError('exact evaluation needs a regular coefficient, {} has jumps or atoms'
                                     .format(self.name or 'coefficient'))
        return self.smooth.value(t, k)


def constant_coefficient(c, horizon, name=''):
    return RoughCoefficient(SmoothPart('constant', c0=c), horizon, floor=max(c, 0.0), name=name)


# ===== convolution =====

def _smooth_interior(part, psi, omega, t, k):
    fam = part.family
    if fam == 'affine':
        return part.value(t, k)
    if fam in ('sinusoid', 'weierstrass'):
        out = np.full(t.shape, part.c0 if k == 0 else 0.0)
        for amp, freq, phase in part.cosine_terms():
            out = out + amp * psi.damping(freq * omega) * freq ** k * np.cos(freq * t + phase + k * math.pi / 2.0)
        return out
    return composite_gauss(lambda x: part.value(t[:, None] - omega * x, k) * psi.value(x),
                           -np.ones(t.shape), np.ones(t.shape), tol=psi.tol, panels=2)


def _smooth_boundary(part, psi, omega, t, k, horizon):
    lo = np.maximum(-1.0, (t - horizon) / omega)
    hi = np.minimum(1.0, t / omega)
    freq = max([f for _, f, _ in part.cosine_terms()], default=0.0)
    panels = max(2, int(math.ceil(freq * omega / math.pi)))
    inner = composite_gauss(lambda x: part.value(t[:, None] - omega * x, 0) * psi.derivative(x, k),
                            lo, hi, tol=psi.tol, panels=panels)
    left = float(part.value(np.array([0.0]))[0])
    right = float(part.value(np.array([horizon]))[0])
    outer = right * psi.integral_to(lo, k) + left * psi.integral_from(hi, k)
    return (inner + outer) / omega ** k


def _smooth_convolution(part, psi, omega, t, k, horizon):
    if part.family == 'constant':
        return np.full(t.shape, part.c0 if k == 0 else 0.0)
    out = np.empty(t.shape)
    interior = (t - omega > 0.0) & (t + omega < horizon)
    for idx, fn in ((np.nonzero(interior)[0], 'interior'), (np.nonzero(~interior)[0], 'boundary')):
        for start in range(0, idx.size, _CHUNK):
            sel = idx[start:start + _CHUNK]
            if fn == 'interior':
                out[sel] = _smooth_interior(part, psi, omega, t[sel], k)
            else:
                out[sel] = _smooth_boundary(part, psi, omega, t[sel], k, horizon)
    return out


def mollified_derivative(a, psi, omega, t, k=0):
    """∂_t^k (a ∗ psi_omega) at times t, from a ∗ psi_omega^(k)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = _smooth_convolution(a.smooth, psi, omega, t, k, a.horizon)
    for jump in a.jumps:
        z = (t - jump.location) / omega
        if k == 0:
            out = out + jump.height * psi.cdf(z)
        else:
            out = out + jump.height * omega ** (-k) * psi.derivative(z, k - 1)
    for atom in a.atoms:
        z = (t - atom.location) / omega
        n = k + atom.order
        out = out + atom.mass * omega ** (-1 - n) * psi.derivative(z, n)
    return out


@dataclass
class SampledCoefficient:
    t: np.ndarray
    derivatives: np.ndarray
    omega: Optional[float] = None
    provenance: str = ''

    @property
    def values(self):
        return self.derivatives[0]

    @property
    def k_max(self):
        return self.derivatives.shape[0] - 1

    @property
    def floor(self):
        return float(np.min(self.values))

    @property
    def ceiling(self):
        return float(np.max(self.values))

    @property
    def step(self):
        return float(self.t[1] - self.t[0]) if self.t.size > 1 else 0.0

    def derivative(self, k):
        if k > self.k_max:
            raise ConfigurationError('derivative of order {} not sampled (k_max={})'.format(k, self.k_max))
        return self.derivatives[k]

    def derivative_or_gradient(self, k=1):
        """Sampled derivative when present, otherwise a centred difference of the values."""
        if k <= self.k_max:
            return self.derivatives[k]
        d = self.values
        for _ in range(k):
            d = np.gradient(d, self.t)
        return d

    # sampling protocol shared with the coefficient fields
    resolution_scale = math.inf

    def sample(self, t, k_max=0):
        """Rows up to min(k_max, self.k_max); Hermite interpolation off the sampled grid."""
        t = np.asarray(t, dtype=float)
        top = min(k_max, self.k_max)
        if t.shape == self.t.shape and np.array_equal(t, self.t):
            return SampledCoefficient(self.t, self.derivatives[:top + 1], self.omega, self.provenance)
        rows = [CubicHermiteSpline(self.t, self.derivatives[j], self.derivatives[j + 1])(t)
                if j + 1 <= self.k_max else np.interp(t, self.t, self.derivatives[j])
                for j in range(top + 1)]
        return SampledCoefficient(t, np.vstack(rows), self.omega, self.provenance + ' (resampled)')

    def export(self, path):
        header = ['t', 'a_eps'] + ['d{}_a_eps'.format(k) for k in range(1, self.k_max + 1)]
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f)
            writer.writerow(header)
            for i in range(self.t.size):
                writer.writerow([repr(float(self.t[i]))] + [repr(float(v)) for v in self.derivatives[:, i]])
        return path


def mollify(a, psi, omega, grid, k_max=0):
    """
    Sample a_eps = a ∗ psi_omega and its first k_max derivatives on grid.

    :raises ResolutionError: when omega is too small for the grid to resolve
        psi_omega around an atom or jump
    """
    if not omega > 0:
        raise DomainError('omega must be positive, got {}'.format(omega))
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    top = k_max + max([atom.order for atom in a.atoms], default=0)
    if top > psi.max_order:
        raise ConfigurationError('mollifier {} supports derivatives up to order {}, {} requested'
                                 .format(psi.shape, psi.max_order, top))
    if grid.size > 1:
        step = float(np.max(np.diff(grid)))
        if omega < 1e-12 * a.horizon or (not a.is_regular and omega < 2.0 * step):
            raise ResolutionError('omega={:.3e} is not resolved by grid step {:.3e}'.format(omega, step))
    rows = [mollified_derivative(a, psi, omega, grid, k) for k in range(k_max + 1)]
    return SampledCoefficient(grid, np.vstack(rows), float(omega),
                              '{} * {}(omega={:.6g})'.format(a.name or a.smooth.family, psi.shape, omega))


class MollifiedCoefficient:
    """Coefficient field a ∗ psi_omega sampled on demand."""

    def __init__(self, a, psi, omega):
        self.a = a
        self.psi = psi
        self.omega = float(omega)
        self.resolution_scale = math.inf if a.is_regular else self.omega
        self.max_order = psi.max_order

    def sample(self, t, k_max=0):
        t = np.asarray(t, dtype=float)
        rows = [mollified_derivative(self.a, self.psi, self.omega, t, k) for k in range(k_max + 1)]
        return SampledCoefficient(t, np.vstack(rows), self.omega,
                                  '{} * {}(omega={:.6g})'.format(self.a.name or self.a.smooth.family,
                                                                 self.psi.shape, self.omega))


class ExactCoefficient:
    """Regular coefficient evaluated from its analytic descriptor."""
    resolution_scale = math.inf
    max_order = math.inf
    omega = None

    def __init__(self, a):
        if not a.is_regular:
            raise ConfigurationError('exact coefficient needs a regular descriptor; use mollification for {}'
                                     .format(a.name or 'this coefficient'))
        self.a = a

    def sample(self, t, k_max=0):
        t = np.asarray(t, dtype=float)
        rows = [self.a.evaluate(t, k) for k in range(k_max + 1)]
        return SampledCoefficient(t, np.vstack(rows), None, 'exact {}'.format(self.a.name or self.a.smooth.family))


# ===== certificates =====

def lower_bound_check(c, a0, tol=LOWER_BOUND_TOL):
    low = c.floor
    return low >= a0 - tol, low


@dataclass(frozen=True)
class DerivativeGrowth:
    k: int
    omegas: np.ndarray
    sups: np.ndarray
    fit: object
    verdict: str


def _growth_grid(a, omega, samples=2001, local=401):
    pieces = [np.linspace(0.0, a.horizon, samples)]
    for loc in [j.location for j in a.jumps] + [atom.location for atom in a.atoms]:
        pieces.append(np.clip(np.linspace(loc - 2.0 * omega, loc + 2.0 * omega, local), 0.0, a.horizon))
        pieces.append(np.array([loc]))
    return np.unique(np.concatenate(pieces))


def fit_derivative_growth(a, psi, schedule, eps_net, k_max):
    """
    Fit log sup_t |∂_t^k a_eps| against log(1/omega(eps)) for k = 0..k_max.

    A fit is "moderate" when the slope stays within the declared order L + k
    (plus a small tolerance) and the envelope holds on every net point.
    """
    eps_net = np.asarray(sorted(eps_net, reverse=True), dtype=float)
    if eps_net.size < 4 or eps_net[0] / eps_net[-1] < 100.0:
        raise DomainError('eps net needs at least 4 points spanning 2 decades')
    omegas = np.array([schedule_omega(schedule, e) for e in eps_net])
    sups = np.zeros((k_max + 1, omegas.size))
    for i, omega in enumerate(omegas):
        grid = _growth_grid(a, omega)
        for k in range(k_max + 1):
            sups[k, i] = float(np.max(np.abs(mollified_derivative(a, psi, omega, grid, k))))
    out = []
    order = a.declared_order
    for k in range(k_max + 1):
        scale = 1.0 / omegas
        zero_tol = 1e-13 * max(1.0, float(np.max(sups[0])))
        fit = fit_power_law(scale, sups[k], zero_tol=zero_tol)
        if fit.degenerate:
            verdict = DEGENERATE_NOTE
        elif fit.envelope_valid and fit.slope <= order + k + GROWTH_SLOPE_TOL:
            verdict = 'moderate'
        else:
            verdict = 'not moderate'
        logger.debug('derivative growth k=%d slope=%s verdict=%s', k, fit.slope, verdict)
        out.append(DerivativeGrowth(k, omegas, sups[k], fit, verdict))
    return out


@dataclass(frozen=True)
class HolderCertificate:
    alpha: float
    constant: float
    steps: np.ndarray
    oscillations: np.ndarray


def holder_certificate(part, horizon, alpha, levels=10, samples=4001):
    """
    Two-point oscillation certificate: max |a(t+h) - a(t)| / h^alpha over
    dyadic steps h, together with the exponent fitted to the oscillations.
    """
    t = np.linspace(0.0, horizon, samples)
    steps = horizon * 2.0 ** -np.arange(2, 2 + levels)
    osc = np.array([float(np.max(np.abs(part.value(t[t + h <= horizon] + h) - part.value(t[t + h <= horizon]))))
                    for h in steps])
    fit = fit_power_law(steps, osc)
    constant = float(np.max(osc / steps ** alpha))
    return HolderCertificate(alpha=float(fit.slope if fit.slope is not None else math.inf), constant=constant,
                             steps=steps, oscillations=osc)
