"""
Discrete spectral picture of a positive Rockland operator R.

A model is a finite, strictly increasing set of mode frequencies pi_m with
positive Plancherel weights mu_m. The operator acts on mode m as pi_m^2.
Sobolev and Gevrey norms are weighted l2 sums over the modes, accumulated
in ascending m.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.special import comb

from .errors import ConfigurationError, DomainError, GevreyOverflowError, StorageError, ValidationError

logger = logging.getLogger(__name__)

FAMILIES = ('power', 'table', 'heisenberg')
EXPONENT_CAP = 700.0
ETA_RESOLUTION = 1e-3
MIN_FIT_MODES = 8

heisenberg_defaults = {
    'lam_max': 4.0,
    'lam_count': 8,
    'dimension': 1,
}


@dataclass(frozen=True, eq=False)
class SpectralModel:
    family: str
    nu: float
    frequencies: np.ndarray
    weights: np.ndarray
    params: Tuple = ()

    @property
    def modes(self):
        return int(self.frequencies.size)

    @property
    def eigenvalues(self):
        return self.frequencies ** 2

    def same_as(self, other):
        return (self.nu == other.nu and np.array_equal(self.frequencies, other.frequencies)
                and np.array_equal(self.weights, other.weights))

    def resized(self, modes):
        """Same family and parameters with a different mode count."""
        if self.family == 'table':
            raise ConfigurationError('a table model has a fixed mode count')
        return build_model(self.family, modes, self.nu, dict(self.params))


@dataclass(frozen=True, eq=False)
class ModeField:
    coefficients: np.ndarray
    model: SpectralModel = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        object.__setattr__(self, 'coefficients', c)
        if c.shape != (self.model.modes,):
            raise ValidationError('mode field has {} entries, model has {} modes'.format(c.size, self.model.modes))
        if not np.all(np.isfinite(c)):
            raise ValidationError('mode field has non-finite entries')


@dataclass(frozen=True)
class GrowthFit:
    eta: float
    log_constant: float
    slope: float
    head_slope: float
    tail_slope: float
    residuals: np.ndarray
    verdict: str

    @property
    def constant(self):
        return math.exp(self.log_constant)


def _check_table(pairs):
    problems = []
    pi = np.array([p for p, _ in pairs], dtype=float)
    mu = np.array([m for _, m in pairs], dtype=float)
    if pi.size == 0:
        problems.append('mode table is empty')
    if np.any(pi <= 0):
        problems.append('mode table frequencies must be positive')
    if np.any(np.diff(pi) <= 0):
        bad = int(np.nonzero(np.diff(pi) <= 0)[0][0]) + 2
        problems.append('mode table frequencies must be strictly increasing (row {})'.format(bad))
    if np.any(mu <= 0):
        problems.append('mode table weights must be positive')
    if problems:
        raise ValidationError(problems)
    return pi, mu


def _heisenberg_modes(modes, lam_max, lam_count, dimension):
    dlam = lam_max / lam_count
    lams = dlam * np.arange(1, lam_count + 1)
    ks = np.arange(0, modes + 1)
    pi = np.sqrt(lams[:, None] * (2 * ks[None, :] + dimension)).ravel()
    mu = (lams[:, None] ** dimension * dlam * comb(ks[None, :] + dimension - 1, dimension - 1)).ravel()
    order = np.argsort(pi, kind='stable')
    pi, mu = pi[order], mu[order]
    merged_pi, merged_mu = [pi[0]], [mu[0]]
    for p, m in zip(pi[1:], mu[1:]):
        if abs(p - merged_pi[-1]) <= 1e-12 * p:
            merged_mu[-1] += m
        else:
            merged_pi.append(p)
            merged_mu.append(m)
    return np.array(merged_pi[:modes]), np.array(merged_mu[:modes])


def build_model(family, modes=None, nu=2.0, params=None):
    """
    Build a SpectralModel.

    power:      pi_m = m^(nu/2), mu_m = 1
    table:      params['table'] = [(pi, mu), ...] or params['path'] to an m,pi_m,mu_m file
    heisenberg: pi = sqrt(lam·(2k+n)) over lam_j = j·lam_max/lam_count, weights lam^n·dlam·C(k+n-1, n-1)
    """
    params = dict(params or {})
    if family not in FAMILIES:
        raise ConfigurationError('unknown spectral family {!r}, expected one of {}'.format(family, ', '.join(FAMILIES)))
    if not nu > 0:
        raise DomainError('homogeneous degree nu must be positive, got {}'.format(nu))
    if family == 'table':
        pairs = params.get('table')
        if pairs is None:
            if 'path' not in params:
                raise ConfigurationError('table model needs a table or a path')
            pairs = load_mode_table(params['path'])
        pi, mu = _check_table(pairs)
        return SpectralModel('table', float(nu), pi, mu, tuple(sorted((k, v) for k, v in params.items()
                                                                        if k == 'path')))
    if modes is None or modes < 1:
        raise DomainError('mode count M must be >= 1, got {}'.format(modes))
    if family == 'power':
        m = np.arange(1, modes + 1, dtype=float)
        return SpectralModel('power', float(nu), m ** (nu / 2.0), np.ones(modes))
    merged = dict(heisenberg_defaults)
    merged.update(params)
    pi, mu = _heisenberg_modes(modes, float(merged['lam_max']), int(merged['lam_count']), int(merged['dimension']))
    pi, mu = _check_table(list(zip(pi, mu)))
    return SpectralModel('heisenberg', float(nu), pi, mu, tuple(sorted(merged.items())))


def _coefficients(u, model):
    if isinstance(u, ModeField):
        if u.model is not model and not u.model.same_as(model):
            raise ValidationError('mode field belongs to a different model')
        return u.coefficients
    c = np.asarray(u, dtype=complex)
    if c.shape[-1] != model.modes:
        raise ValidationError('mode field has {} entries, model has {} modes'.format(c.shape[-1], model.modes))
    return c


def sobolev_weights(model, s):
    return model.weights * (1.0 + model.frequencies ** 2) ** (2.0 * s / model.nu)


def gevrey_weights(model, s, A, sign=1, cap=EXPONENT_CAP):
    if s < 1:
        raise DomainError('Gevrey order s must be >= 1, got {}'.format(s))
    exponent = sign * 2.0 * A * model.frequencies ** (1.0 / s)
    over = np.nonzero(exponent > cap)[0]
    if over.size:
        raise GevreyOverflowError(int(over[0]) + 1, float(exponent[over[0]]), cap)
    return model.weights * np.exp(exponent)


def weighted_norm(coefficients, weights):
    """sqrt(sum_m w_m |u_m|^2) along the last axis."""
    return np.sqrt(np.sum(weights * np.abs(coefficients) ** 2, axis=-1))


def sobolev_norm(u, model, s):
    return float(weighted_norm(_coefficients(u, model), sobolev_weights(model, s)))


def gevrey_norm(u, model, s, A, sign=1, cap=EXPONENT_CAP):
    """sign=+1 gives ||e^(A R^(1/2s)) u||, sign=-1 the ultradistribution pairing norm."""
    return float(weighted_norm(_coefficients(u, model), gevrey_weights(model, s, A, sign, cap)))


def plancherel_assemble(per_mode_sq, model):
    x = np.asarray(per_mode_sq, dtype=float)
    if x.shape != (model.modes,):
        raise ValidationError('expected {} per-mode values, got {}'.format(model.modes, x.size))
    if np.any(x < 0):
        raise ValidationError('per-mode squared norms must be nonnegative (mode {})'
                              .format(int(np.nonzero(x < 0)[0][0]) + 1))
    return float(np.sum(model.weights * x))


def _slope(x, y):
    if x.size < 2 or np.ptp(x) == 0.0:
        return 0.0
    return float(np.polyfit(x, y, 1)[0])


def ultradistribution_fit(u, model, s, resolution=ETA_RESOLUTION):
    """
    Fit log|u_m| <= log C + eta·pi_m^(1/s) as an upper envelope.

    eta is the smallest value on the resolution grid for which the line
    through the least-squares intercept lies above every mode, and zero when
    the fitted rate is not positive. C is then lowered to the upper envelope
    at that eta. The verdict compares the growth rate on the first and last
    thirds of the modes: a rate that dies out is roumieu-type, a steady one
    beurling-type, a growing one unbounded.
    """
    if s < 1:
        raise DomainError('Gevrey order s must be >= 1, got {}'.format(s))
    if model.modes < MIN_FIT_MODES:
        raise DomainError('ultradistribution fit needs at least {} modes, model has {}'
                          .format(MIN_FIT_MODES, model.modes))
    mag = np.abs(_coefficients(u, model))
    x_all = model.frequencies ** (1.0 / s)
    keep = mag > 0.0
    if not np.any(keep):
        return GrowthFit(0.0, -math.inf, 0.0, 0.0, 0.0, np.zeros(model.modes), 'trivially both types')
    x = x_all[keep]
    y = np.log(mag[keep])
    if x.size >= 2 and np.ptp(x) > 0.0:
        slope, intercept = (float(c) for c in np.polyfit(x, y, 1))
    else:
        slope, intercept = 0.0, float(np.max(y))
    eta = 0.0
    if slope > 0.0:
        needed = float(np.max((y - intercept) / x))
        eta = max(0.0, math.ceil(needed / resolution - 1e-9) * resolution)
    log_constant = float(np.max(y - eta * x))
    residuals = np.full(model.modes, -np.inf)
    residuals[keep] = y - (log_constant + eta * x)
    thirds = np.array_split(np.arange(x.size), 3)
    head = _slope(x[thirds[0]], y[thirds[0]])
    tail = _slope(x[thirds[-1]], y[thirds[-1]])
    if eta == 0.0 or tail <= 0.0:
        verdict = 'roumieu-type'
    elif head > 0.0 and tail / head < 0.9:
        verdict = 'roumieu-type'
    elif head <= 0.0 or tail / head > 1.1:
        verdict = 'unbounded'
    else:
        verdict = 'beurling-type'
    logger.debug('ultradistribution fit: slope=%.6g eta=%.4g head=%.4g tail=%.4g -> %s', slope, eta, head, tail,
                 verdict)
    return GrowthFit(eta, log_constant, slope, head, tail, residuals, verdict)


def export_mode_table(model, path):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['m', 'pi_m', 'mu_m'])
        for m, (p, w) in enumerate(zip(model.frequencies, model.weights), start=1):
            writer.writerow([m, repr(float(p)), repr(float(w))])
    return path


def load_mode_table(path):
    try:
        with open(path, newline='') as f:
            rows = list(csv.DictReader(row for row in f if not row.startswith('#')))
    except OSError as e:
        raise StorageError('cannot read mode table {}: {}'.format(path, e))
    try:
        return [(float(r['pi_m']), float(r['mu_m'])) for r in rows]
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError('mode table {} needs columns m,pi_m,mu_m ({})'.format(path, e))
