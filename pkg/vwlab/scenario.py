"""
Scenario files.

A scenario is an INI file read with configparser. Every section and key is
listed in `scenario_keys` together with its default and meaning; anything
else in the file is reported as a violation. Validation resolves the whole
file and collects every violation before raising, so no numerical work
starts on a scenario with a single bad key.
"""

import configparser
import hashlib
import json
import logging
import os
import re
from dataclasses import dataclass
from typing import Optional

from .errors import FatalError, ScenarioError, StorageError
from .lab import ModeDataSpec, ScenarioProblem, CoefficientClass, build_problem, regime_advisor
from .mode_solver import METHODS, IntegratorOptions
from .rough_coefficients import (Atom, Jump, RoughCoefficient, SmoothPart, holder_certificate, make_mollifier,
                                 make_schedule, schedule_omega)
from .spectral_model import build_model, gevrey_weights

logger = logging.getLogger(__name__)

ANALYSES = ('derivative_growth', 'moderateness', 'gevrey_moderateness', 'uniqueness', 'consistency',
            'amplification', 'energy_audit')

DESK_MODES = 64
DESK_NET = 12
DESK_STEPS = 200_000
HOLDER_TOL = 0.2

_SMOOTH_KEYS = {
    'family': ('constant', 'smooth part: constant, affine, sinusoid, power, weierstrass'),
    'c0': ('1.0', 'offset c0'),
    'c1': ('1.0', 'amplitude c1 (slope for affine)'),
    'kappa': ('1.0', 'angular frequency of the sinusoid, rad per unit time'),
    'q': ('1.0', 'exponent of the power family'),
    'alpha': ('0.5', 'Hoelder exponent of the weierstrass family'),
    'terms': ('16', 'number of weierstrass terms'),
    'jumps': ('', 'jumps as location:height, comma separated'),
    'atoms': ('', 'Dirac atoms as location:mass[:order], comma separated'),
}

scenario_keys = {
    'scenario': {
        'name': ('unnamed', 'label used in logs and the run summary'),
        'large': ('false', 'lift the desk-scale limits (modes, eps points, steps per mode)'),
    },
    'coefficient': dict(_SMOOTH_KEYS, **{
        'floor': ('0.0', 'claimed lower bound a0 of the coefficient'),
        'order': ('', 'declared distribution order L, blank for the growth order of the atoms and jumps'),
        'name': ('a', 'label'),
    }),
    'source': dict(_SMOOTH_KEYS, **{
        'family': ('none', 'time profile g of f = g(t)·h: none or a smooth family as for the coefficient'),
        'modes': ('zero', 'mode coefficients of h, a data descriptor'),
    }),
    'mollifier': {
        'shape': ('bump', 'Friedrichs mollifier: bump, cosine2, triangle'),
        'tolerance': ('1e-10', 'quadrature tolerance for mollifier integrals'),
        'second': ('cosine2', 'second mollifier used by the uniqueness experiment'),
    },
    'schedule': {
        'kind': ('identity', 'omega(eps): identity, power, log'),
        'gamma': ('1.0', 'exponent of the power schedule'),
        'order': ('', 'order L of the log schedule, blank for the coefficient order'),
    },
    'spectral': {
        'family': ('power', 'mode family: power, table, heisenberg'),
        'modes': ('16', 'mode count M'),
        'nu': ('2.0', 'homogeneous degree nu of the operator'),
        'table': ('', 'mode table file m,pi_m,mu_m (table family), relative to the scenario'),
        'lam_max': ('4.0', 'heisenberg: largest sampled lambda'),
        'lam_count': ('8', 'heisenberg: number of lambda samples'),
        'dimension': ('1', 'heisenberg: group dimension n'),
    },
    'data': {
        'u0': ('exp-decay', 'initial position, a data descriptor'),
        'u1': ('zero', 'initial velocity, a data descriptor'),
    },
    'time': {
        'horizon': ('1.0', 'final time T'),
        'base_step': ('', 'largest admissible step, blank for automatic'),
        'safety': ('0.1', 'step ceiling factor: dt <= safety / (beta·sqrt(max a))'),
        'rtol': ('1e-10', 'relative tolerance of the step-doubling error estimate'),
        'method': ('rk4', 'integrator: rk4, verlet'),
        'max_steps': ('200000', 'step budget per mode'),
        'report_steps': ('', 'report intervals on [0, T], blank for automatic'),
    },
    'regime': {
        'class': ('', 'claimed coefficient class: lipschitz-positive, holder-positive, smooth-degenerate, '
                      'holder-degenerate; blank for none'),
        'alpha': ('', 'Hoelder exponent of the class'),
        'ell': ('', 'smoothness ell of the smooth-degenerate class'),
        's': ('1.5', 'Gevrey order used by the Gevrey analyses'),
    },
    'analyses': {
        'run': ('moderateness', 'analyses to run, comma separated: ' + ', '.join(ANALYSES)),
        'eps': ('2^-2..2^-12', 'eps net: comma separated values or a range b^m..b^n'),
        'p_max': ('2', 'highest time derivative in the moderateness fits'),
        'k_max': ('1', 'highest coefficient derivative in the growth fits'),
        'eta': ('0, 0.5, 1, 1.5, 2, 3, 4', 'eta grid of the Gevrey moderateness report'),
        'eta_tail_tol': ('', 'also require the weighted mode amplitudes to grow along pi^(1/s) at a rate <= this; '
                             'blank for envelopes only'),
        'ell': ('1, 2, 3', 'negligibility orders'),
        'sobolev': ('0.0', 'Sobolev order s of the norms'),
        'betas': ('1, 2, 5, 10, 20, 50, 100, 200, 500', 'mode frequencies of the amplification scan'),
        'threshold': ('1e-3', 'final error threshold of the consistency verdict'),
        'consistency_eta': ('', 'consistency errors in the Gevrey norm ||e^(eta R^(1/2s)) .|| with s from '
                                '[regime]; blank for Sobolev norms'),
        'max_exponent': ('20', 'largest moderateness exponent N accepted'),
        'double_modes': ('true', 'repeat moderateness on 2M modes for the stability flag'),
    },
    'output': {
        'directory': ('', 'output root, overridden by VWLAB_OUTPUT_ROOT; blank for ./runs'),
    },
}

_TRUE = ('1', 'true', 'yes', 'on')
_FALSE = ('0', 'false', 'no', 'off')
_RANGE = re.compile(r'^\s*([0-9.]+)\^(-?\d+)\s*\.\.\s*([0-9.]+)\^(-?\d+)\s*$')
_POWER = re.compile(r'^\s*([0-9.]+)\^(-?\d+)\s*$')


@dataclass
class Scenario:
    name: str
    path: str
    large: bool
    problem: ScenarioProblem
    mollifier: object
    second_mollifier: object
    schedule: object
    options: IntegratorOptions
    report_steps: Optional[int]
    regime: Optional[CoefficientClass]
    gevrey_s: float
    analyses: tuple
    eps: tuple
    p_max: int
    k_max: int
    eta_grid: tuple
    ell_list: tuple
    betas: tuple
    threshold: float
    max_exponent: float
    double_modes: bool
    output_dir: str
    canonical: dict
    consistency_gevrey: Optional[tuple] = None
    holder: Optional[object] = None
    eta_tail_tol: Optional[float] = None

    @property
    def coefficient(self):
        return self.problem.coefficient

    @property
    def model(self):
        return self.problem.model

    @property
    def digest(self):
        return scenario_hash(self.canonical)


def scenario_hash(canonical):
    text = json.dumps(canonical, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


class _Reader:
    """Typed access to the merged sections; conversion problems are collected, not raised."""

    def __init__(self, values, errors):
        self.values = values
        self.errors = errors

    def raw(self, section, key):
        return self.values[section][key].strip()

    def _fail(self, section, key, what):
        self.errors.append('[{}] {}: expected {}, got {!r}'.format(section, key, what, self.raw(section, key)))

    def number(self, section, key, kind=float, blank=False):
        text = self.raw(section, key)
        if blank and text == '':
            return None
        try:
            return kind(text)
        except ValueError:
            self._fail(section, key, 'an integer' if kind is int else 'a number')
            return None

    def flag(self, section, key):
        text = self.raw(section, key).lower()
        if text in _TRUE:
            return True
        if text in _FALSE:
            return False
        self._fail(section, key, 'true or false')
        return False

    def numbers(self, section, key):
        out = []
        for token in _split(self.raw(section, key)):
            try:
                out.append(_power_token(token))
            except ValueError:
                self._fail(section, key, 'a comma separated list of numbers')
                return ()
        return tuple(out)


def _split(text):
    return [t.strip() for t in text.split(',') if t.strip()]


def _power_token(token):
    m = _POWER.match(token)
    if m:
        return float(m.group(1)) ** int(m.group(2))
    return float(token)


def parse_eps(text):
    """eps net from 'b^m..b^n' or a comma separated list, in descending order."""
    m = _RANGE.match(text)
    if m:
        b0, e0, b1, e1 = float(m.group(1)), int(m.group(2)), float(m.group(3)), int(m.group(4))
        if b0 != b1:
            raise ValueError('range ends need the same base')
        step = 1 if e1 >= e0 else -1
        values = [b0 ** e for e in range(e0, e1 + step, step)]
    else:
        values = [_power_token(t) for t in _split(text)]
    return tuple(sorted(set(values), reverse=True))


def parse_jumps(text):
    out = []
    for token in _split(text):
        parts = token.split(':')
        if len(parts) != 2:
            raise ValueError('jump {!r} is not location:height'.format(token))
        out.append(Jump(float(parts[0]), float(parts[1])))
    return tuple(out)


def parse_atoms(text):
    out = []
    for token in _split(text):
        parts = token.split(':')
        if len(parts) not in (2, 3):
            raise ValueError('atom {!r} is not location:mass[:order]'.format(token))
        out.append(Atom(float(parts[0]), float(parts[1]), int(parts[2]) if len(parts) == 3 else 0))
    return tuple(out)


def parse_mode_data(text):
    """
    Data descriptor 'family, key=value, ...'; the list family takes plain
    values instead: 'list, 1, 0.5j, 0.25'.
    """
    tokens = _split(text)
    if not tokens:
        raise ValueError('empty data descriptor')
    family, rest = tokens[0], tokens[1:]
    kwargs = {}
    values = []
    for token in rest:
        if '=' in token:
            key, value = (x.strip() for x in token.split('=', 1))
            if key == 'scale':
                kwargs['scale'] = complex(value)
            elif key in ('rate', 'q', 'eta', 's'):
                kwargs[key] = float(value)
            else:
                raise ValueError('unknown data parameter {!r}'.format(key))
        elif family == 'list':
            values.append(complex(token))
        else:
            raise ValueError('{!r} is not key=value'.format(token))
    spec = ModeDataSpec(family=family, values=tuple(values), **kwargs)
    if family not in ('zero', 'exp-decay', 'power-decay', 'gevrey', 'list'):
        raise ValueError('unknown data family {!r}'.format(family))
    if family == 'gevrey' and spec.s < 1:
        raise ValueError('gevrey data needs s >= 1')
    return spec


def _read_file(path):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'))
    parser.optionxform = str
    try:
        with open(path, encoding='utf-8') as f:
            parser.read_file(f)
    except OSError as e:
        raise StorageError('cannot read scenario {}: {}'.format(path, e))
    except configparser.Error as e:
        raise ScenarioError('parse error in {}: {}'.format(path, e))
    return parser


def _merge(parser, errors):
    values = {section: {key: default for key, (default, _) in keys.items()} for section, keys in scenario_keys.items()}
    for section in parser.sections():
        if section not in scenario_keys:
            errors.append('unknown section [{}]'.format(section))
            continue
        for key, value in parser.items(section):
            if key not in scenario_keys[section]:
                errors.append('[{}] unknown key {!r}'.format(section, key))
                continue
            values[section][key] = value
    return values


def _smooth(reader, section):
    r = reader
    return SmoothPart(family=r.raw(section, 'family'),
                      c0=r.number(section, 'c0') or 0.0,
                      c1=r.number(section, 'c1') or 0.0,
                      kappa=r.number(section, 'kappa') or 0.0,
                      q=r.number(section, 'q') or 0.0,
                      alpha=r.number(section, 'alpha') or 0.0,
                      terms=r.number(section, 'terms', int) or 0)


def _structure(reader, section, errors):
    try:
        jumps = parse_jumps(reader.raw(section, 'jumps'))
    except ValueError as e:
        errors.append('[{}] jumps: {}'.format(section, e))
        jumps = ()
    try:
        atoms = parse_atoms(reader.raw(section, 'atoms'))
    except ValueError as e:
        errors.append('[{}] atoms: {}'.format(section, e))
        atoms = ()
    return jumps, atoms


def _descriptor(reader, section, key, errors):
    try:
        return parse_mode_data(reader.raw(section, key))
    except ValueError as e:
        errors.append('[{}] {}: {}'.format(section, key, e))
        return ModeDataSpec('zero')


def _attempt(errors, label, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except FatalError as e:
        errors.append('{}: {}'.format(label, e))
    except (ValueError, TypeError) as e:
        errors.append('{}: {}'.format(label, e))
    return None


def _check_analyses(sc, errors):
    a = sc['coefficient']
    psi = sc['mollifier']
    atoms_order = max([atom.order for atom in a.atoms], default=0) if a is not None else 0
    run = sc['analyses']
    for name in run:
        if name not in ANALYSES:
            errors.append('[analyses] run: unknown analysis {!r}, expected one of {}'.format(name, ', '.join(ANALYSES)))
    eps = sc['eps']
    if len(eps) < 4:
        errors.append('[analyses] eps: needs at least 4 distinct values, got {}'.format(len(eps)))
    if eps and not (0.0 < eps[-1] and eps[0] <= 1.0):
        errors.append('[analyses] eps: values must lie in (0, 1]')
    if sc['schedule'] is not None and eps and 0.0 < eps[-1]:
        for e in eps:
            if _attempt(errors, '[schedule] eps={:g}'.format(e), schedule_omega, sc['schedule'], e) is None:
                break
    if a is None or psi is None:
        return
    if sc['p_max'] is not None and sc['p_max'] < 1:
        errors.append('[analyses] p_max: must be >= 1')
    needs_net = {'moderateness', 'gevrey_moderateness', 'energy_audit', 'uniqueness'} & set(run)
    if needs_net and sc['p_max'] is not None:
        top = max(sc['p_max'] - 2, 0) + atoms_order
        if top > psi.max_order:
            errors.append('[analyses] p_max={} needs mollifier derivatives of order {}, {} provides {}'
                          .format(sc['p_max'], top, psi.shape, psi.max_order))
    if 'derivative_growth' in run:
        if sc['k_max'] is not None and sc['k_max'] + atoms_order > psi.max_order:
            errors.append('[analyses] k_max={} needs mollifier derivatives of order {}, {} provides {}'
                          .format(sc['k_max'], sc['k_max'] + atoms_order, psi.shape, psi.max_order))
        if eps and eps[-1] > 0 and eps[0] / eps[-1] < 100.0:
            errors.append('[analyses] eps: derivative_growth needs a net spanning 2 decades')
    if 'consistency' in run:
        if not a.is_regular:
            errors.append('consistency: coefficient has jumps or atoms; use moderateness (existence pipeline)')
        g = sc['source']
        if g is not None and not g.is_regular:
            errors.append('consistency: source profile has jumps or atoms')
    if 'energy_audit' in run and not (a.is_regular and a.floor > 0):
        errors.append('energy_audit: needs a regular coefficient with a claimed floor > 0')
    if 'uniqueness' in run and sc['second'] is None:
        errors.append('uniqueness: [mollifier] second is not a valid mollifier')
    if 'gevrey_moderateness' in run and not sc['eta_grid']:
        errors.append('[analyses] eta: gevrey_moderateness needs a nonempty eta grid')
    if 'amplification' in run:
        if not a.is_regular:
            errors.append('amplification: coefficient has jumps or atoms')
        betas = sc['betas']
        if len(betas) < 2 or min(betas) <= 0 or max(betas) / min(betas) < 100.0:
            errors.append('[analyses] betas: amplification needs positive betas spanning 2 decades')
    if {'amplification', 'gevrey_moderateness'} & set(run) and sc['gevrey_s'] is not None and sc['gevrey_s'] < 1:
        errors.append('[regime] s: Gevrey order must be >= 1, got {:g}'.format(sc['gevrey_s']))


def _check_regime(cls, s, errors):
    record = _attempt(errors, '[regime]', regime_advisor, cls)
    if record is None or s is None:
        return
    if not record.admits(s):
        if s < record.s_lower:
            errors.append('[regime] s must satisfy s >= {:g} (regime {}), got {:g}'.format(record.s_lower,
                                                                                        record.regime, s))
        else:
            errors.append('[regime] s must satisfy s < {:g} (regime {}), got {:g}'.format(record.s_upper,
                                                                                       record.regime, s))


def _holder_evidence(a, cls):
    """Oscillation certificate of a Weierstrass coefficient claimed to be in a Hoelder class."""
    part = a.smooth
    if cls is None or cls.alpha is None or part.family != 'weierstrass':
        return None
    if not (part.alpha > 0 and part.terms >= 1 and a.horizon > 0):
        return None
    cert = holder_certificate(part, a.horizon, cls.alpha)
    if cert.alpha < cls.alpha - HOLDER_TOL:
        logger.warning('claimed Hoelder exponent %g exceeds the fitted oscillation exponent %.3g', cls.alpha,
                       cert.alpha)
    return cert


def _check_desk(sc, large, errors):
    if large:
        return
    model = sc['model']
    if model is not None and model.modes > DESK_MODES:
        errors.append('[spectral] modes: {} exceeds the desk limit {} (set [scenario] large = true)'
                      .format(model.modes, DESK_MODES))
    if len(sc['eps']) > DESK_NET:
        errors.append('[analyses] eps: {} points exceed the desk limit {} (set [scenario] large = true)'
                      .format(len(sc['eps']), DESK_NET))
    opts = sc['options']
    if opts is not None and opts.max_steps > DESK_STEPS:
        errors.append('[time] max_steps: {} exceeds the desk limit {} (set [scenario] large = true)'
                      .format(opts.max_steps, DESK_STEPS))


def validate_scenario(path):
    """
    Resolve a scenario file.

    :return: Scenario
    :raises ScenarioError: with every violation found in the file
    :raises StorageError: when the file cannot be read
    """
    parser = _read_file(path)
    errors = []
    values = _merge(parser, errors)
    r = _Reader(values, errors)
    base = os.path.dirname(os.path.abspath(path))
    sc = {}

    horizon = r.number('time', 'horizon')
    order = r.number('coefficient', 'order', int, blank=True)
    jumps, atoms = _structure(r, 'coefficient', errors)
    a = RoughCoefficient(_smooth(r, 'coefficient'), horizon or 1.0, jumps, atoms,
                         floor=r.number('coefficient', 'floor') or 0.0, order=order,
                         name=r.raw('coefficient', 'name'))
    for v in a.violations():
        errors.append('[coefficient] ' + v)
    sc['coefficient'] = a

    g = None
    h = None
    if r.raw('source', 'family') != 'none':
        g_jumps, g_atoms = _structure(r, 'source', errors)
        g = RoughCoefficient(_smooth(r, 'source'), horizon or 1.0, g_jumps, g_atoms, name='g')
        for v in g.violations():
            errors.append('[source] ' + v)
        h = _descriptor(r, 'source', 'modes', errors)
    sc['source'] = g

    tol = r.number('mollifier', 'tolerance')
    psi = _attempt(errors, '[mollifier] shape', make_mollifier, r.raw('mollifier', 'shape'), tol or 1e-10)
    second = _attempt(errors, '[mollifier] second', make_mollifier, r.raw('mollifier', 'second'), tol or 1e-10)
    sc['mollifier'], sc['second'] = psi, second

    sched_order = r.number('schedule', 'order', int, blank=True)
    sc['schedule'] = _attempt(errors, '[schedule]', make_schedule, r.raw('schedule', 'kind'),
                              r.number('schedule', 'gamma') or 0.0,
                              sched_order if sched_order is not None else a.declared_order)

    family = r.raw('spectral', 'family')
    params = {}
    if family == 'table':
        table = r.raw('spectral', 'table')
        params['path'] = os.path.join(base, table) if table else ''
    elif family == 'heisenberg':
        params = {'lam_max': r.number('spectral', 'lam_max'), 'lam_count': r.number('spectral', 'lam_count', int),
                  'dimension': r.number('spectral', 'dimension', int)}
    model = _attempt(errors, '[spectral]', build_model, family, r.number('spectral', 'modes', int),
                     r.number('spectral', 'nu') or 0.0, params)
    sc['model'] = model

    u0 = _descriptor(r, 'data', 'u0', errors)
    u1 = _descriptor(r, 'data', 'u1', errors)
    problem = None
    if model is not None and not errors:
        problem = _attempt(errors, '[data]', build_problem, a, model, u0, u1, g, h,
                           r.number('analyses', 'sobolev') or 0.0)
    method = r.raw('time', 'method')
    if method not in METHODS:
        errors.append('[time] method: unknown integrator {!r}, expected one of {}'.format(method, ', '.join(METHODS)))
    opts = IntegratorOptions(method=method, rtol=r.number('time', 'rtol') or 1e-10,
                             safety=r.number('time', 'safety') or 0.1,
                             max_steps=r.number('time', 'max_steps', int) or DESK_STEPS,
                             base_step=r.number('time', 'base_step', blank=True))
    sc['options'] = opts
    report_steps = r.number('time', 'report_steps', int, blank=True)
    if horizon is not None and not horizon > 0:
        errors.append('[time] horizon: must be positive')

    try:
        sc['eps'] = parse_eps(r.raw('analyses', 'eps'))
    except ValueError as e:
        errors.append('[analyses] eps: {}'.format(e))
        sc['eps'] = ()
    sc['analyses'] = tuple(_split(r.raw('analyses', 'run')))
    sc['p_max'] = r.number('analyses', 'p_max', int)
    sc['k_max'] = r.number('analyses', 'k_max', int)
    sc['eta_grid'] = r.numbers('analyses', 'eta')
    sc['betas'] = r.numbers('analyses', 'betas')
    sc['gevrey_s'] = r.number('regime', 's')
    ells = r.numbers('analyses', 'ell')
    large = r.flag('scenario', 'large')

    regime = None
    if r.raw('regime', 'class'):
        regime = CoefficientClass(r.raw('regime', 'class'), r.number('regime', 'alpha', blank=True),
                                  r.number('regime', 'ell', blank=True))
        _check_regime(regime, sc['gevrey_s'], errors)
    holder = _holder_evidence(a, regime)

    consistency_gevrey = None
    consistency_eta = r.number('analyses', 'consistency_eta', blank=True)
    if consistency_eta is not None:
        if consistency_eta < 0:
            errors.append('[analyses] consistency_eta: must be >= 0, got {:g}'.format(consistency_eta))
        elif model is not None and sc['gevrey_s'] is not None:
            if _attempt(errors, '[analyses] consistency_eta', gevrey_weights, model, sc['gevrey_s'],
                        consistency_eta) is not None:
                consistency_gevrey = (sc['gevrey_s'], consistency_eta)

    _check_analyses(sc, errors)
    _check_desk(sc, large, errors)

    canonical = {section: dict(sorted(keys.items())) for section, keys in values.items()}
    if family == 'table' and params.get('path') and os.path.exists(params['path']):
        with open(params['path'], 'rb') as f:
            canonical['spectral']['table_sha256'] = hashlib.sha256(f.read()).hexdigest()
    canonical['output'] = {}

    if errors:
        raise ScenarioError(errors)
    scenario = Scenario(
        name=r.raw('scenario', 'name'), path=os.path.abspath(path), large=large, problem=problem, mollifier=psi,
        second_mollifier=second, schedule=sc['schedule'], options=opts, report_steps=report_steps, regime=regime,
        gevrey_s=sc['gevrey_s'], analyses=sc['analyses'], eps=sc['eps'], p_max=sc['p_max'], k_max=sc['k_max'],
        eta_grid=sc['eta_grid'], ell_list=ells, betas=sc['betas'], threshold=r.number('analyses', 'threshold'),
        max_exponent=r.number('analyses', 'max_exponent'), double_modes=r.flag('analyses', 'double_modes'),
        output_dir=r.raw('output', 'directory'), canonical=canonical, consistency_gevrey=consistency_gevrey,
        holder=holder, eta_tail_tol=r.number('analyses', 'eta_tail_tol', blank=True))
    logger.info('scenario %s resolved: %d modes, %d eps values, analyses %s', scenario.name, scenario.model.modes,
                len(scenario.eps), ', '.join(scenario.analyses))
    return scenario


def describe_keys():
    """(section, key, default, meaning) for every recognised key."""
    for section, keys in scenario_keys.items():
        for key, (default, meaning) in keys.items():
            yield section, key, default, meaning
