"""
Very-weak-solution experiments on eps-nets of regularised problems.

For every eps the coefficient a and the source profile g are mollified with
psi_omega(eps), every mode is integrated on a shared report grid, and the
time derivatives of order p >= 2 follow from
    ∂_t^p u = ∂_t^(p-2) f - R · sum_j C(p-2, j) ∂_t^j a · ∂_t^(p-2-j) u.
Fits and verdicts are computed afterwards in ascending eps order, so the
results do not depend on how the eps solves were scheduled.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy.special import comb

from .errors import AnalysisError, ConfigurationError, DomainError, FatalError, ValidationError
from .fitting import envelope_log_constant, fit_power_law, local_slopes
from .mode_solver import (GridSampler, IntegratorOptions, ModeProblem, ModeTrajectory, classical_reference,
                          solve_mode)
from .rough_coefficients import ExactCoefficient, MollifiedCoefficient, schedule_omega
from .spectral_model import ModeField, gevrey_weights, sobolev_weights, weighted_norm

logger = logging.getLogger(__name__)

DATA_FAMILIES = ('zero', 'exp-decay', 'power-decay', 'gevrey', 'list')
REGIME_CLASSES = ('lipschitz-positive', 'holder-positive', 'smooth-degenerate', 'holder-degenerate')
DEFAULT_EPS_NET = tuple(2.0 ** -j for j in range(2, 13))
MAX_EXPONENT = 20.0
ELL_TOL = 0.05
MONOTONE_TOL = 0.05


# ===== problem description =====

@dataclass(frozen=True)
class ModeDataSpec:
    """
    Mode coefficients defined by a named family, resolved against a model.

    zero:        0
    exp-decay:   e^(-rate·pi_m)
    power-decay: (1 + pi_m^2)^(-q)
    gevrey:      e^(eta·pi_m^(1/s))
    list:        explicit values, padded with zeros
    """
    family: str = 'zero'
    rate: float = 1.0
    q: float = 1.0
    eta: float = 1.0
    s: float = 1.0
    values: tuple = ()
    scale: complex = 1.0

    def resolve(self, model):
        pi = model.frequencies
        if self.family == 'zero':
            c = np.zeros(model.modes, dtype=complex)
        elif self.family == 'exp-decay':
            c = np.exp(-self.rate * pi).astype(complex)
        elif self.family == 'power-decay':
            c = ((1.0 + pi ** 2) ** (-self.q)).astype(complex)
        elif self.family == 'gevrey':
            c = np.exp(self.eta * pi ** (1.0 / self.s)).astype(complex)
        elif self.family == 'list':
            if len(self.values) > model.modes:
                raise ValidationError('list data has {} values for {} modes'.format(len(self.values), model.modes))
            c = np.zeros(model.modes, dtype=complex)
            c[:len(self.values)] = self.values
        else:
            raise ConfigurationError('unknown data family {!r}, expected one of {}'
                                     .format(self.family, ', '.join(DATA_FAMILIES)))
        return ModeField(self.scale * c, model)


@dataclass
class CauchyData:
    u0: ModeField
    u1: ModeField
    source_profile: Optional[object] = None
    source_modes: Optional[ModeField] = None

    @property
    def has_source(self):
        return (self.source_profile is not None and self.source_modes is not None
                and bool(np.any(self.source_modes.coefficients != 0)))


@dataclass
class ScenarioProblem:
    coefficient: object
    data: CauchyData
    model: object
    s: float = 0.0
    specs: Optional[tuple] = None

    @property
    def horizon(self):
        return self.coefficient.horizon

    def violations(self):
        out = list(self.coefficient.violations())
        for name in ('u0', 'u1'):
            f = getattr(self.data, name)
            if f.model.modes != self.model.modes:
                out.append('{} has {} modes, model has {}'.format(name, f.model.modes, self.model.modes))
        if self.data.source_modes is not None and self.data.source_modes.model.modes != self.model.modes:
            out.append('source modes do not match the model')
        g = self.data.source_profile
        if g is not None:
            out.extend('source profile: ' + v for v in g.violations())
            if g.horizon != self.horizon:
                out.append('source profile horizon {} differs from coefficient horizon {}'
                           .format(g.horizon, self.horizon))
        return out

    def validate(self):
        problems = self.violations()
        if problems:
            raise ValidationError(problems)
        return self

    def resized(self, modes):
        """Same problem on a model with a different mode count (needs the data specs)."""
        if self.specs is None:
            raise ConfigurationError('problem was not built from data descriptors, cannot change the mode count')
        model = self.model.resized(modes)
        u0, u1, h = self.specs
        data = CauchyData(u0.resolve(model), u1.resolve(model), self.data.source_profile,
                          h.resolve(model) if h is not None else None)
        return ScenarioProblem(self.coefficient, data, model, self.s, self.specs)


def build_problem(coefficient, model, u0, u1, source_profile=None, source_modes=None, s=0.0):
    """ScenarioProblem from ModeDataSpecs, keeping the specs for mode-count changes."""
    h = source_modes if source_profile is not None else None
    data = CauchyData(u0.resolve(model), u1.resolve(model), source_profile, h.resolve(model) if h else None)
    return ScenarioProblem(coefficient, data, model, s, (u0, u1, h))


def default_report_steps(problem):
    a = problem.coefficient
    grid = np.linspace(0.0, a.horizon, 2001)
    top = float(np.max(a.smooth.value(grid))) + sum(max(j.height, 0.0) for j in a.jumps)
    beta = float(problem.model.frequencies[-1])
    return max(200, int(math.ceil(4.0 * beta * math.sqrt(max(top, 1.0)) * a.horizon)))


# ===== nets =====

@dataclass
class NetEntry:
    eps: float
    omega: float
    derivs: Optional[np.ndarray] = None
    source_values: Optional[np.ndarray] = None
    trajectories: List = field(default_factory=list)
    failure: Optional[str] = None

    @property
    def ok(self):
        return self.failure is None


@dataclass
class NetSolution:
    problem: ScenarioProblem
    mollifier: object
    schedule: object
    times: np.ndarray
    p_max: int
    entries: List[NetEntry]
    gevrey: Dict = field(default_factory=dict)

    @property
    def model(self):
        return self.problem.model

    @property
    def eps(self):
        return np.array([e.eps for e in self.entries])

    @property
    def omegas(self):
        return np.array([e.omega for e in self.entries])

    @property
    def ok_entries(self):
        return [e for e in self.entries if e.ok]

    @property
    def failures(self):
        return {e.eps: e.failure for e in self.entries if not e.ok}

    def stack(self, p):
        """∂_t^p u_eps at the report times for the solved eps, shape (n_eps, n_times, M)."""
        if p > self.p_max:
            raise ConfigurationError('net holds time derivatives up to order {}, {} requested'.format(self.p_max, p))
        return np.array([e.derivs[p] for e in self.ok_entries])

    def sobolev_series(self, p, order):
        return weighted_norm(self.stack(p), sobolev_weights(self.model, order))

    def u_norms(self):
        """||u_eps(t)|| in H^(s + nu/2), shape (n_eps, n_times)."""
        return self.sobolev_series(0, self.problem.s + self.model.nu / 2.0)

    def ut_norms(self):
        return self.sobolev_series(1, self.problem.s)

    def gevrey_series(self, eta, p, s):
        """||e^(-eta R^(1/2s)) ∂_t^p u_eps(t)||, recorded on first use."""
        key = (float(eta), int(p), float(s))
        if key not in self.gevrey:
            self.gevrey[key] = weighted_norm(self.stack(p), gevrey_weights(self.model, s, eta, sign=-1))
        return self.gevrey[key]


def _zero_trajectory(beta, times):
    zeros = np.zeros(times.size, dtype=complex)
    return ModeTrajectory(times, zeros, zeros.copy(), beta, 'none', 0.0, 0, 0, 0.0)


def _solve_eps(problem, psi, eps, omega, p_max, opts, report_steps):
    a = problem.coefficient
    T = problem.horizon
    data = problem.data
    model = problem.model
    times = np.linspace(0.0, T, report_steps + 1)
    field_a = MollifiedCoefficient(a, psi, omega)
    field_g = MollifiedCoefficient(data.source_profile, psi, omega) if data.has_source else None
    a_sampler = GridSampler(field_a, T)
    g_sampler = GridSampler(field_g, T) if field_g is not None else None
    h = data.source_modes.coefficients if data.has_source else np.zeros(model.modes, dtype=complex)
    entry = NetEntry(eps=eps, omega=omega)
    trajectories = []
    try:
        for m in range(model.modes):
            beta = float(model.frequencies[m])
            v0, v1 = data.u0.coefficients[m], data.u1.coefficients[m]
            if v0 == 0 and v1 == 0 and h[m] == 0:
                trajectories.append(_zero_trajectory(beta, times))
                continue
            trajectories.append(solve_mode(ModeProblem(beta, a_sampler, v0, v1, T, g_sampler, h[m]), opts,
                                           report_steps))
    except FatalError as e:
        logger.warning('eps=%.6g (omega=%.6g) failed: %s', eps, omega, e)
        entry.failure = str(e)
        return entry
    derivs = np.zeros((p_max + 1, times.size, model.modes), dtype=complex)
    derivs[0] = np.array([tr.v for tr in trajectories]).T
    if p_max >= 1:
        derivs[1] = np.array([tr.vt for tr in trajectories]).T
    g_rows = field_g.sample(times, max(p_max - 2, 0)).derivatives if field_g is not None else None
    if p_max >= 2:
        a_rows = field_a.sample(times, p_max - 2).derivatives
        lam = model.frequencies ** 2
        for p in range(2, p_max + 1):
            k = p - 2
            acc = np.zeros((times.size, model.modes), dtype=complex)
            for j in range(k + 1):
                acc += comb(k, j, exact=True) * a_rows[j][:, None] * derivs[k - j]
            derivs[p] = -lam[None, :] * acc
            if g_rows is not None:
                derivs[p] += g_rows[k][:, None] * h[None, :]
    entry.derivs = derivs
    entry.trajectories = trajectories
    entry.source_values = g_rows[0] if g_rows is not None else np.zeros(times.size)
    return entry


def _check_net(eps_net):
    eps = sorted({float(e) for e in eps_net}, reverse=True)
    if len(eps) < 4:
        raise DomainError('eps net needs at least 4 distinct points, got {}'.format(len(eps)))
    if not (0.0 < eps[-1] and eps[0] <= 1.0):
        raise DomainError('eps values must lie in (0, 1]')
    return eps


def solve_regularized_net(problem, psi, schedule, eps_net=DEFAULT_EPS_NET, p_max=1, opts=None, jobs=1,
                          report_steps=None):
    """
    Solve the mollified problem for every eps of the net.

    A failed eps is kept as a gap with its diagnostic; the other entries are
    unaffected.
    """
    problem.validate()
    eps = _check_net(eps_net)
    a = problem.coefficient
    g = problem.data.source_profile if problem.data.has_source else None
    atoms = list(a.atoms) + (list(g.atoms) if g is not None else [])
    top = max(p_max - 2, 0) + max([atom.order for atom in atoms], default=0)
    if top > psi.max_order:
        raise ConfigurationError('time derivatives up to order {} need mollifier derivatives of order {}, '
                                 '{} provides {}'.format(p_max, top, psi.shape, psi.max_order))
    opts = opts or IntegratorOptions()
    report_steps = report_steps or default_report_steps(problem)
    omegas = [schedule_omega(schedule, e) for e in eps]
    logger.info('solving %d modes on %d eps values (%s schedule, %s mollifier)', problem.model.modes, len(eps),
                schedule.kind, psi.shape)

    def task(i):
        return _solve_eps(problem, psi, eps[i], omegas[i], p_max, opts, report_steps)

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(task, range(len(eps))))
    else:
        entries = [task(i) for i in range(len(eps))]
    return NetSolution(problem, psi, schedule, np.linspace(0.0, problem.horizon, report_steps + 1), p_max, entries)


# ===== moderateness =====

@dataclass
class ModeratenessReport:
    eps: np.ndarray
    omegas: np.ndarray
    sups: Dict[int, np.ndarray]
    fits: Dict[int, object]
    N: float
    log_constants: Dict[int, float]
    envelope_ok: Dict[int, np.ndarray]
    verdict: str

    @property
    def moderate(self):
        return self.verdict == 'moderate'

    def rows(self):
        for p in sorted(self.sups):
            fit = self.fits[p]
            for i, e in enumerate(self.eps):
                yield (e, self.omegas[i], p, self.sups[p][i], fit.slope if not fit.degenerate else float('nan'),
                       bool(self.envelope_ok[p][i]))


def moderateness_fit(eps, sups, omegas=None, max_exponent=MAX_EXPONENT):
    """
    Per-p power-law fits of sup_t norms against 1/eps and a single exponent
    N = max_p (N_p - p) with envelopes c_p·eps^(-N-p) re-validated on the net.
    """
    eps = np.asarray(eps, dtype=float)
    scale = 1.0 / eps
    fits = {p: fit_power_law(scale, values) for p, values in sups.items()}
    exps = [fits[p].slope - p for p in fits if not fits[p].degenerate]
    N = max(exps) if exps else 0.0
    log_constants = {}
    envelope_ok = {}
    finite = True
    for p, values in sups.items():
        values = np.abs(np.asarray(values, dtype=float))
        finite = finite and bool(np.all(np.isfinite(values)))
        c = envelope_log_constant(scale, values, N + p)
        log_constants[p] = c
        with np.errstate(divide='ignore'):
            envelope_ok[p] = values <= np.exp(c + (N + p) * np.log(scale)) * (1.0 + 1e-12)
    ok = finite and math.isfinite(N) and N <= max_exponent and all(np.all(v) for v in envelope_ok.values())
    return ModeratenessReport(eps, np.asarray(omegas if omegas is not None else eps, dtype=float),
                              {p: np.asarray(v, dtype=float) for p, v in sups.items()}, fits, float(N),
                              log_constants, envelope_ok, 'moderate' if ok else 'not moderate')


def moderateness_report(net, p_max=None, max_exponent=MAX_EXPONENT):
    p_max = net.p_max if p_max is None else p_max
    if p_max > net.p_max:
        raise ConfigurationError('net holds time derivatives up to order {}, {} requested'.format(net.p_max, p_max))
    ok = net.ok_entries
    if len(ok) < 2:
        raise AnalysisError('moderateness needs at least two solved eps values, {} available'.format(len(ok)))
    sups = {p: np.max(net.sobolev_series(p, net.problem.s), axis=1) for p in range(p_max + 1)}
    report = moderateness_fit([e.eps for e in ok], sups, [e.omega for e in ok], max_exponent)
    logger.info('moderateness: N=%.4g verdict=%s', report.N, report.verdict)
    return report


@dataclass
class GevreyModeratenessReport:
    eta: Optional[float]
    s: float
    fits: Dict
    tail_slopes: Dict
    certified: Dict
    verdict: str

    def rows(self):
        for (eta, p) in sorted(self.fits):
            fit = self.fits[(eta, p)]
            yield (eta, p, fit.slope if not fit.degenerate else float('nan'), bool(self.certified[(eta, p)]))


def _tail_slope(x, amplitudes):
    """Least-squares growth rate of log amplitudes in x over the nonzero modes."""
    keep = amplitudes > 0
    if np.count_nonzero(keep) < 2:
        return -math.inf
    return float(np.polyfit(x[keep], np.log(amplitudes[keep]), 1)[0])


def gevrey_moderateness(eps, model, s, eta_grid, derivs, max_exponent=MAX_EXPONENT, tail_tol=None):
    """
    Smallest eta on the grid for which every p has a power-law envelope in
    eps for sup_t ||e^(-eta R^(1/2s)) ∂_t^p u_eps||.

    The growth rate of the weighted mode amplitudes along pi^(1/s) is always
    recorded. With a tail_tol it is also required to stay below tail_tol,
    which certifies a larger eta when the truncated modes still grow.

    :param derivs: {p: array (n_eps, n_times, M)}
    """
    if not len(eta_grid):
        raise ConfigurationError('eta grid is empty')
    eps = np.asarray(eps, dtype=float)
    x = model.frequencies ** (1.0 / s)
    fits, tails, certified = {}, {}, {}
    best = None
    for eta in sorted(float(e) for e in eta_grid):
        weights = gevrey_weights(model, s, eta, sign=-1)
        passed = True
        for p in sorted(derivs):
            arr = np.asarray(derivs[p])
            sups = np.max(weighted_norm(arr, weights), axis=1)
            fit = fit_power_law(1.0 / eps, sups)
            amp = np.max(np.abs(arr), axis=1) * np.exp(-eta * x)[None, :]
            tail = max(_tail_slope(x, row) for row in amp)
            ok = fit.degenerate or (fit.envelope_valid and fit.slope - p <= max_exponent)
            if tail_tol is not None:
                ok = ok and tail <= tail_tol
            fits[(eta, p)], tails[(eta, p)], certified[(eta, p)] = fit, tail, ok
            passed = passed and ok
        if passed and best is None:
            best = eta
    verdict = 'H_(s)^-inf-type moderate' if best is not None else 'not certified on grid'
    return GevreyModeratenessReport(best, float(s), fits, tails, certified, verdict)


def gevrey_moderateness_report(net, s, eta_grid, p_max=None, tail_tol=None):
    p_max = net.p_max if p_max is None else p_max
    if not len(eta_grid):
        raise ConfigurationError('eta grid is empty')
    for eta in eta_grid:
        for p in range(p_max + 1):
            net.gevrey_series(eta, p, s)
    derivs = {p: net.stack(p) for p in range(p_max + 1)}
    report = gevrey_moderateness([e.eps for e in net.ok_entries], net.model, s, eta_grid, derivs,
                                 tail_tol=tail_tol)
    logger.info('gevrey moderateness (s=%g): eta=%s verdict=%s', s, report.eta, report.verdict)
    return report


# ===== negligibility =====

@dataclass
class NegligibilityReport:
    eps: np.ndarray
    distances: np.ndarray
    decay_slope: Optional[float]
    verdicts: Dict[float, bool]


def negligibility_from_distances(eps, distances, ell_list, tol=ELL_TOL):
    """
    Negligible at order ell when the decay of the distances in eps stays at
    or above ell over the finest half of the net.
    """
    eps = np.asarray(eps, dtype=float)
    d = np.abs(np.asarray(distances, dtype=float))
    if not np.any(d > 0):
        return NegligibilityReport(eps, d, math.inf, {float(l): True for l in ell_list})
    fit = fit_power_law(eps, d)
    decay = fit.slope if not fit.degenerate else math.inf
    local = local_slopes(eps, d)
    tail = local[-max(2, local.size // 2):] if local.size else local
    worst = float(np.min(tail)) if tail.size else decay
    verdicts = {float(l): bool(worst >= l - tol) for l in ell_list}
    return NegligibilityReport(eps, d, decay, verdicts)


def _difference_distances(net_a, net_b):
    if not np.array_equal(net_a.eps, net_b.eps):
        raise ValidationError('nets are built on different eps values')
    if not net_a.model.same_as(net_b.model):
        raise ValidationError('nets are built on different spectral models')
    if net_a.times.shape != net_b.times.shape or not np.allclose(net_a.times, net_b.times, rtol=0, atol=1e-14):
        raise ValidationError('nets are sampled on different time grids')
    both = [i for i, (x, y) in enumerate(zip(net_a.entries, net_b.entries)) if x.ok and y.ok]
    p_top = min(net_a.p_max, net_b.p_max)
    s = net_a.problem.s
    weights = sobolev_weights(net_a.model, s)
    out = []
    for i in both:
        diff = net_a.entries[i].derivs[:p_top + 1] - net_b.entries[i].derivs[:p_top + 1]
        out.append(float(np.max(weighted_norm(diff, weights))))
    return net_a.eps[both], np.array(out)


def negligibility_test(net_a, net_b, ell_list):
    eps, d = _difference_distances(net_a, net_b)
    report = negligibility_from_distances(eps, d, ell_list)
    logger.info('negligibility: decay slope %s, verdicts %s', report.decay_slope, report.verdicts)
    return report


# ===== uniqueness =====

@dataclass
class UniquenessReport:
    eps: np.ndarray
    coefficient_differences: np.ndarray
    solution_differences: np.ndarray
    coefficient_decay: Optional[float]
    solution_decay: Optional[float]
    moderateness_loss: float
    evidence: Optional[bool]
    label: str
    negligibility: NegligibilityReport

    def rows(self):
        for row in zip(self.eps, self.coefficient_differences, self.solution_differences):
            yield row


def _decay(eps, values):
    if not np.any(np.asarray(values) > 0):
        return None
    fit = fit_power_law(eps, values)
    return None if fit.degenerate else fit.slope


def uniqueness_experiment(problem, psi1, psi2, schedule, eps_net=DEFAULT_EPS_NET, ell_list=(1.0,), p_max=1,
                          opts=None, jobs=1, report_steps=None):
    """
    Solve the net with two mollifiers and compare coefficient and solution
    differences. For distributional coefficients the decay is recorded
    without a verdict.
    """
    report_steps = report_steps or default_report_steps(problem)
    net1 = solve_regularized_net(problem, psi1, schedule, eps_net, p_max, opts, jobs, report_steps)
    net2 = solve_regularized_net(problem, psi2, schedule, eps_net, p_max, opts, jobs, report_steps)
    a = problem.coefficient
    s = problem.s
    nu = problem.model.nu
    eps, coef, sol = [], [], []
    w_u = sobolev_weights(problem.model, s + nu / 2.0)
    w_ut = sobolev_weights(problem.model, s)
    for e1, e2 in zip(net1.entries, net2.entries):
        if not (e1.ok and e2.ok):
            continue
        grid = np.linspace(0.0, a.horizon, max(2001, int(math.ceil(20.0 * a.horizon / e1.omega)) + 1))
        d_a = MollifiedCoefficient(a, psi1, e1.omega).sample(grid).values - \
            MollifiedCoefficient(a, psi2, e2.omega).sample(grid).values
        diff = e1.derivs - e2.derivs
        eps.append(e1.eps)
        coef.append(float(np.max(np.abs(d_a))))
        sol.append(float(np.max(weighted_norm(diff[0], w_u) + weighted_norm(diff[1], w_ut))))
    if len(eps) < 2:
        raise AnalysisError('uniqueness needs at least two eps values solved by both mollifiers')
    eps, coef, sol = np.array(eps), np.array(coef), np.array(sol)
    coef_decay, sol_decay = _decay(eps, coef), _decay(eps, sol)
    loss = moderateness_report(net1).N
    if not a.is_regular:
        evidence, label = None, 'distributional coefficient: decay recorded without verdict'
    elif sol_decay is None:
        evidence, label = True, 'identical nets'
    else:
        evidence = bool(sol_decay >= (coef_decay if coef_decay is not None else 0.0) - loss)
        label = 'empirical Colombeau-equivalence evidence'
    return UniquenessReport(eps, coef, sol, coef_decay, sol_decay, loss, evidence, label,
                            negligibility_test(net1, net2, ell_list))


# ===== consistency =====

@dataclass
class ConsistencyReport:
    eps: np.ndarray
    err_CH: np.ndarray
    err_C1H: np.ndarray
    slope: Optional[float]
    floor: float
    threshold: float
    monotone: bool
    verdict: str

    @property
    def errors(self):
        return self.err_CH + self.err_C1H

    @property
    def consistent(self):
        return self.verdict == 'consistent'

    def rows(self):
        return zip(self.eps, self.err_CH, self.err_C1H)


def classical_solution(problem, opts=None, report_steps=None):
    """Classical solution per mode for a regular coefficient, shape (2, n_times, M)."""
    a = problem.coefficient
    if not a.is_regular:
        raise ConfigurationError('coefficient is not regular; use the existence pipeline '
                                 '(solve_regularized_net and moderateness_report)')
    data = problem.data
    if data.has_source and not data.source_profile.is_regular:
        raise ConfigurationError('source profile is not regular; use the existence pipeline')
    report_steps = report_steps or default_report_steps(problem)
    T = problem.horizon
    exact_a = GridSampler(ExactCoefficient(a), T)
    exact_g = GridSampler(ExactCoefficient(data.source_profile), T) if data.has_source else None
    h = data.source_modes.coefficients if data.has_source else np.zeros(problem.model.modes, dtype=complex)
    times = np.linspace(0.0, T, report_steps + 1)
    out = np.zeros((2, times.size, problem.model.modes), dtype=complex)
    for m, beta in enumerate(problem.model.frequencies):
        v0, v1 = data.u0.coefficients[m], data.u1.coefficients[m]
        if v0 == 0 and v1 == 0 and h[m] == 0:
            continue
        tr = classical_reference(ModeProblem(float(beta), exact_a, v0, v1, T, exact_g, h[m]), opts, report_steps)
        out[0, :, m] = tr.v
        out[1, :, m] = tr.vt
    return out


def consistency_experiment(problem, psi, schedule, eps_net=DEFAULT_EPS_NET, threshold=1e-3, opts=None, jobs=1,
                           report_steps=None, gevrey=None):
    """
    Errors sup_t ||u_eps - u|| in H^(s+nu/2) and sup_t ||∂_t(u_eps - u)|| in H^s
    against the classical solution. With gevrey=(s_g, eta) both errors use the
    weight e^(eta R^(1/2 s_g)) instead.
    """
    opts = opts or IntegratorOptions()
    report_steps = report_steps or default_report_steps(problem)
    reference = classical_solution(problem, opts, report_steps)
    net = solve_regularized_net(problem, psi, schedule, eps_net, 1, opts, jobs, report_steps)
    model = problem.model
    if gevrey is not None:
        w_u = w_ut = gevrey_weights(model, gevrey[0], gevrey[1], sign=1)
    else:
        w_u = sobolev_weights(model, problem.s + model.nu / 2.0)
        w_ut = sobolev_weights(model, problem.s)
    ok = net.ok_entries
    if len(ok) < 2:
        raise AnalysisError('consistency needs at least two solved eps values')
    err_u = np.array([float(np.max(weighted_norm(e.derivs[0] - reference[0], w_u))) for e in ok])
    err_ut = np.array([float(np.max(weighted_norm(e.derivs[1] - reference[1], w_ut))) for e in ok])
    scale = max(float(np.max(weighted_norm(reference[0], w_u))), float(np.max(weighted_norm(reference[1], w_ut))),
                1.0)
    floor = 100.0 * opts.rtol * scale
    total = err_u + err_ut
    above = total > floor
    monotone = all(total[i + 1] <= (1.0 + MONOTONE_TOL) * total[i]
                   for i in range(total.size - 1) if above[i] and above[i + 1])
    slope = None
    if np.count_nonzero(above) >= 2:
        fit = fit_power_law(np.array([e.eps for e in ok])[above], total[above])
        slope = fit.slope
    final_ok = total[-1] <= threshold
    verdict = 'consistent' if monotone and final_ok else 'not consistent'
    logger.info('consistency: final error %.3e, slope %s, verdict %s', total[-1], slope, verdict)
    return ConsistencyReport(np.array([e.eps for e in ok]), err_u, err_ut, slope, floor, threshold, monotone, verdict)


# ===== regimes =====

@dataclass(frozen=True)
class CoefficientClass:
    kind: str
    alpha: Optional[float] = None
    ell: Optional[float] = None


@dataclass(frozen=True)
class RegimeRecord:
    regime: str
    kind: str
    space: str
    s_lower: float
    s_upper: float
    description: str

    def admits(self, s):
        return self.s_lower <= s < self.s_upper

    def constraint(self):
        if math.isinf(self.s_upper):
            return 'any s'
        return '{:g} <= s < {:g}'.format(self.s_lower, self.s_upper)


SOBOLEV_SPACE = 'Sobolev pair H^(s+nu/2) x H^s'
GEVREY_SPACE = 'Gevrey / ultradistribution pair (Roumieu G^s, H_s^-inf)'


def regime_advisor(cls):
    """Well-posedness space and admissible s for one of the four coefficient classes."""
    kind = cls.kind
    if kind == 'lipschitz-positive':
        return RegimeRecord('i', kind, SOBOLEV_SPACE, -math.inf, math.inf,
                            'a Lipschitz with a >= a0 > 0')
    if kind == 'holder-positive':
        alpha = cls.alpha
        if alpha is None or not 0.0 < alpha < 1.0:
            raise DomainError('holder-positive needs 0 < alpha < 1, got {}'.format(alpha))
        return RegimeRecord('ii', kind, GEVREY_SPACE, 1.0, 1.0 + alpha / (1.0 - alpha),
                            'a in C^alpha (alpha={:g}) with a >= a0 > 0'.format(alpha))
    if kind == 'smooth-degenerate':
        ell = cls.ell
        if ell is None or not ell >= 2:
            raise DomainError('smooth-degenerate needs ell >= 2, got {}'.format(ell))
        return RegimeRecord('iii', kind, GEVREY_SPACE, 1.0, 1.0 + ell / 2.0,
                            'a in C^ell (ell={:g}) with a >= 0'.format(ell))
    if kind == 'holder-degenerate':
        alpha = cls.alpha
        if alpha is None or not 0.0 < alpha < 2.0:
            raise DomainError('holder-degenerate needs 0 < alpha < 2, got {}'.format(alpha))
        return RegimeRecord('iv', kind, GEVREY_SPACE, 1.0, 1.0 + alpha / 2.0,
                            'a in C^alpha (alpha={:g}) with a >= 0'.format(alpha))
    raise ConfigurationError('unknown coefficient class {!r}; the regimes are: {}'.format(kind, '; '.join(
        '{} ({})'.format(k, d) for k, d in zip(REGIME_CLASSES, (
            'Lipschitz, a >= a0 > 0', 'C^alpha 0<alpha<1, a >= a0 > 0', 'C^ell ell>=2, a >= 0',
            'C^alpha 0<alpha<2, a >= 0')))))


def regime_table():
    """Generic statements of the four regimes, for display."""
    return [
        ('i', 'lipschitz-positive', SOBOLEV_SPACE, 'any s'),
        ('ii', 'holder-positive', GEVREY_SPACE, '1 <= s < 1 + alpha/(1 - alpha), 0 < alpha < 1'),
        ('iii', 'smooth-degenerate', GEVREY_SPACE, '1 <= s < 1 + ell/2, ell >= 2'),
        ('iv', 'holder-degenerate', GEVREY_SPACE, '1 <= s < 1 + alpha/2, 0 < alpha < 2'),
    ]


# ===== Gevrey amplification =====

@dataclass
class AmplificationReport:
    s: float
    betas: np.ndarray
    amplification: np.ndarray
    ratios: np.ndarray
    K_prime: float
    log_constant: float
    bounded: bool
    factor: float
    admissible: Optional[bool]

    def rows(self):
        return zip(self.betas, self.amplification, self.ratios)


def gevrey_amplification_scan(a, regime, s, beta_list, v0=1.0, v1=0.0, opts=None, factor=10.0):
    """
    A(beta) = sup_t (|beta v|^2 + |v'|^2) / (|beta v0|^2 + |v1|^2) with f = 0,
    fitted as log A <= log C + K'·beta^(1/s).
    """
    if s < 1:
        raise DomainError('Gevrey order s must be >= 1, got {}'.format(s))
    betas = np.array(sorted(float(b) for b in beta_list))
    if betas.size < 2 or betas[0] <= 0 or betas[-1] / betas[0] < 100.0:
        raise DomainError('beta list must be positive and span at least 2 decades')
    if v0 == 0 and v1 == 0:
        raise DomainError('amplification is undefined for zero initial data')
    admissible = None
    if regime is not None:
        record = regime if isinstance(regime, RegimeRecord) else regime_advisor(regime)
        admissible = record.admits(s)
        if not admissible:
            logger.warning('s=%g is outside the admissible range %s of regime %s', s, record.constraint(),
                           record.regime)
    opts = opts or IntegratorOptions(rtol=1e-8)
    sampler = GridSampler(ExactCoefficient(a), a.horizon)
    amp = np.empty(betas.size)
    for i, beta in enumerate(betas):
        tr = solve_mode(ModeProblem(beta, sampler, v0, v1, a.horizon), opts)
        amp[i] = float(np.max(tr.state_sq)) / (abs(beta * v0) ** 2 + abs(v1) ** 2)
    y = np.maximum(np.log(amp), 0.0)
    x = betas ** (1.0 / s)
    ratios = y / x
    if float(np.max(y)) <= 1e-6:
        return AmplificationReport(float(s), betas, amp, ratios, 0.0, float(np.max(y)), True, factor, admissible)
    slope, intercept = np.polyfit(x, y, 1)
    K = max(float(slope), 0.0)
    log_c = float(np.max(y - K * x))
    median = float(np.median(ratios))
    bounded = bool(median > 0 and np.max(ratios) <= factor * median)
    logger.info('amplification scan s=%g: K\'=%.4g bounded=%s', s, K, bounded)
    return AmplificationReport(float(s), betas, amp, ratios, K, log_c, bounded, factor, admissible)


# ===== energy inequality =====

@dataclass
class AuditReport:
    eps: np.ndarray
    c_emp: np.ndarray
    solver_bug: bool
    stability_ratio: Optional[float] = None

    @property
    def C_emp(self):
        return float(np.max(self.c_emp)) if self.c_emp.size else 0.0

    @property
    def stable(self):
        return self.stability_ratio is None or 0.5 <= self.stability_ratio <= 2.0

    def rows(self):
        return zip(self.eps, self.c_emp)


def _audit_constants(net):
    problem = net.problem
    model = problem.model
    s = problem.s
    data = problem.data
    rhs0 = (sobolev_weights(model, s + model.nu / 2.0) * np.abs(data.u0.coefficients) ** 2).sum() + \
        (sobolev_weights(model, s) * np.abs(data.u1.coefficients) ** 2).sum()
    h_sq = (sobolev_weights(model, s) * np.abs(data.source_modes.coefficients) ** 2).sum() if data.has_source else 0.0
    c_emp, bug = [], False
    for e in net.ok_entries:
        lhs = net_entry_energy(net, e)
        rhs = float(rhs0 + float(np.max(np.abs(e.source_values))) ** 2 * h_sq)
        if rhs == 0.0:
            if float(np.max(lhs)) > 0.0:
                bug = True
                c_emp.append(math.inf)
            else:
                c_emp.append(0.0)
        else:
            c_emp.append(float(np.max(lhs)) / rhs)
    return np.array([e.eps for e in net.ok_entries]), np.array(c_emp), bug


def net_entry_energy(net, entry):
    model = net.model
    s = net.problem.s
    return (weighted_norm(entry.derivs[0], sobolev_weights(model, s + model.nu / 2.0)) ** 2
            + weighted_norm(entry.derivs[1], sobolev_weights(model, s)) ** 2)


def energy_inequality_audit(net, second=None):
    """
    C_emp = sup_t LHS(t)/RHS per eps with LHS = ||u||^2_(s+nu/2) + ||u_t||^2_s and
    RHS = ||u0||^2_(s+nu/2) + ||u1||^2_s + ||f||^2_(C H^s); `second` is the same
    problem on another mode count for the stability ratio.
    """
    a = net.problem.coefficient
    if not (a.is_regular and a.floor > 0):
        raise ConfigurationError('energy inequality audit needs the Lipschitz-positive regime '
                                 '(regular coefficient with floor a0 > 0)')
    eps, c_emp, bug = _audit_constants(net)
    if bug:
        logger.error('nonzero solution from zero data and source: solver bug')
    ratio = None
    if second is not None:
        _, c2, bug2 = _audit_constants(second)
        bug = bug or bug2
        base = float(np.max(c_emp)) if c_emp.size else 0.0
        if base > 0:
            ratio = float(np.max(c2)) / base
    return AuditReport(eps, c_emp, bug, ratio)
