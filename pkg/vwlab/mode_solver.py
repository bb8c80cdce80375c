"""
Per-mode integration of v'' + beta^2·a(t)·v = g(t)·h and the energy checks on
the first-order state V = (i·beta·v, v').

The equation is linear, so every integrator step is a 3x3 real propagator
acting on (v, v', h). Step matrices for the whole grid are built at once,
multiplied segment by segment up to the report times and applied in a short
sequential pass. The fine grid has n = 2R·2^j steps for R report intervals;
the coefficient is sampled at half steps, and the solution on the grid with
n/2 steps reuses every other sample for the Richardson error estimate.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import ConfigurationError, DomainError, SolverError

logger = logging.getLogger(__name__)

METHODS = {'rk4': 4, 'verlet': 2}

_MAX_MATRIX_ENTRIES = 4_000_000


@dataclass(frozen=True)
class IntegratorOptions:
    method: str = 'rk4'
    rtol: float = 1e-10
    safety: float = 0.1
    max_steps: int = 200_000
    report_steps: Optional[int] = None
    base_step: Optional[float] = None

    def tightened(self, factor=10.0):
        return IntegratorOptions(self.method, self.rtol / factor, self.safety, self.max_steps, self.report_steps,
                                 self.base_step)


@dataclass
class ModeProblem:
    beta: float
    coefficient: object
    v0: complex
    v1: complex
    horizon: float
    source: Optional[object] = None
    source_amplitude: complex = 1.0
    direction: int = 1


@dataclass
class ModeTrajectory:
    times: np.ndarray
    v: np.ndarray
    vt: np.ndarray
    beta: float
    method: str
    step: float
    steps: int
    rejected: int
    error_estimate: float

    @property
    def V1(self):
        return 1j * self.beta * self.v

    @property
    def V2(self):
        return self.vt

    @property
    def state_sq(self):
        return np.abs(self.V1) ** 2 + np.abs(self.V2) ** 2


class GridSampler:
    """
    Half-step samples of a coefficient field on [0, T], cached by step count.
    A grid with n steps reuses the samples of any cached finer grid.
    """

    def __init__(self, coefficient, horizon):
        self.coefficient = coefficient
        self.horizon = horizon
        self._cache = {}

    def samples(self, steps):
        for n, values in self._cache.items():
            if n >= steps and n % steps == 0:
                return values[::n // steps]
        t = np.linspace(0.0, self.horizon, 2 * steps + 1)
        values = self.coefficient.sample(t, 0).values
        self._cache = {n: v for n, v in self._cache.items() if n > steps}
        self._cache[steps] = values
        return values


def _sampler(obj, horizon):
    if obj is None or isinstance(obj, GridSampler):
        return obj
    return GridSampler(obj, horizon)


def _step_matrices(method, h, beta, a0, ah, a1, g0, gh, g1):
    """Propagators of one step for every step on the grid, shape (n, 3, 3)."""
    n = a0.size

    def generator(a, g):
        L = np.zeros((n, 3, 3))
        L[:, 0, 1] = 1.0
        L[:, 1, 0] = -beta * beta * a
        L[:, 1, 2] = g
        return h * L

    eye = np.eye(3)
    if method == 'rk4':
        A0, A1, A2 = generator(a0, g0), generator(ah, gh), generator(a1, g1)
        K1 = A0
        K2 = A1 @ (eye + K1 / 2.0)
        K3 = A1 @ (eye + K2 / 2.0)
        K4 = A2 @ (eye + K3)
        return eye + (K1 + 2.0 * K2 + 2.0 * K3 + K4) / 6.0
    # velocity Verlet: half kick, drift, half kick
    kick0 = np.tile(eye, (n, 1, 1))
    kick0[:, 1, 0] = -0.5 * h * beta * beta * a0
    kick0[:, 1, 2] = 0.5 * h * g0
    drift = np.tile(eye, (n, 1, 1))
    drift[:, 0, 1] = h
    kick1 = np.tile(eye, (n, 1, 1))
    kick1[:, 1, 0] = -0.5 * h * beta * beta * a1
    kick1[:, 1, 2] = 0.5 * h * g1
    return kick1 @ drift @ kick0


def _propagate(method, beta, a_half, g_half, steps, segments, y0, horizon, direction):
    """States at the segments+1 report times for a grid with `steps` steps."""
    if direction < 0:
        a_half = a_half[::-1]
        g_half = g_half[::-1]
    h = direction * horizon / steps
    per_segment = steps // segments
    Q = np.tile(np.eye(3), (segments, 1, 1))
    block = max(1, _MAX_MATRIX_ENTRIES // (9 * segments))
    for start in range(0, per_segment, block):
        stop = min(per_segment, start + block)
        # step j of every segment sits at index r*per_segment + j
        idx = (np.arange(segments)[:, None] * per_segment + np.arange(start, stop)[None, :]).ravel()
        P = _step_matrices(method, h, beta, a_half[2 * idx], a_half[2 * idx + 1], a_half[2 * idx + 2],
                           g_half[2 * idx], g_half[2 * idx + 1], g_half[2 * idx + 2])
        P = P.reshape(segments, stop - start, 3, 3)
        for j in range(stop - start):
            Q = P[:, j] @ Q
    states = np.empty((segments + 1, 3), dtype=complex)
    states[0] = y0
    for r in range(segments):
        states[r + 1] = Q[r] @ states[r]
    return states


def _default_report_steps(beta, a_max, horizon):
    return max(200, int(math.ceil(4.0 * beta * math.sqrt(max(a_max, 0.0)) * horizon)))


def solve_mode(problem, opts=None, report_steps=None):
    """
    Integrate one mode on [0, T] (or from T back to 0 when direction < 0).

    :param problem: ModeProblem; coefficient and source are fields with a
        sample(t, k_max) method or GridSamplers around them
    :param opts: IntegratorOptions
    :param report_steps: number of report intervals; overrides opts
    :return: ModeTrajectory at the report times
    :raises SolverError: when the grid needed for opts.rtol exceeds opts.max_steps
    """
    opts = opts or IntegratorOptions()
    if opts.method not in METHODS:
        raise ConfigurationError('unknown integrator {!r}, expected one of {}'.format(opts.method, ', '.join(METHODS)))
    beta = float(problem.beta)
    if not beta > 0:
        raise DomainError('mode frequency beta must be positive, got {}'.format(beta))
    T = float(problem.horizon)
    a_sampler = _sampler(problem.coefficient, T)
    g_sampler = _sampler(problem.source, T)
    coarse_a = a_sampler.samples(64)
    if not np.all(np.isfinite(coarse_a)):
        raise DomainError('coefficient is not finite on the grid')
    a_max = float(np.max(coarse_a))
    segments = report_steps or opts.report_steps or _default_report_steps(beta, a_max, T)
    ceiling = opts.safety / (beta * max(math.sqrt(max(a_max, 0.0)), 1.0))
    resolution = getattr(a_sampler.coefficient, 'resolution_scale', math.inf)
    ceiling = min(ceiling, resolution / 8.0)
    if opts.base_step:
        ceiling = min(ceiling, opts.base_step)
    order = METHODS[opts.method]
    y0 = np.array([problem.v0, problem.v1, problem.source_amplitude if g_sampler else 0.0], dtype=complex)

    def run(steps):
        a_half = a_sampler.samples(steps)
        g_half = g_sampler.samples(steps) if g_sampler else np.zeros_like(a_half)
        return _propagate(opts.method, beta, a_half, g_half, steps, segments, y0, T, problem.direction)

    steps = 2 * segments
    while T / steps > ceiling:
        steps *= 2
    a_max = max(a_max, float(np.max(a_sampler.samples(steps))))
    while T / steps > opts.safety / (beta * max(math.sqrt(a_max), 1.0)):
        steps *= 2
    if steps > opts.max_steps:
        raise SolverError(beta, T / steps, steps)
    rejected = 0
    coarse = run(steps // 2)
    fine = run(steps)
    while True:
        if coarse is None:
            coarse = run(steps // 2)
        diff = np.abs(1j * beta * (fine[:, 0] - coarse[:, 0])) + np.abs(fine[:, 1] - coarse[:, 1])
        scale = float(np.max(np.abs(1j * beta * fine[:, 0]) + np.abs(fine[:, 1])))
        err = float(np.max(diff)) / (2 ** order - 1) / scale if scale > 0 else 0.0
        if err <= opts.rtol:
            break
        rejected += 1
        h_new = 0.9 * (T / steps) * (opts.rtol / err) ** (1.0 / order)
        target = steps
        while T / target > h_new:
            target *= 2
        logger.debug('beta=%.6g: error %.3e at %d steps, retrying with %d', beta, err, steps, target)
        if target > opts.max_steps:
            raise SolverError(beta, T / steps, steps)
        coarse = fine if target == 2 * steps else None
        steps = target
        fine = run(steps)
    times = np.linspace(0.0, T, segments + 1)
    if problem.direction < 0:
        times = times[::-1]
    return ModeTrajectory(times=times, v=fine[:, 0].copy(), vt=fine[:, 1].copy(), beta=beta, method=opts.method,
                          step=T / steps, steps=steps, rejected=rejected, error_estimate=err)


def classical_reference(problem, opts=None, report_steps=None):
    """Trajectory for an exact smooth coefficient at a tenfold tighter tolerance."""
    from .rough_coefficients import ExactCoefficient
    coefficient = problem.coefficient
    if isinstance(coefficient, GridSampler):
        coefficient = coefficient.coefficient
    if not isinstance(coefficient, ExactCoefficient):
        raise ConfigurationError('classical reference needs an exact analytic coefficient')
    opts = (opts or IntegratorOptions()).tightened(10.0)
    return solve_mode(problem, opts, report_steps)


# ===== energies =====

def _coefficient_on(traj, a, k_max=1):
    if hasattr(a, 't') and a.t.shape == traj.times.shape and np.allclose(a.t, traj.times, rtol=0, atol=1e-14):
        return a
    t = np.sort(traj.times)
    k = min(k_max, getattr(a, 'max_order', k_max))
    sampled = a.sample(t, int(k))
    if traj.times[0] > traj.times[-1]:
        sampled.t = sampled.t[::-1]
        sampled.derivatives = sampled.derivatives[:, ::-1]
    return sampled


@dataclass
class EnergyTrace:
    times: np.ndarray
    E: np.ndarray
    a: np.ndarray
    a0: float
    a1: float
    c0: float
    c1: float
    sup_S: float
    sup_St: float
    K: float
    C1: float
    C2: float
    beta: float


def energy_constants(a_values, a_derivative):
    a0 = float(np.min(a_values))
    a1 = float(np.max(a_values))
    c0 = 2.0 * min(a0, 1.0)
    c1 = 2.0 * max(a1, 1.0)
    sup_S = 2.0 * max(float(np.max(np.abs(a_values))), 1.0)
    sup_St = 2.0 * float(np.max(np.abs(a_derivative)))
    K = max(sup_St + 1.0, sup_S ** 2)
    C1 = K * max(1.0, 1.0 / c0) if c0 > 0 else math.inf
    return a0, a1, c0, c1, sup_S, sup_St, K, C1, K


def energy_trace(traj, a):
    """E = 2a|i·beta·v|^2 + 2|v'|^2 and the constants of the two-sided and Gronwall bounds."""
    a = _coefficient_on(traj, a)
    values = a.values
    deriv = a.derivative_or_gradient(1)
    E = 2.0 * values * np.abs(traj.V1) ** 2 + 2.0 * np.abs(traj.V2) ** 2
    a0, a1, c0, c1, sup_S, sup_St, K, C1, C2 = energy_constants(values, deriv)
    return EnergyTrace(times=traj.times, E=E, a=values, a0=a0, a1=a1, c0=c0, c1=c1, sup_S=sup_S, sup_St=sup_St,
                       K=K, C1=C1, C2=C2, beta=traj.beta)


@dataclass(frozen=True)
class BoundViolation:
    index: int
    time: float
    kind: str
    excess: float


BOUND_SLACK = 1e-12


def check_energy_bounds(tr, traj, slack=BOUND_SLACK):
    """Grid points where c0|V|^2 <= E <= c1|V|^2 fails beyond a relative slack."""
    if not tr.a0 > 0:
        raise DomainError('coefficient floor {:.3g} is not positive; the symmetriser bound does not apply, '
                          'use quasi_energy_trace'.format(tr.a0))
    vsq = traj.state_sq
    out = []
    for i in range(tr.E.size):
        tol = slack * max(tr.E[i], tr.c1 * vsq[i], 1e-300)
        lower = tr.c0 * vsq[i] - tr.E[i]
        upper = tr.E[i] - tr.c1 * vsq[i]
        if lower > tol:
            out.append(BoundViolation(i, float(tr.times[i]), 'lower', float(lower)))
        if upper > tol:
            out.append(BoundViolation(i, float(tr.times[i]), 'upper', float(upper)))
    return out


@dataclass
class GronwallReport:
    envelope: np.ndarray
    margin: np.ndarray
    worst_margin: float
    envelope_holds: bool
    differential_holds: bool
    differential_violations: List[int]
    slack: np.ndarray
    max_slack_ratio: float
    C1: float
    C2: float
    C1_empirical: float

    @property
    def holds(self):
        return self.envelope_holds and self.differential_holds


def _trapezoid_check(times, E, R, rate_source):
    """
    Integrated differential inequality E_{i+1} - E_i <= ∫ R over each step,
    with the trapezoid error estimated from second differences of R.
    """
    dt = np.abs(np.diff(times))
    rhs = dt * (R[:-1] + R[1:]) / 2.0
    second = np.zeros_like(R)
    if R.size >= 3:
        second[1:-1] = np.abs(R[2:] - 2.0 * R[1:-1] + R[:-2])
        second[0], second[-1] = second[1], second[-2]
    slack = dt / 12.0 * np.maximum(second[:-1], second[1:]) + BOUND_SLACK * np.maximum(E[:-1], E[1:])
    lhs = E[1:] - E[:-1]
    excess = np.maximum(lhs - rhs, 0.0)
    bad = [int(i) for i in np.nonzero(excess > slack)[0]]
    mean_e = (E[:-1] + E[1:]) / 2.0
    with np.errstate(divide='ignore', invalid='ignore'):
        rates = np.where(mean_e > 0, (lhs / dt - rate_source) / mean_e, 0.0)
    return bad, slack, excess, float(max(0.0, np.max(rates, initial=0.0)))


def gronwall_envelope(tr, F=None):
    """
    Check E_t <= C1·E + C2|F|^2 step by step and E(t) <= e^(C1 t)(E(0) + C2 ∫|F|^2) pointwise.

    :param F: source samples F(t_i) = g(t_i)·h on the trace times, or None
    """
    if not math.isfinite(tr.C1):
        raise DomainError('Gronwall constants need a positive coefficient floor; use quasi_energy_trace')
    F2 = np.zeros_like(tr.E) if F is None else np.abs(np.asarray(F)) ** 2
    t = np.abs(tr.times - tr.times[0])
    growth = np.exp(tr.C1 * t)
    integral = cumulative_trapezoid(F2, t, initial=0.0)
    envelope = growth * (tr.E[0] + tr.C2 * integral)
    margin = envelope - tr.E
    envelope_ok = bool(np.all(margin >= -BOUND_SLACK * np.maximum(envelope, 1e-300)))
    R = tr.C1 * tr.E + tr.C2 * F2
    bad, slack, excess, rate = _trapezoid_check(tr.times, tr.E, R, tr.C2 * (F2[:-1] + F2[1:]) / 2.0)
    base = tr.E[0] if tr.E[0] > 0 else max(float(np.max(envelope)), 1e-300)
    # slack actually used by each step, relative to E(0)·e^(C1 t)
    ratio = float(np.max(excess / (base * growth[1:]), initial=0.0))
    worst = float(np.min(margin[1:])) if margin.size > 1 else 0.0
    return GronwallReport(envelope=envelope, margin=margin, worst_margin=worst, envelope_holds=envelope_ok,
                          differential_holds=not bad, differential_violations=bad, slack=slack,
                          max_slack_ratio=ratio, C1=tr.C1, C2=tr.C2, C1_empirical=rate)


@dataclass
class QuasiEnergyTrace:
    delta: float
    times: np.ndarray
    E_delta: np.ndarray
    K_delta: float
    K_empirical: float
    differential_holds: bool
    differential_violations: List[int]
    positive: bool


def quasi_energy_trace(traj, a, delta, F=None):
    """
    E_delta = (a + delta^2)|V1|^2 + |V2|^2 and the step check of
    E_delta' <= K_delta·E_delta + |F|^2 with
    K_delta = sup|a'| / min(delta^2, 1) + beta·delta + 1 (the last term only with a source).
    """
    if not delta > 0:
        raise DomainError('quasi-symmetriser needs delta > 0, got {}'.format(delta))
    a = _coefficient_on(traj, a)
    values = a.values
    deriv = a.derivative_or_gradient(1)
    E = (values + delta ** 2) * np.abs(traj.V1) ** 2 + np.abs(traj.V2) ** 2
    F2 = np.zeros_like(E) if F is None else np.abs(np.asarray(F)) ** 2
    has_source = bool(np.any(F2 > 0))
    K = float(np.max(np.abs(deriv))) / min(delta ** 2, 1.0) + traj.beta * delta + (1.0 if has_source else 0.0)
    R = K * E + F2
    bad, _, _, rate = _trapezoid_check(traj.times, E, R, (F2[:-1] + F2[1:]) / 2.0)
    nonzero = traj.state_sq > 0
    positive = bool(np.all(E[nonzero] > 0))
    return QuasiEnergyTrace(delta=delta, times=traj.times, E_delta=E, K_delta=K, K_empirical=rate,
                            differential_holds=not bad, differential_violations=bad, positive=positive)


@dataclass
class EnergyReport:
    trace: Optional[EnergyTrace] = None
    violations: List[BoundViolation] = field(default_factory=list)
    gronwall: Optional[GronwallReport] = None
    quasi: Optional[QuasiEnergyTrace] = None

    @property
    def holds(self):
        if self.quasi is not None:
            return self.quasi.differential_holds and self.quasi.positive
        return not self.violations and self.gronwall.holds


def energy_report(traj, a, omega=None, F=None):
    """Symmetriser checks for positive speeds, quasi-symmetriser otherwise with delta = max(omega, 1e-3)."""
    tr = energy_trace(traj, a)
    if tr.a0 > 0:
        return EnergyReport(trace=tr, violations=check_energy_bounds(tr, traj), gronwall=gronwall_envelope(tr, F))
    delta = max(omega or 0.0, 1e-3)
    logger.debug('coefficient floor %.3g <= 0, switching to quasi-symmetriser with delta=%g', tr.a0, delta)
    return EnergyReport(trace=tr, quasi=quasi_energy_trace(traj, a, delta, F))


def symmetriser_residual(a):
    """max |S A - A^T S| for S = diag(2a, 2), A = [[0, 1], [a, 0]] over the samples a."""
    a = np.asarray(a, dtype=float).ravel()
    S = np.zeros((a.size, 2, 2))
    S[:, 0, 0] = 2.0 * a
    S[:, 1, 1] = 2.0
    A = np.zeros((a.size, 2, 2))
    A[:, 0, 1] = 1.0
    A[:, 1, 0] = a
    return float(np.max(np.abs(S @ A - np.swapaxes(A, 1, 2) @ S), initial=0.0))


def export_trajectory(traj, path, energy=None, quasi=None):
    header = ['t', 're_v', 'im_v', 're_vt', 'im_vt', 'E'] + (['E_delta'] if quasi is not None else [])
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for i, t in enumerate(traj.times):
            row = [t, traj.v[i].real, traj.v[i].imag, traj.vt[i].real, traj.vt[i].imag,
                   energy.E[i] if energy is not None else float('nan')]
            if quasi is not None:
                row.append(quasi.E_delta[i])
            writer.writerow([repr(float(x)) for x in row])
    return path
