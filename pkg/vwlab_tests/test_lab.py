#!/usr/bin/env python3
"""
Lab tests: eps-net solves, moderateness and negligibility, consistency and
uniqueness experiments, regime advisor, Gevrey amplification scans and the
energy inequality audit.

The tests named *acceptance* reproduce the desk-scale acceptance runs and
take up to a few minutes; deselect them with -m "not slow".

Usage:
    pytest vwlab_tests/test_lab.py -v
    pytest vwlab_tests/test_lab.py -m "not slow"
"""

import logging
import math

import numpy as np
import pytest

from vwlab.errors import ConfigurationError, DomainError, ValidationError
from vwlab.lab import (CoefficientClass, ModeDataSpec, NetEntry, NetSolution, build_problem, consistency_experiment,
                       energy_inequality_audit, gevrey_amplification_scan, gevrey_moderateness,
                       gevrey_moderateness_report, moderateness_fit, moderateness_report, negligibility_from_distances,
                       negligibility_test, regime_advisor, regime_table, solve_regularized_net, uniqueness_experiment)
from vwlab.mode_solver import IntegratorOptions
from vwlab.rough_coefficients import (Atom, Jump, RoughCoefficient, SmoothPart, constant_coefficient, make_mollifier,
                                      make_schedule)
from vwlab.spectral_model import build_model, sobolev_weights

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

SHORT_NET = [0.5, 0.25, 0.125, 0.0625]
WIDE_NET = [2.0 ** -j for j in range(2, 11)]
AMPLIFICATION_BETAS = [1, 2, 3, 5, 7, 10, 20, 50, 100, 200, 500]

EXP_DECAY = ModeDataSpec('exp-decay')
ZERO = ModeDataSpec('zero')


def affine():
    return RoughCoefficient(SmoothPart('affine', c0=1.0, c1=0.5), 1.0, floor=1.0, name='1+t/2')


def dirac():
    return RoughCoefficient(SmoothPart('constant', c0=1.0), 1.0, atoms=(Atom(0.5, 1.0),), floor=1.0,
                            name='1+delta')


def problem_for(a, modes=8, u0=EXP_DECAY, u1=ZERO, **kwargs):
    return build_problem(a, build_model('power', modes, 2.0), u0, u1, **kwargs)


@pytest.fixture(scope="module")
def bump():
    return make_mollifier('bump')


@pytest.fixture(scope="module")
def cosine2():
    return make_mollifier('cosine2')


@pytest.fixture(scope="module")
def identity():
    return make_schedule('identity')


# =============================================================================
# PROBLEMS AND NETS
# =============================================================================

class TestProblem:
    """Mode data families and problem validation."""

    def test_data_families(self):
        """Each family resolves against the model frequencies."""
        model = build_model('power', 4, 2.0)
        pi = model.frequencies
        assert np.allclose(ModeDataSpec('exp-decay', rate=2.0).resolve(model).coefficients, np.exp(-2.0 * pi))
        assert np.allclose(ModeDataSpec('power-decay', q=1.5).resolve(model).coefficients, (1 + pi ** 2) ** -1.5)
        assert np.allclose(ModeDataSpec('gevrey', eta=-1.0, s=2.0).resolve(model).coefficients, np.exp(-pi ** 0.5))
        listed = ModeDataSpec('list', values=(1.0, 2.0)).resolve(model).coefficients
        assert np.array_equal(listed, [1.0, 2.0, 0.0, 0.0])

    def test_list_data_too_long(self):
        """More values than modes is an error."""
        with pytest.raises(ValidationError):
            ModeDataSpec('list', values=(1.0,) * 5).resolve(build_model('power', 4))

    def test_resized_problem(self):
        """Mode-count changes re-resolve the data descriptors."""
        problem = problem_for(affine(), modes=8)
        big = problem.resized(16)
        assert big.model.modes == 16
        assert np.allclose(big.data.u0.coefficients[:8], problem.data.u0.coefficients)

    def test_invalid_coefficient_is_reported(self, bump, identity):
        """A negative atom under a positive floor stops the net."""
        a = RoughCoefficient(SmoothPart('constant', c0=1.0), 1.0, atoms=(Atom(0.5, -1.0),), floor=1.0)
        with pytest.raises(ValidationError) as exc:
            solve_regularized_net(problem_for(a), bump, identity, SHORT_NET)
        assert any('positivity' in v for v in exc.value.violations)


class TestRegularizedNet:
    """Solving one problem over a net of eps values."""

    def test_net_shapes_and_recursion(self, bump, identity):
        """∂_t^2 u and ∂_t^3 u from the Leibniz recursion match time differences of lower orders."""
        net = solve_regularized_net(problem_for(affine(), modes=4), bump, identity, SHORT_NET, p_max=3,
                                    report_steps=400)
        assert list(net.eps) == SHORT_NET
        assert net.failures == {}
        t = net.times
        for entry in net.entries:
            assert entry.derivs.shape == (4, t.size, 4)
            for p in (2, 3):
                fd = np.gradient(entry.derivs[p - 1], t, axis=0)[2:-2]
                exact = entry.derivs[p][2:-2]
                err = np.max(np.abs(fd - exact)) / np.max(np.abs(exact))
                assert err < 1e-3, f"eps={entry.eps} p={p}: relative error {err}"

    def test_plancherel_coherence(self, config, bump, identity):
        """Net norms equal the weighted sums of the raw trajectories."""
        tol = config.getfloat('norms', 'coherence')
        problem = problem_for(affine(), modes=6, u1=ModeDataSpec('power-decay', q=2.0), s=0.5)
        net = solve_regularized_net(problem, bump, identity, SHORT_NET)
        w_u = sobolev_weights(problem.model, 0.5 + 1.0)
        w_ut = sobolev_weights(problem.model, 0.5)
        for i, entry in enumerate(net.ok_entries):
            v = np.array([tr.v for tr in entry.trajectories])
            vt = np.array([tr.vt for tr in entry.trajectories])
            u_ref = np.sqrt(np.sum(w_u[:, None] * np.abs(v) ** 2, axis=0))
            ut_ref = np.sqrt(np.sum(w_ut[:, None] * np.abs(vt) ** 2, axis=0))
            assert np.max(np.abs(net.u_norms()[i] - u_ref)) <= tol * np.max(u_ref)
            assert np.max(np.abs(net.ut_norms()[i] - ut_ref)) <= tol * np.max(ut_ref)

    def test_constant_source_second_derivative(self, bump, identity):
        """a = 1, g = 1, h = e_1, zero data: ∂_t^2 u_1 = cos t."""
        a = constant_coefficient(1.0, 1.0)
        problem = problem_for(a, modes=2, u0=ZERO, source_profile=constant_coefficient(1.0, 1.0),
                              source_modes=ModeDataSpec('list', values=(1.0,)))
        net = solve_regularized_net(problem, bump, identity, SHORT_NET, p_max=2)
        for entry in net.entries:
            assert np.max(np.abs(entry.derivs[2][:, 0] - np.cos(net.times))) < 1e-8
            assert np.all(entry.derivs[:, :, 1] == 0)

    def test_failed_eps_is_a_gap(self, bump, identity):
        """An eps the step budget cannot resolve is recorded, the rest are solved."""
        a = RoughCoefficient(SmoothPart('constant', c0=1.0), 1.0, jumps=(Jump(0.5, 1.0),), floor=1.0)
        opts = IntegratorOptions(rtol=1e-6, max_steps=1000)
        net = solve_regularized_net(problem_for(a, modes=2), bump, identity, [0.5, 0.25, 0.1, 0.001], opts=opts,
                                    report_steps=50)
        assert list(net.failures) == [0.001]
        assert 'step budget' in net.failures[0.001]
        assert len(net.ok_entries) == 3

    def test_mollifier_order_is_checked(self, cosine2, identity):
        """∂_t^4 u needs psi''; cosine2 only has psi'."""
        with pytest.raises(ConfigurationError):
            solve_regularized_net(problem_for(affine()), cosine2, identity, SHORT_NET, p_max=4)

    def test_net_needs_four_points(self, bump, identity):
        """Three distinct eps values are too few."""
        with pytest.raises(DomainError):
            solve_regularized_net(problem_for(affine()), bump, identity, [0.5, 0.25, 0.25, 0.125])

    def test_parallel_net_is_deterministic(self, bump, identity):
        """jobs=1 and jobs=3 give bitwise equal nets."""
        problem = problem_for(affine(), modes=4)
        one = solve_regularized_net(problem, bump, identity, SHORT_NET, p_max=2, jobs=1)
        many = solve_regularized_net(problem, bump, identity, SHORT_NET, p_max=2, jobs=3)
        for p in range(3):
            assert np.array_equal(one.stack(p), many.stack(p)), f"p={p} differs"


# =============================================================================
# MODERATENESS AND NEGLIGIBILITY
# =============================================================================

class TestModerateness:
    """Power-law envelopes over the net."""

    def test_synthetic_power_growth(self):
        """sup ||∂^p u|| = eps^(-2-p) gives N = 2."""
        eps = np.array([1e-1, 1e-2, 1e-3, 1e-4])
        report = moderateness_fit(eps, {0: eps ** -2.0, 1: eps ** -3.0})
        assert abs(report.N - 2.0) < 1e-9, f"N {report.N}"
        assert report.moderate
        assert all(np.all(ok) for ok in report.envelope_ok.values())

    def test_synthetic_exponential_growth(self):
        """e^(1/eps) has no admissible power envelope."""
        eps = np.array([0.1, 0.05, 0.02, 0.01])
        report = moderateness_fit(eps, {0: np.exp(1.0 / eps)})
        assert not report.moderate

    def test_regular_net_is_eps_stable(self, bump, identity):
        """A smooth coefficient gives norms nearly independent of eps."""
        net = solve_regularized_net(problem_for(affine()), bump, identity, SHORT_NET)
        report = moderateness_report(net)
        assert report.moderate
        assert abs(report.N) < 0.1, f"N {report.N}"
        rows = list(report.rows())
        assert len(rows) == 2 * len(SHORT_NET)

    def test_time_derivatives_stay_moderate(self, bump, identity):
        """a = 1 + delta_0.5: each time derivative costs at most one power of 1/eps."""
        eps = [2.0 ** -j for j in range(2, 8)]
        report = moderateness_report(solve_regularized_net(problem_for(dirac()), bump, identity, eps, p_max=2))
        assert report.moderate, f"N={report.N}"
        for p in range(3):
            assert np.all(report.envelope_ok[p]), f"envelope fails for p={p}"
        for p in range(2):
            step = report.fits[p + 1].slope - report.fits[p].slope
            assert step <= 1.0 + 0.1, f"p={p}->{p + 1}: slope step {step}"

    def test_acceptance_dirac_log_schedule(self, bump):
        """a = 1 + delta_0.5, log schedule, M = 16: envelopes for p <= 2, stable under M -> 32."""
        schedule = make_schedule('log', order=1)
        problem = problem_for(dirac(), modes=16)
        report = moderateness_report(solve_regularized_net(problem, bump, schedule, p_max=2))
        assert report.moderate, f"N={report.N}"
        for p in range(3):
            assert np.all(report.envelope_ok[p]), f"envelope fails for p={p}"
        doubled = moderateness_report(solve_regularized_net(problem.resized(32), bump, schedule, p_max=2))
        assert doubled.verdict == report.verdict

    def test_acceptance_dirac_rows_are_parallel_invariant(self, bump):
        """The moderateness rows do not depend on the number of jobs."""
        schedule = make_schedule('log', order=1)
        problem = problem_for(dirac(), modes=16)
        one = moderateness_report(solve_regularized_net(problem, bump, schedule, p_max=2, jobs=1))
        many = moderateness_report(solve_regularized_net(problem, bump, schedule, p_max=2, jobs=4))
        assert [repr(r) for r in one.rows()] == [repr(r) for r in many.rows()]


class TestGevreyModerateness:
    """Exponentially weighted envelopes."""

    def test_certified_at_growth_rate(self):
        """Amplitudes e^(2 pi_m)/eps: envelopes hold from eta = 0, mode growth stops at eta = 2."""
        model = build_model('power', 16, 2.0)
        eps = np.array([1e-1, 1e-2, 1e-3, 1e-4])
        amplitudes = np.exp(2.0 * model.frequencies)[None, None, :] / eps[:, None, None]
        grid = [0.0, 1.0, 1.5, 2.0, 3.0]
        report = gevrey_moderateness(eps, model, 1.0, grid, {0: amplitudes})
        assert report.eta == 0.0, f"eta {report.eta}"
        assert report.verdict == 'H_(s)^-inf-type moderate'
        assert abs(report.tail_slopes[(0.0, 0)] - 2.0) < 1e-9
        strict = gevrey_moderateness(eps, model, 1.0, grid, {0: amplitudes}, tail_tol=0.01)
        assert strict.eta == 2.0, f"eta {strict.eta}"
        assert not strict.certified[(1.5, 0)]
        assert report.certified[(1.5, 0)]

    def test_eps_independent_norms_take_the_smallest_eta(self):
        """Norms that do not depend on eps are certified at the first grid value."""
        model = build_model('power', 8, 2.0)
        eps = np.array([0.5, 0.25, 0.125, 0.0625])
        amplitudes = np.broadcast_to(np.exp(model.frequencies), (4, 3, 8))
        report = gevrey_moderateness(eps, model, 1.0, [3.0, 0.5, 1.0], {0: amplitudes, 1: amplitudes})
        assert report.eta == 0.5
        assert all(report.certified.values())

    def test_run_on_degenerate_t_squared(self, bump, identity):
        """a = t^2, s = 1.5, M = 32: moderate at the first eta; weighting by e^(-eta x) lowers every tail by eta."""
        a = RoughCoefficient(SmoothPart('power', c0=0.0, c1=1.0, q=2.0), 1.0, name='t^2')
        problem = problem_for(a, modes=32, u0=ModeDataSpec('gevrey', eta=-1.0, s=1.5))
        net = solve_regularized_net(problem, bump, identity, SHORT_NET)
        grid = [0.0, 0.5, 1.0, 2.0]
        report = gevrey_moderateness_report(net, 1.5, grid)
        assert report.verdict == 'H_(s)^-inf-type moderate'
        assert report.eta == 0.0
        assert len(list(report.rows())) == len(grid) * (net.p_max + 1)
        for p in range(net.p_max + 1):
            for eta in grid[1:]:
                shift = report.tail_slopes[(0.0, p)] - report.tail_slopes[(eta, p)]
                assert abs(shift - eta) < 1e-8, f"p={p} eta={eta}: shift {shift}"
        for key in [(eta, p, 1.5) for eta in grid for p in range(net.p_max + 1)]:
            assert key in net.gevrey

    def test_empty_grid(self):
        """An eta grid is required."""
        with pytest.raises(ConfigurationError):
            gevrey_moderateness([0.1, 0.01], build_model('power', 8), 1.0, [], {0: np.zeros((2, 1, 8))})


class TestNegligibility:
    """Decay of net differences."""

    def test_quadratic_decay(self):
        """d = eps^2 is negligible at orders 1 and 2, not 3."""
        eps = 2.0 ** -np.arange(1, 9)
        report = negligibility_from_distances(eps, eps ** 2, [1.0, 2.0, 3.0])
        assert report.verdicts == {1.0: True, 2.0: True, 3.0: False}
        assert abs(report.decay_slope - 2.0) < 1e-9

    def test_exponential_decay(self):
        """d = e^(-1/eps) beats every tested order."""
        eps = 2.0 ** -np.arange(1, 9)
        report = negligibility_from_distances(eps, np.exp(-1.0 / eps), [1.0, 5.0, 10.0])
        assert all(report.verdicts.values())

    def test_net_with_itself(self, bump, identity):
        """The difference of a net with itself is negligible at every order."""
        net = solve_regularized_net(problem_for(affine(), modes=4), bump, identity, SHORT_NET)
        report = negligibility_test(net, net, [1.0, 2.0, 10.0])
        assert all(report.verdicts.values())

    def test_symmetric_and_transitive_across_mollifiers(self, bump, cosine2, identity):
        """bump, cosine2 and triangle nets: symmetric distances, triangle inequality, shared verdicts."""
        problem = problem_for(affine(), modes=8)
        eps = [2.0 ** -j for j in range(2, 9)]
        nets = {name: solve_regularized_net(problem, psi, identity, eps)
                for name, psi in (('bump', bump), ('cosine2', cosine2), ('triangle', make_mollifier('triangle')))}
        pairs = [('bump', 'cosine2'), ('cosine2', 'triangle'), ('bump', 'triangle')]
        reports = {}
        for x, y in pairs:
            forward = negligibility_test(nets[x], nets[y], [1.0])
            backward = negligibility_test(nets[y], nets[x], [1.0])
            assert np.array_equal(forward.distances, backward.distances)
            assert forward.verdicts == backward.verdicts
            reports[(x, y)] = forward
        d_ab, d_bc, d_ac = (reports[pair].distances for pair in pairs)
        assert np.all(d_ac <= (d_ab + d_bc) * (1.0 + 1e-12))
        assert reports[pairs[0]].verdicts[1.0] and reports[pairs[1]].verdicts[1.0]
        assert reports[pairs[2]].verdicts[1.0], f"decay {reports[pairs[2]].decay_slope}"

    def test_mismatched_nets(self):
        """Nets on different eps values cannot be compared."""
        times = np.linspace(0.0, 1.0, 3)
        a = NetSolution(None, None, None, times, 1, [NetEntry(e, e) for e in (0.5, 0.25, 0.125, 0.0625)])
        b = NetSolution(None, None, None, times, 1, [NetEntry(e, e) for e in (0.5, 0.25, 0.1, 0.05)])
        with pytest.raises(ValidationError):
            negligibility_test(a, b, [1.0])


# =============================================================================
# CONSISTENCY AND UNIQUENESS
# =============================================================================

class TestConsistency:
    """Regularised solutions against the classical one."""

    def test_acceptance_affine_consistency(self, config, bump, identity):
        """a = 1 + t/2, M = 16: monotone decay, small final error, slope >= 0.8."""
        threshold = config.getfloat('consistency', 'threshold')
        report = consistency_experiment(problem_for(affine(), modes=16), bump, identity, WIDE_NET, threshold)
        logger.info(f"consistency errors: {report.errors}")
        assert report.monotone, f"errors {report.errors}"
        assert report.errors[-1] <= threshold
        assert report.slope is not None and report.slope >= config.getfloat('consistency', 'min_slope'), \
            f"slope {report.slope}"
        assert report.consistent

    def test_acceptance_affine_consistency_in_gevrey_norm(self, config, bump, identity):
        """a = 1 + t/2 with Gevrey data: errors in ||e^(R^(1/3)/2) .|| decay at least linearly."""
        problem = problem_for(affine(), modes=16, u0=ModeDataSpec('gevrey', eta=-1.0, s=1.5))
        report = consistency_experiment(problem, bump, identity, WIDE_NET, 1e-2, gevrey=(1.5, 0.5))
        logger.info(f"gevrey consistency errors: {report.errors}")
        assert report.consistent, f"errors {report.errors}"
        assert report.slope is not None and report.slope >= config.getfloat('consistency', 'min_slope'), \
            f"slope {report.slope}"
        plain = consistency_experiment(problem, bump, identity, SHORT_NET, 1e-2)
        weighted = consistency_experiment(problem, bump, identity, SHORT_NET, 1e-2, gevrey=(1.5, 0.0))
        assert np.allclose(weighted.err_C1H, plain.err_C1H, rtol=1e-12, atol=0.0)

    def test_acceptance_weierstrass_gevrey_consistency(self, bump, identity):
        """a = 1 + 0.1 W, Hoelder 1/2, Gevrey data of order 1.5: errors fall toward the classical solution."""
        a = RoughCoefficient(SmoothPart('weierstrass', c0=1.0, c1=0.1, alpha=0.5, terms=8), 1.0, floor=0.5)
        problem = problem_for(a, modes=8, u0=ModeDataSpec('gevrey', eta=-1.0, s=1.5))
        eps = [2.0 ** -j for j in range(2, 8)]
        report = consistency_experiment(problem, bump, identity, eps, 1e-2, gevrey=(1.5, 0.5))
        logger.info(f"weierstrass consistency errors: {report.errors}")
        assert report.errors[-1] <= report.errors[0] / 4.0, f"errors {report.errors}"
        assert report.slope is not None and report.slope > 0.0, f"slope {report.slope}"

    def test_constant_coefficient_errors_stay_at_floor(self, bump, identity):
        """a = 1 is reproduced exactly by every mollifier."""
        report = consistency_experiment(problem_for(constant_coefficient(1.0, 1.0)), bump, identity, SHORT_NET)
        assert np.all(report.errors <= report.floor)
        assert report.slope is None
        assert report.consistent

    def test_distributional_coefficient_is_refused(self, bump, identity):
        """No classical solution for a Dirac coefficient."""
        with pytest.raises(ConfigurationError):
            consistency_experiment(problem_for(dirac()), bump, identity, SHORT_NET)


class TestUniqueness:
    """Two mollifiers, one coefficient."""

    def test_acceptance_bump_against_cosine2(self, config, bump, cosine2, identity):
        """Solution differences decay at least linearly in eps."""
        eps = [2.0 ** -j for j in range(2, 9)]
        report = uniqueness_experiment(problem_for(affine(), modes=16), bump, cosine2, identity, eps)
        assert report.label == 'empirical Colombeau-equivalence evidence'
        assert report.solution_decay >= config.getfloat('consistency', 'min_slope'), \
            f"decay {report.solution_decay}"
        assert report.solution_differences[-1] <= 1e-3
        assert report.evidence

    def test_same_mollifier_gives_identical_nets(self, bump, identity):
        """Identical mollifiers leave nothing to compare."""
        report = uniqueness_experiment(problem_for(affine(), modes=4), bump, bump, identity, SHORT_NET)
        assert report.evidence is True
        assert report.label == 'identical nets'

    def test_distributional_coefficient_has_no_verdict(self, bump, cosine2, identity):
        """Dirac coefficients record the decay only."""
        report = uniqueness_experiment(problem_for(dirac(), modes=4), bump, cosine2, identity, SHORT_NET)
        assert report.evidence is None


# =============================================================================
# REGIMES AND AMPLIFICATION
# =============================================================================

class TestRegimeAdvisor:
    """Admissible Gevrey orders per coefficient class."""

    @pytest.mark.parametrize("cls, upper", [
        (CoefficientClass('holder-positive', alpha=0.5), 2.0),
        (CoefficientClass('smooth-degenerate', ell=2), 2.0),
        (CoefficientClass('holder-degenerate', alpha=1.5), 1.75),
    ])
    def test_intervals(self, cls, upper):
        """1 <= s < upper for the Gevrey regimes."""
        record = regime_advisor(cls)
        assert record.s_lower == 1.0
        assert record.s_upper == upper
        assert record.admits(1.0) and not record.admits(upper)

    def test_lipschitz_positive_is_sobolev(self):
        """Any s in the Sobolev regime."""
        record = regime_advisor(CoefficientClass('lipschitz-positive'))
        assert record.regime == 'i'
        assert record.admits(-3.0) and record.admits(40.0)
        assert record.constraint() == 'any s'

    @pytest.mark.parametrize("cls", [
        CoefficientClass('holder-positive', alpha=1.0),
        CoefficientClass('smooth-degenerate', ell=1),
        CoefficientClass('holder-degenerate', alpha=2.0),
    ])
    def test_boundaries_are_rejected(self, cls):
        """Strict inequalities on alpha and ell."""
        with pytest.raises(DomainError):
            regime_advisor(cls)

    def test_unknown_class_lists_the_regimes(self):
        """The error names all four classes."""
        with pytest.raises(ConfigurationError) as exc:
            regime_advisor(CoefficientClass('analytic'))
        for kind, _ in zip(('lipschitz-positive', 'holder-positive', 'smooth-degenerate', 'holder-degenerate'),
                           range(4)):
            assert kind in str(exc.value)
        assert len(regime_table()) == 4


class TestAmplification:
    """log A(beta) against beta^(1/s)."""

    def test_acceptance_degenerate_t_squared_scan(self, config):
        """a = t^2, s = 1.5: bounded ratios."""
        a = RoughCoefficient(SmoothPart('power', c0=0.0, c1=1.0, q=2.0), 1.0)
        report = gevrey_amplification_scan(a, CoefficientClass('smooth-degenerate', ell=2), 1.5,
                                           AMPLIFICATION_BETAS,
                                           factor=config.getfloat('amplification', 'ratio_factor'))
        assert report.admissible
        assert report.bounded, f"ratios {report.ratios}"

    def test_acceptance_weierstrass_scan(self, config):
        """a = 1 + 0.1 W with alpha = 1/2, s = 1.5: bounded ratios."""
        a = RoughCoefficient(SmoothPart('weierstrass', c0=1.0, c1=0.1, alpha=0.5, terms=8), 1.0, floor=0.5)
        report = gevrey_amplification_scan(a, CoefficientClass('holder-positive', alpha=0.5), 1.5,
                                           AMPLIFICATION_BETAS,
                                           factor=config.getfloat('amplification', 'ratio_factor'))
        assert report.admissible
        assert report.bounded, f"ratios {report.ratios}"
        assert np.all(report.amplification >= 1.0 - 1e-9)

    def test_inadmissible_order_is_flagged(self):
        """s outside the regime still scans, marked inadmissible."""
        a = RoughCoefficient(SmoothPart('power', c0=0.0, c1=1.0, q=2.0), 1.0)
        report = gevrey_amplification_scan(a, CoefficientClass('smooth-degenerate', ell=2), 3.0, [1, 10, 100])
        assert report.admissible is False

    def test_bad_scan_arguments(self):
        """Orders below one, short beta lists and zero data."""
        a = constant_coefficient(1.0, 1.0)
        with pytest.raises(DomainError):
            gevrey_amplification_scan(a, None, 0.5, [1, 100])
        with pytest.raises(DomainError):
            gevrey_amplification_scan(a, None, 1.5, [1, 10])
        with pytest.raises(DomainError):
            gevrey_amplification_scan(a, None, 1.5, [1, 100], v0=0.0)


# =============================================================================
# ENERGY AUDIT
# =============================================================================

class TestEnergyAudit:
    """sup_t LHS/RHS of the well-posedness inequality."""

    def test_constant_coefficient(self, bump, identity):
        """a = 1: the energy at t = 0 is the largest, C_emp = 1, stable when M doubles."""
        problem = problem_for(constant_coefficient(1.0, 1.0), modes=8)
        net = solve_regularized_net(problem, bump, identity, SHORT_NET)
        second = solve_regularized_net(problem.resized(16), bump, identity, SHORT_NET)
        report = energy_inequality_audit(net, second)
        assert abs(report.C_emp - 1.0) < 1e-8, f"C_emp {report.C_emp}"
        assert not report.solver_bug
        assert report.stable

    def test_zero_data(self, bump, identity):
        """Zero data and source give C_emp = 0."""
        problem = problem_for(constant_coefficient(1.0, 1.0), modes=4, u0=ZERO)
        report = energy_inequality_audit(solve_regularized_net(problem, bump, identity, SHORT_NET))
        assert report.C_emp == 0.0
        assert not report.solver_bug

    def test_affine_mixed_data(self, bump, identity):
        """a = 1 + t/2 with both data: finite, stable under M doubling."""
        problem = problem_for(affine(), modes=8, u1=ModeDataSpec('power-decay', q=2.0))
        net = solve_regularized_net(problem, bump, identity, SHORT_NET)
        second = solve_regularized_net(problem.resized(16), bump, identity, SHORT_NET)
        report = energy_inequality_audit(net, second)
        assert math.isfinite(report.C_emp)
        assert report.stable, f"ratio {report.stability_ratio}"

    def test_needs_positive_regular_coefficient(self, bump, identity):
        """Dirac coefficients are outside the Sobolev regime."""
        net = NetSolution(problem_for(dirac()), bump, identity, np.linspace(0.0, 1.0, 3), 1, [])
        with pytest.raises(ConfigurationError):
            energy_inequality_audit(net)
