"""
Run orchestration and persistence.

A run lives in <output root>/<first 16 hex digits of the scenario hash>/.
Each analysis writes one comma separated table whose first line is a
provenance comment; summary.ini records verdicts, table files, failures and
timestamps. Tables never contain timestamps, so an unchanged scenario
reproduces them byte for byte.
"""

import configparser
import datetime
import difflib
import logging
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from typing import Dict

from dotenv import load_dotenv

from . import __version__
from .errors import FatalError, NotFoundError, StorageError
from .lab import (consistency_experiment, energy_inequality_audit, gevrey_amplification_scan,
                  gevrey_moderateness_report, moderateness_report, solve_regularized_net, uniqueness_experiment)
from .rough_coefficients import fit_derivative_growth
from .scenario import ANALYSES

logger = logging.getLogger(__name__)

OUTPUT_ROOT_ENV = 'VWLAB_OUTPUT_ROOT'
SUMMARY = 'summary.ini'

table_columns = {
    'derivative_growth': ('eps', 'omega', 'k', 'sup_derivative', 'slope', 'verdict'),
    'moderateness': ('eps', 'omega', 'p', 'sup_norm', 'fitted_N', 'envelope_ok'),
    'gevrey_moderateness': ('eta', 'p', 'fitted_N', 'certified'),
    'uniqueness': ('eps', 'coef_diff', 'sol_diff'),
    'consistency': ('eps', 'err_CH', 'err_C1H'),
    'amplification': ('beta', 'amplification', 'ratio'),
    'energy_audit': ('eps', 'c_emp'),
}


@dataclass
class RunRecord:
    scenario_hash: str
    version: str
    run_dir: str
    name: str = ''
    started: str = ''
    finished: str = ''
    verdicts: Dict[str, str] = field(default_factory=dict)
    tables: Dict[str, str] = field(default_factory=dict)
    failures: Dict[str, str] = field(default_factory=dict)
    reused: bool = False

    @property
    def ok(self):
        return not self.failures

    def table_path(self, name):
        return os.path.join(self.run_dir, self.tables[name])


def output_root(scenario=None, root=None):
    """Explicit root, then VWLAB_OUTPUT_ROOT (a .env file is honoured), then [output] directory, then ./runs."""
    if root:
        return root
    load_dotenv()
    env = os.environ.get(OUTPUT_ROOT_ENV)
    if env:
        return env
    if scenario is not None and scenario.output_dir:
        return scenario.output_dir
    return 'runs'


def _cell(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if value is None:
        return 'nan'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    return repr(float(value))


def write_table(path, columns, rows, scenario_hash, version=__version__):
    """Write a table through a temporary file in the same directory and rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix='.tmp-', suffix='.csv', dir=directory)
    try:
        with os.fdopen(fd, 'w', newline='\n', encoding='utf-8') as f:
            f.write('# scenario={} version={}\n'.format(scenario_hash, version))
            f.write(','.join(columns) + '\n')
            for row in rows:
                f.write(','.join(_cell(v) for v in row) + '\n')
        os.replace(tmp, path)
    except OSError as e:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise StorageError('cannot write table {}: {}'.format(path, e))
    return path


def read_table(path):
    """(columns, rows as lists of strings), skipping the provenance comment."""
    try:
        with open(path, encoding='utf-8') as f:
            lines = [line.rstrip('\n') for line in f if not line.startswith('#')]
    except OSError as e:
        raise StorageError('cannot read table {}: {}'.format(path, e))
    if not lines:
        return [], []
    return lines[0].split(','), [line.split(',') for line in lines[1:]]


# ===== analyses =====

class _Run:
    """Per-run state shared between analyses (the solved nets)."""

    def __init__(self, scenario, jobs):
        self.scenario = scenario
        self.jobs = jobs
        self._nets = {}

    def net(self, doubled=False):
        sc = self.scenario
        if doubled not in self._nets:
            problem = sc.problem.resized(2 * sc.model.modes) if doubled else sc.problem
            self._nets[doubled] = solve_regularized_net(problem, sc.mollifier, sc.schedule, sc.eps, sc.p_max,
                                                        sc.options, self.jobs, sc.report_steps)
        return self._nets[doubled]

    def can_double(self):
        return self.scenario.double_modes and self.scenario.model.family != 'table'


def _derivative_growth(run):
    sc = run.scenario
    growth = fit_derivative_growth(sc.coefficient, sc.mollifier, sc.schedule, sc.eps, sc.k_max)
    rows = []
    for g in growth:
        slope = g.fit.slope if not g.fit.degenerate else None
        for eps, omega, sup in zip(sorted(sc.eps, reverse=True), g.omegas, g.sups):
            rows.append((eps, omega, g.k, sup, slope, g.verdict))
    verdict = '; '.join('k={}: {}'.format(g.k, g.verdict) for g in growth)
    return rows, verdict


def _moderateness(run):
    sc = run.scenario
    report = moderateness_report(run.net(), max_exponent=sc.max_exponent)
    verdict = '{} (N={:.4g})'.format(report.verdict, report.N)
    if run.can_double():
        doubled = moderateness_report(run.net(doubled=True), max_exponent=sc.max_exponent)
        stable = doubled.verdict == report.verdict
        verdict += '; {} under 2M (N={:.4g})'.format('stable' if stable else 'unstable', doubled.N)
    else:
        verdict += '; stability under 2M n/a'
    failures = run.net().failures
    if failures:
        verdict += '; gaps at eps ' + ', '.join('{:g}'.format(e) for e in sorted(failures, reverse=True))
    return list(report.rows()), verdict


def _gevrey_moderateness(run):
    sc = run.scenario
    report = gevrey_moderateness_report(run.net(), sc.gevrey_s, sc.eta_grid, tail_tol=sc.eta_tail_tol)
    eta = 'none' if report.eta is None else '{:g}'.format(report.eta)
    return list(report.rows()), '{} (s={:g}, eta={})'.format(report.verdict, sc.gevrey_s, eta)


def _uniqueness(run):
    sc = run.scenario
    report = uniqueness_experiment(sc.problem, sc.mollifier, sc.second_mollifier, sc.schedule, sc.eps, sc.ell_list,
                                   sc.p_max, sc.options, run.jobs, sc.report_steps)
    if report.evidence is None:
        verdict = report.label
    else:
        verdict = '{}: {}'.format(report.label, 'supported' if report.evidence else 'not supported')
    ells = ', '.join('{:g}:{}'.format(l, 'yes' if v else 'no')
                     for l, v in sorted(report.negligibility.verdicts.items()))
    return list(report.rows()), '{}; negligible at {}'.format(verdict, ells)


def _consistency(run):
    sc = run.scenario
    report = consistency_experiment(sc.problem, sc.mollifier, sc.schedule, sc.eps, sc.threshold, sc.options,
                                    run.jobs, sc.report_steps, gevrey=sc.consistency_gevrey)
    slope = 'n/a' if report.slope is None else '{:.4g}'.format(report.slope)
    verdict = '{} (final error {:.3e}, slope {})'.format(report.verdict, report.errors[-1], slope)
    if sc.consistency_gevrey is not None:
        verdict += '; Gevrey norm s={:g}, eta={:g}'.format(*sc.consistency_gevrey)
    return list(report.rows()), verdict


def _amplification(run):
    sc = run.scenario
    report = gevrey_amplification_scan(sc.coefficient, sc.regime, sc.gevrey_s, sc.betas)
    verdict = "{} (K'={:.4g}, s={:g})".format('bounded' if report.bounded else 'unbounded', report.K_prime,
                                              report.s)
    if report.admissible is False:
        verdict += '; s outside the admissible range of the claimed regime'
    if sc.holder is not None:
        verdict += '; oscillation exponent {:.3g}'.format(sc.holder.alpha)
    return list(report.rows()), verdict


def _energy_audit(run):
    second = run.net(doubled=True) if run.can_double() else None
    report = energy_inequality_audit(run.net(), second)
    verdict = 'C_emp={:.4g}'.format(report.C_emp)
    if report.stability_ratio is not None:
        verdict += '; {} under 2M (ratio {:.4g})'.format('stable' if report.stable else 'unstable',
                                                          report.stability_ratio)
    if report.solver_bug:
        verdict += '; solver bug: nonzero solution from zero data'
    return list(report.rows()), verdict


_runners = {
    'derivative_growth': _derivative_growth,
    'moderateness': _moderateness,
    'gevrey_moderateness': _gevrey_moderateness,
    'uniqueness': _uniqueness,
    'consistency': _consistency,
    'amplification': _amplification,
    'energy_audit': _energy_audit,
}


# ===== runs =====

def _now():
    return datetime.datetime.now().isoformat(timespec='seconds')


def write_summary(record):
    config = configparser.ConfigParser(interpolation=None)
    config.optionxform = str
    config['run'] = {'hash': record.scenario_hash, 'version': record.version, 'name': record.name,
                     'started': record.started, 'finished': record.finished,
                     'status': 'ok' if record.ok else 'failed'}
    config['verdicts'] = dict(record.verdicts)
    config['tables'] = dict(record.tables)
    config['failures'] = {k: v.replace('\n', ' ') for k, v in record.failures.items()}
    path = os.path.join(record.run_dir, SUMMARY)
    fd, tmp = tempfile.mkstemp(prefix='.tmp-', suffix='.ini', dir=record.run_dir)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as f:
            config.write(f)
        os.replace(tmp, path)
    except OSError as e:
        raise StorageError('cannot write {}: {}'.format(path, e))
    return path


def load_record(run_dir):
    path = os.path.join(run_dir, SUMMARY)
    if not os.path.exists(path):
        raise NotFoundError('no run summary in {}'.format(run_dir))
    config = configparser.ConfigParser(interpolation=None)
    config.optionxform = str
    try:
        config.read(path, encoding='utf-8')
    except configparser.Error as e:
        raise StorageError('corrupt run summary {}: {}'.format(path, e))
    run = config['run'] if config.has_section('run') else {}
    return RunRecord(scenario_hash=run.get('hash', ''), version=run.get('version', ''), run_dir=run_dir,
                     name=run.get('name', ''), started=run.get('started', ''), finished=run.get('finished', ''),
                     verdicts=dict(config['verdicts']) if config.has_section('verdicts') else {},
                     tables=dict(config['tables']) if config.has_section('tables') else {},
                     failures=dict(config['failures']) if config.has_section('failures') else {})


def run_scenario(scenario, force=False, jobs=1, root=None):
    """
    Execute the requested analyses of a validated scenario.

    An existing complete run of the same scenario is returned with
    reused=True unless force is set. A failing analysis is recorded in the
    summary and does not stop the others.
    """
    digest = scenario.digest
    run_dir = os.path.join(output_root(scenario, root), digest[:16])
    if not force and os.path.exists(os.path.join(run_dir, SUMMARY)):
        record = load_record(run_dir)
        if record.scenario_hash == digest:
            record.reused = True
            logger.info('reusing run %s', run_dir)
            return record
    try:
        os.makedirs(run_dir, exist_ok=True)
    except OSError as e:
        raise StorageError('cannot create run directory {}: {}'.format(run_dir, e))
    record = RunRecord(scenario_hash=digest, version=__version__, run_dir=run_dir, name=scenario.name,
                       started=_now())
    run = _Run(scenario, jobs)
    for name in scenario.analyses:
        logger.info('running %s', name)
        try:
            rows, verdict = _runners[name](run)
        except FatalError as e:
            logger.error('%s failed: %s', name, e)
            record.failures[name] = str(e)
            continue
        filename = name + '.csv'
        write_table(os.path.join(run_dir, filename), table_columns[name], rows, digest)
        record.tables[name] = filename
        record.verdicts[name] = verdict
    record.finished = _now()
    write_summary(record)
    return record


def resolve_run(run, root=None):
    """Run directory from a path or a hash prefix under the output root."""
    if os.path.isdir(run):
        return run
    base = output_root(root=root)
    if os.path.isdir(base):
        matches = sorted(d for d in os.listdir(base) if d.startswith(run) and os.path.isdir(os.path.join(base, d)))
        if len(matches) == 1:
            return os.path.join(base, matches[0])
        if len(matches) > 1:
            raise NotFoundError('run prefix {!r} is ambiguous: {}'.format(run, ', '.join(matches)))
    raise NotFoundError('no run {!r} under {}'.format(run, base))


def export_tables(record, which='all', dest=None):
    """
    Paths of the selected tables, copied into dest when given.

    :raises NotFoundError: for an analysis that is unknown or has no table in
        this run, naming the available ones
    """
    available = sorted(record.tables)
    if which == 'all':
        selected = available
    else:
        selected = [w.strip() for w in which.split(',') if w.strip()]
        for name in selected:
            if name not in record.tables:
                hint = difflib.get_close_matches(name, list(ANALYSES), n=3)
                message = 'analysis {!r} has no table in this run; available: {}'.format(
                    name, ', '.join(available) or 'none')
                if name in record.failures:
                    message += ' ({} failed: {})'.format(name, record.failures[name])
                elif hint:
                    message += '; did you mean {}?'.format(' or '.join(hint))
                raise NotFoundError(message)
    paths = [record.table_path(name) for name in selected]
    missing = [p for p in paths if not os.path.exists(p)]
    if missing:
        raise NotFoundError('table file missing: {}'.format(', '.join(missing)))
    if dest:
        try:
            os.makedirs(dest, exist_ok=True)
            paths = [shutil.copy2(p, os.path.join(dest, os.path.basename(p))) for p in paths]
        except OSError as e:
            raise StorageError('cannot copy tables to {}: {}'.format(dest, e))
    return paths
