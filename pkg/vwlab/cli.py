import argparse
import logging
import sys

from . import __version__
from .errors import EXIT_ANALYSIS, EXIT_OK, EXIT_VALIDATION, FatalError, ValidationError
from .lab import regime_table
from .log import LOGE, LOGI, LOGW, setup_logging
from .runner import export_tables, load_record, resolve_run, run_scenario
from .scenario import describe_keys, validate_scenario

logger = logging.getLogger(__name__)


def validate(args):
    try:
        scenario = validate_scenario(args.scenario)
    except ValidationError as e:
        LOGE('{} is not valid ({} problem{}):'.format(args.scenario, len(e.violations),
                                                      '' if len(e.violations) == 1 else 's'))
        for v in e.violations:
            LOGE('  - {}'.format(v))
        return EXIT_VALIDATION
    LOGI('{} is valid: scenario {} ({})'.format(args.scenario, scenario.name, scenario.digest[:16]))
    print('  coefficient: {}{}{}'.format(scenario.coefficient.smooth.family,
                                         ', {} jump(s)'.format(len(scenario.coefficient.jumps))
                                         if scenario.coefficient.jumps else '',
                                         ', {} atom(s)'.format(len(scenario.coefficient.atoms))
                                         if scenario.coefficient.atoms else ''))
    print('  modes: {} ({}), eps points: {}'.format(scenario.model.modes, scenario.model.family, len(scenario.eps)))
    print('  analyses: {}'.format(', '.join(scenario.analyses)))
    return EXIT_OK


def run(args):
    scenario = validate_scenario(args.scenario)
    record = run_scenario(scenario, force=args.force, jobs=args.jobs)
    if record.reused:
        LOGI('Reused run {}'.format(record.run_dir))
    else:
        LOGI('Run written to {}'.format(record.run_dir))
    for name, verdict in record.verdicts.items():
        print('  {}: {}'.format(name, verdict))
    for name, message in record.failures.items():
        LOGE('  {} failed: {}'.format(name, message))
    return EXIT_OK if record.ok else EXIT_ANALYSIS


def export(args):
    record = load_record(resolve_run(args.run))
    for path in export_tables(record, args.which, args.dest):
        print(path)
    return EXIT_OK


def regimes(args):
    for regime, kind, space, constraint in regime_table():
        print('({}) {}'.format(regime, kind))
        print('    space: {}'.format(space))
        print('    s:     {}'.format(constraint))
    return EXIT_OK


def keys(args):
    for section, key, default, meaning in describe_keys():
        if args.section and section != args.section:
            continue
        print('[{}] {} = {}'.format(section, key, default))
        print('    {}'.format(meaning))
    return EXIT_OK


def version(args):
    print(__version__)
    return EXIT_OK


def main(argv=None):
    parser = argparse.ArgumentParser(description='vwlab {} - very weak solution lab'.format(__version__),
                                     prog='vwlab.py')
    parser.add_argument('--verbose', '-v', help='Debug logging', action='store_true')
    parser.add_argument('--version', action='version', version=__version__)

    subparsers = parser.add_subparsers(
        dest='operation',
        help='Run vwlab.py {command} -h for additional help')

    parser_validate = subparsers.add_parser(
        'validate',
        help='Check a scenario file and list every problem found')
    parser_validate.add_argument('scenario', help='Scenario file (INI)')

    parser_run = subparsers.add_parser(
        'run',
        help='Run the analyses of a scenario into a content-addressed run directory')
    parser_run.add_argument('scenario', help='Scenario file (INI)')
    parser_run.add_argument('--force', '-f',
                            help='Recompute even if an identical run exists',
                            action='store_true')
    parser_run.add_argument('--jobs', '-j',
                            help='Number of eps values solved concurrently',
                            type=int,
                            default=1)

    parser_export = subparsers.add_parser(
        'export',
        help='List or copy the tables of a run')
    parser_export.add_argument('run', help='Run directory or scenario hash prefix')
    parser_export.add_argument('--which', '-w',
                               help='Analysis name, comma separated names, or all',
                               default='all')
    parser_export.add_argument('--dest', '-d',
                               help='Copy the selected tables into this directory')

    subparsers.add_parser(
        'regimes',
        help='Print the four coefficient regimes and their admissible Gevrey orders')

    parser_keys = subparsers.add_parser(
        'keys',
        help='List the recognised scenario keys with their defaults')
    parser_keys.add_argument('section', nargs='?', help='Only this section')

    subparsers.add_parser(
        'version',
        help='Print vwlab version')

    for operation in subparsers.choices.keys():
        assert operation in globals(), '{} should be a module function'.format(operation)

    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    if args.operation is None:
        parser.print_help()
        return EXIT_VALIDATION

    if getattr(args, 'jobs', 1) < 1:
        LOGW('--jobs must be at least 1, using 1')
        args.jobs = 1

    operation_func = globals()[args.operation]
    return operation_func(args)


def _main(argv=None):
    try:
        code = main(argv)
    except FatalError as e:
        LOGE('A fatal error occurred: {}'.format(e))
        code = e.exit_code
    except Exception as e:
        LOGE('A fatal error occurred: {}'.format(e))
        logger.debug('unexpected error', exc_info=True)
        code = EXIT_ANALYSIS
    sys.exit(code)


if __name__ == '__main__':
    _main()
