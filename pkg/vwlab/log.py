import logging
import sys

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# color output on windows
if sys.platform == 'win32':
    from colorama import init
    init()


def LOGI(x):
    print('\033[32m{}\033[0m'.format(x))


def LOGW(x):
    print('\033[33m{}\033[0m'.format(x))


def LOGE(x):
    print('\033[31m{}\033[0m'.format(x), file=sys.stderr)


def setup_logging(verbose=False):
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format=LOG_FORMAT)
