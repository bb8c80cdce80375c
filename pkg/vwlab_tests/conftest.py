"""
Pytest configuration and shared fixtures for the vwlab test suite.
"""

import configparser
from pathlib import Path

import pytest

SCENARIO_DIR = Path(__file__).parent.parent / 'scenarios'

_file_markers = {
    'test_rough_coefficients': 'basic',
    'test_spectral_model': 'basic',
    'test_fitting': 'basic',
    'test_mode_solver': 'solver',
    'test_lab': 'lab',
    'test_cli': 'cli',
}


def pytest_configure(config):
    """Configure pytest with custom settings."""
    config.addinivalue_line("markers", "basic: coefficients, spectral model and fitting")
    config.addinivalue_line("markers", "solver: mode solver and energy checks")
    config.addinivalue_line("markers", "lab: eps-net experiments")
    config.addinivalue_line("markers", "cli: scenario files, runs and command line")
    config.addinivalue_line("markers", "slow: mark test as slow running")


def pytest_collection_modifyitems(config, items):
    """Add markers based on the test module and the test name."""
    for item in items:
        marker = _file_markers.get(item.module.__name__.rsplit('.', 1)[-1])
        if marker:
            item.add_marker(getattr(pytest.mark, marker))
        name = item.name.lower()
        if "acceptance" in name or "net" in name or "scan" in name:
            item.add_marker(pytest.mark.slow)


def pytest_sessionstart(session):
    """Called after the Session object has been created."""
    print("\n" + "=" * 60)
    print("vwlab Test Session Starting")
    print("=" * 60)


def pytest_sessionfinish(session, exitstatus):
    """Called after whole test run finished."""
    print("\n" + "=" * 60)
    print("vwlab Test Session Finished")
    if exitstatus == 0:
        print("Status: ALL TESTS PASSED ✓")
    else:
        print("Status: SOME TESTS FAILED ✗")
    print("=" * 60)


@pytest.fixture(scope="session")
def config():
    """Load acceptance tolerances from config.ini."""
    config = configparser.ConfigParser()
    config.read(Path(__file__).parent / 'config.ini')
    return config


@pytest.fixture
def output_root(tmp_path, monkeypatch):
    """Run directory root isolated from VWLAB_OUTPUT_ROOT."""
    monkeypatch.delenv('VWLAB_OUTPUT_ROOT', raising=False)
    monkeypatch.chdir(tmp_path)
    root = tmp_path / 'runs'
    monkeypatch.setenv('VWLAB_OUTPUT_ROOT', str(root))
    return root


@pytest.fixture(scope="session")
def scenario_dir():
    return SCENARIO_DIR


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Add additional summary information."""
    if exitstatus != 0:
        terminalreporter.write_sep("=", "Troubleshooting Tips")
        terminalreporter.write_line("")
        terminalreporter.write_line("If tests failed, check:")
        terminalreporter.write_line("1. numpy and scipy are installed (pip install -r vwlab_tests/requirements.txt)")
        terminalreporter.write_line("2. VWLAB_OUTPUT_ROOT in .env points to a writable directory")
        terminalreporter.write_line("3. Tolerances in vwlab_tests/config.ini")
        terminalreporter.write_line("4. Run with -m 'not slow' to isolate the fast checks")
        terminalreporter.write_line("")
