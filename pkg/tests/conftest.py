import os
import sys

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.hookimpl(tryfirst=True)
def pytest_configure(config):
    # OPERAD_FORGE_SEED pins every randomized property test
    seed = os.environ.get("OPERAD_FORGE_SEED")
    if seed is not None and config.getoption("hypothesis_seed", None) is None:
        config.option.hypothesis_seed = int(seed)


def pytest_report_header(config):
    return f"OPERAD_FORGE_SEED={os.environ.get('OPERAD_FORGE_SEED', 'unset')}"


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
