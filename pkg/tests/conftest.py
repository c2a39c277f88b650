import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, text = mark.args
    if rep.when == "setup" and rep.skipped:
        _CRITERIA[num] = ("SKIP", text)
    elif rep.when == "call":
        if hasattr(rep, "wasxfail"):
            # a known, documented failure: still reported as FAIL
            status = "FAIL (expected, see ledger)" if rep.skipped else "FAIL"
        else:
            status = "PASS" if rep.passed else "SKIP" if rep.skipped else "FAIL"
        _CRITERIA[num] = (status, text)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        status, text = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d} {status}: {text}")
