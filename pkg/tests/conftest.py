import re
from collections import OrderedDict

import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run brute-force oracle tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="brute-force oracle; use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


_criteria = OrderedDict()
_CRITERION = re.compile(r"test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    key = int(m.group(1))
    ok = _criteria.get(key, True)
    if report.when == "call" or report.failed:
        ok = ok and not report.failed
    _criteria[key] = ok


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        status = "PASS" if _criteria[key] else "FAIL"
        terminalreporter.write_line(f"criterion {key:2d}: {status}")
