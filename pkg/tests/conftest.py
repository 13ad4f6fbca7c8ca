import numpy as np
import pytest

# acceptance bookkeeping: nodeid -> label, nodeid -> outcomes
_LABELS = {}
_CRITERIA = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_collection_modifyitems(items):
    for item in items:
        if "test_criterion_" in item.nodeid:
            _LABELS[item.nodeid] = (item.function.__doc__ or item.name).strip().splitlines()[0]


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA.setdefault(report.nodeid, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_CRITERIA):
        num = int(nodeid.split("test_criterion_")[1][:2])
        ok = all(o == "passed" for o in _CRITERIA[nodeid])
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {_LABELS.get(nodeid, '')}")
