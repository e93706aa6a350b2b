from __future__ import annotations

import pytest

from pbrigid.coeffs import make_field

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    entry = _CRITERIA.setdefault(n, {"title": title, "passed": True, "ran": False, "failures": []})
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry["ran"] = True
        if report.outcome != "passed":
            entry["passed"] = False
            entry["failures"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        if not e["ran"]:
            status = "NOT RUN"
        else:
            status = "PASS" if e["passed"] else "FAIL"
        line = f"criterion {n:2d} [{status}] {e['title']}"
        if e["failures"]:
            line += f"  (failing: {', '.join(e['failures'])})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def F2():
    return make_field(2)


@pytest.fixture(scope="session")
def F3():
    return make_field(3)


@pytest.fixture(scope="session")
def F5():
    return make_field(5)


@pytest.fixture(scope="session")
def F7():
    return make_field(7)


@pytest.fixture(scope="session")
def Q():
    return make_field(0)
