import math

import pytest

from fieldcheck import kernels
from fieldcheck import sources as S
from fieldcheck.quadrature import VolumeRule

MONO_U0 = math.pi / (4 * 0.3)


@pytest.fixture(scope="session")
def rule():
    return VolumeRule()


@pytest.fixture(scope="session")
def osc():
    return S.oscillating_monopole(1.0, 0.3, 0.1)


@pytest.fixture(scope="session")
def dipole():
    return S.hertzian_dipole(1.0, 0.3, 0.1)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    previous = kernels.backend_name()
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


# --- acceptance bookkeeping: one pass/fail line per criterion --------------

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion the test belongs to")


def _entry(item):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return None
    n, title = mark.args
    return _CRITERIA.setdefault(n, {"title": title, "failed": [], "passed": [], "notes": []})


@pytest.fixture
def measured(request):
    """Attach measured values to the criterion summary line."""
    entry = _entry(request.node)

    def note(text):
        if entry is not None:
            entry["notes"].append(text)

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    entry = _entry(item)
    if entry is None or report.when != "call" and not report.failed:
        return
    if report.when == "call" or report.failed:
        (entry["passed"] if report.passed else entry["failed"]).append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        status = "FAIL" if e["failed"] else "PASS"
        line = f"criterion {n:>2} {status}  {e['title']}"
        if e["notes"]:
            line += "  [" + "; ".join(e["notes"]) + "]"
        if e["failed"]:
            line += "  failing: " + ", ".join(e["failed"])
        terminalreporter.write_line(line)
