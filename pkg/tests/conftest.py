import pytest

from entkit.states import make_rng

CRITERIA = {}


@pytest.fixture
def rng():
    return make_rng(20240611)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): numbered acceptance criterion")
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    m = item.get_closest_marker("criterion")
    if m is not None and report.when == "call":
        soft = item.get_closest_marker("xfail") is not None
        ok = report.passed and not hasattr(report, "wasxfail")
        CRITERIA[m.args[0]] = "PASS" if ok else ("FAIL (advisory)" if soft else "FAIL")
    return report


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(f"criterion {n:2d}: {CRITERIA[n]}")
