import math

import pytest

from pamstat.core import BAR, MuscleGeometry
from pamstat.muscles import RationalFestoParams, TheoreticalMcKibben


@pytest.fixture
def mckibben_geom():
    return MuscleGeometry.from_human(1.0, 40.0, 23.5)


@pytest.fixture
def festo_geom():
    return MuscleGeometry.from_human(1.09, 40.0, 25.5)


@pytest.fixture
def festo_params(festo_geom):
    return RationalFestoParams(festo_geom, c=0.0, d=-10.5 * BAR, e=-779.0 * BAR**2)


@pytest.fixture
def mckibben(mckibben_geom):
    return TheoreticalMcKibben(mckibben_geom)


# -- acceptance report ---------------------------------------------------------

_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and not report.passed):
        detail = "; ".join(v for k, v in item.user_properties if k == "measured")
        _ACCEPTANCE[number] = ("PASS" if report.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title, detail = _ACCEPTANCE[number]
        line = f"{status} criterion {number}: {title}"
        terminalreporter.write_line(line + (f" [{detail}]" if detail else ""))
