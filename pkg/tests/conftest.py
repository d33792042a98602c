import importlib

import pytest

from dictanomaly._ext import _fallback

ACCEPTANCE_LINES: list[str] = []


def _backends():
    out = [pytest.param(_fallback, id="python")]
    try:
        core = importlib.import_module("dictanomaly._ext._core")
    except ImportError:
        out.append(pytest.param(None, id="cython", marks=pytest.mark.skip("extension not built")))
    else:
        out.append(pytest.param(core, id="cython"))
    return out


@pytest.fixture(params=_backends(), scope="session")
def backend(request):
    return request.param


def pytest_runtest_logreport(report):
    for key, value in report.user_properties:
        if key == "acceptance" and value not in ACCEPTANCE_LINES:
            ACCEPTANCE_LINES.append(value)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
