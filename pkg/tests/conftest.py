import sys

import pytest

from casimirkick.config import parse_config

MINIMAL = """
[cavity]
omega = 6.283185307179586e9
volume = 1e-6

[electron]
v0 = 1e7
flight_length = 0.01
"""


def make_config(extra="", base=MINIMAL):
    return parse_config(base + "\n" + extra)


@pytest.fixture
def minimal_text():
    return MINIMAL


@pytest.fixture
def write_config(tmp_path):
    def _write(text, name="run.ini"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
