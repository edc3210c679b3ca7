from __future__ import annotations

import pytest

from qample.geometry import make_geometry


@pytest.fixture(scope="session")
def p1():
    return make_geometry("p1")


@pytest.fixture(scope="session")
def p2():
    return make_geometry("p2")


@pytest.fixture(scope="session")
def p1xp1():
    return make_geometry("p1xp1")


@pytest.fixture(scope="session")
def f1():
    return make_geometry("hirzebruch1")


@pytest.fixture(scope="session")
def threefold():
    return make_geometry("totaro3fold")


@pytest.fixture(scope="session")
def sl3b():
    return make_geometry("sl3b")


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
