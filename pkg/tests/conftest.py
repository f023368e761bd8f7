import math

import pytest

from slopesearch import Material, SlopeCase

_ACCEPTANCE = []


def record_criterion(number, passed, detail):
    _ACCEPTANCE.append((number, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")


@pytest.fixture
def case1():
    return SlopeCase.from_degrees(5.0, 26.56, Material.from_degrees(9.8, 10.0, 17.64))


@pytest.fixture
def case2():
    return SlopeCase.from_degrees(8.5, 26.56, Material.from_degrees(14.71, 20.0, 18.63))


@pytest.fixture
def gentle():
    """H = 5 with tan(beta) = 1/2 exactly, so B = 10."""
    return SlopeCase(5.0, math.atan(0.5), SlopeCase.from_degrees(5, 45, Material.from_degrees(10, 30, 18)).profile)
