from __future__ import annotations

import re
from collections import defaultdict
from fractions import Fraction as F
from pathlib import Path

import pytest

from falgebroid.frobenius import FrobeniusSpec, structure_constants
from falgebroid.poly import MultiPoly

SPEC_DIR = Path(__file__).resolve().parent.parent / "specs"


def make_n2() -> FrobeniusSpec:
    t1, t2 = MultiPoly.var(2, 0), MultiPoly.var(2, 1)
    F_ = t1 * t1 * t2 * F(1, 2) + t2 ** 4
    return FrobeniusSpec(2, F_, [[0, 1], [1, 0]], [[1, 0], [0, F(2, 3)]], [0, 0], F(1, 3))


A3_TERMS = {(2, 0, 1): F(1, 2), (1, 2, 0): F(1, 2), (0, 2, 2): F(-1, 16), (0, 0, 5): F(1, 960)}


def make_a3(terms=None) -> FrobeniusSpec:
    pot = MultiPoly(3, terms or A3_TERMS)
    return FrobeniusSpec(3, pot, [[0, 0, 1], [0, 1, 0], [1, 0, 0]],
                         [[1, 0, 0], [0, F(3, 4), 0], [0, 0, F(1, 2)]], [0, 0, 0], F(1, 2))


def make_unit_euler() -> FrobeniusSpec:
    s = make_n2()
    return FrobeniusSpec(2, s.potential, s.metric, [[0, 0], [0, 0]], [1, 0], s.charge)


@pytest.fixture(scope="session")
def n2():
    s = make_n2()
    return s, structure_constants(s)


@pytest.fixture(scope="session")
def a3():
    s = make_a3()
    return s, structure_constants(s)


@pytest.fixture(scope="session")
def unit_euler():
    s = make_unit_euler()
    return s, structure_constants(s)


# -- acceptance summary: one line per criterion ---------------------------------

_outcomes: dict[int, list[str]] = defaultdict(list)
_CRITERION = re.compile(r"test_criterion(\d+)_")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    m = _CRITERION.search(report.nodeid)
    if m and "test_acceptance.py" in report.nodeid:
        _outcomes[int(m.group(1))].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for k in sorted(_outcomes):
        status = "PASS" if all(o == "passed" for o in _outcomes[k]) else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {status}  ({len(_outcomes[k])} tests)")
