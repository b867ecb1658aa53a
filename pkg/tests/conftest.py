import json
import pathlib

import numpy as np
import pytest

from cohdisc.measures import OptimizerConfig
from cohdisc.protocols import StatePrepConfig, stateprep_bound_series
from cohdisc.qcore import QState

DATA = pathlib.Path(__file__).parent / "data"

FIG2 = StatePrepConfig(6, 0.2, 0.45)


@pytest.fixture
def plus():
    return QState.from_ket([1, 1])


@pytest.fixture
def bell():
    return QState.from_ket([1, 0, 0, 1], (2, 2))


def werner(p):
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return QState((2, 2), p * np.outer(phi, phi) + (1 - p) * np.eye(4) / 4)


@pytest.fixture(scope="session")
def fig2_series():
    return stateprep_bound_series(FIG2, OptimizerConfig())


@pytest.fixture(scope="session")
def fig2_golden():
    return json.loads((DATA / "fig2_golden.json").read_text())


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def verdict(capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    def record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
