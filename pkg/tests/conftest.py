import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from pfsyn.model import load_model  # noqa: E402
from pfsyn.synthesis import load_gains  # noqa: E402

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parents[1]
MODELS = ROOT / "models"

SIN_MODEL = MODELS / "sin_sector_2state.json"
PEST_MODEL = MODELS / "pest_population_interval.json"
SIN_GAINS = MODELS / "sin_sector_2state_published_gains.json"
PEST_GAINS = MODELS / "pest_population_published_gains.json"

PUBLISHED_K = np.array([[-0.7261, -1.1979]])
PUBLISHED_P = np.array([152.6164, 126.9691])
PUBLISHED_XI = np.array([-110.8075, -152.0953])
PEST_K = np.array([[0.5399, 0.5342, 0.6753]])


@pytest.fixture(scope="session")
def sin_model():
    return load_model(SIN_MODEL)


@pytest.fixture(scope="session")
def pest_model():
    return load_model(PEST_MODEL)


@pytest.fixture(scope="session")
def sin_gains():
    return load_gains(SIN_GAINS)


@pytest.fixture(scope="session")
def pest_gains():
    return load_gains(PEST_GAINS)


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance.append((report.outcome, report.nodeid.split("::")[-1]))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for outcome, name in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
