from __future__ import annotations

import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fanoquad.classification import ENUMERATORS, classify_all, enumerate_trinom1
from fanoquad.quadric_rings import grading
from fanoquad.variety_model import relevant_cones

JOBS = max(1, min(8, os.cpu_count() or 1))


@pytest.fixture(scope="session")
def full_result():
    return classify_all(jobs=JOBS)


@pytest.fixture(scope="session")
def fano_candidates():
    """``(setting, p, ring, fan)`` for every enumerated candidate with -K in Mov°."""
    out = []
    for setting, enum in ENUMERATORS.items():
        for p in enum():
            ring = grading(p)
            try:
                fan = relevant_cones(p, ring.minus_kappa, ring)
            except ValueError:
                continue
            out.append((setting, p, ring, fan))
    return out


@pytest.fixture(scope="session")
def trinom1_candidates():
    return enumerate_trinom1()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
