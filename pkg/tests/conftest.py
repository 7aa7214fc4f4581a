from __future__ import annotations

import numpy as np
import pytest

from rrgcouple.rng import rng_stream


@pytest.fixture
def gen():
    return rng_stream(20240611, 0).generator


def three_se(p: float, trials: int) -> float:
    return 3 * np.sqrt(p * (1 - p) / trials)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Recorder for acceptance criteria: one PASS/FAIL line per criterion."""

    def record(label: str, ok: bool, detail: str, elapsed: float, budget: float) -> None:
        within = elapsed <= budget
        status = "PASS" if ok and within else "FAIL"
        line = f"{label} {status}: {detail} [{elapsed:.1f}s / budget {budget:.0f}s]"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
        assert within, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
