import numpy as np
import pytest

REPORT = []


def report(criterion, label, ok, detail=""):
    """Record one pass/fail line for the acceptance summary."""
    REPORT.append(f"criterion {criterion} [{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sample_path():
    from pathlib import Path

    return str(Path(__file__).parent / "data" / "sample_2d.yaml")
