import numpy as np
import pytest

from fracphase import PeriodicGrid, SpectralWorkspace


@pytest.fixture
def grid1d():
    return PeriodicGrid(1, 64, 1.0)


@pytest.fixture
def ws1d(grid1d):
    return SpectralWorkspace(grid1d)


@pytest.fixture
def ws2d():
    return SpectralWorkspace(PeriodicGrid(2, 32, 2.0))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        _CRITERIA[number] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[number])
