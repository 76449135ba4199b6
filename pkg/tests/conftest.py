from pathlib import Path

import pytest

from veriodd import parse_cod, parse_odd
from veriodd.engine import default_solver_config

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = Path(__file__).parent / "golden"

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def parking_odd_text() -> str:
    return (DATA_DIR / "parking_odd.yaml").read_text()


@pytest.fixture(scope="session")
def parking_cod_text() -> str:
    return (DATA_DIR / "parking_cod.yaml").read_text()


@pytest.fixture(scope="session")
def parking_odd(parking_odd_text):
    return parse_odd(parking_odd_text)


@pytest.fixture(scope="session")
def parking_cod(parking_odd, parking_cod_text):
    return parse_cod(parking_cod_text, parking_odd.symbols)


@pytest.fixture(scope="session")
def solver_config():
    return default_solver_config()


class AcceptanceLog:
    """Collects one pass/fail line per acceptance criterion."""

    def record(self, criterion: str, passed: bool, detail: str = "") -> None:
        status = "PASS" if passed else "FAIL"
        line = f"ACCEPTANCE {criterion}: {status}"
        if detail:
            line += f"  ({detail})"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    def check(self, criterion: str, passed: bool, detail: str = "") -> None:
        self.record(criterion, passed, detail)
        assert passed, f"acceptance criterion failed: {criterion} {detail}"


@pytest.fixture(scope="session")
def acceptance() -> AcceptanceLog:
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    report = Path(__file__).parent.parent / "acceptance_report.txt"
    report.write_text("\n".join(_ACCEPTANCE_LINES) + "\n")
