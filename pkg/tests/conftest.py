import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).resolve().parents[1] / "data"

_acceptance: dict[int, list[str]] = {}


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_ac(\d+)_", report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        _acceptance.setdefault(int(m.group(1)), []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        outcomes = _acceptance[n]
        ok = all(o == "passed" for o in outcomes)
        terminalreporter.write_line(
            f"AC{n}: {'PASS' if ok else 'FAIL'} ({len(outcomes)} test{'s' if len(outcomes) != 1 else ''})"
        )
