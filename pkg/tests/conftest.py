import re
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture
def run_conf() -> Path:
    return FIXTURES / "run.conf"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    outcomes: dict[int, tuple[str, str]] = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            match = _CRITERION.search(getattr(report, "nodeid", ""))
            if not match:
                continue
            number, label = int(match.group(1)), match.group(2)
            verdict = "PASS" if status == "passed" else "FAIL"
            # a criterion split over several tests fails if any part fails
            if outcomes.get(number, (None, "PASS"))[1] != "FAIL":
                outcomes[number] = (label, verdict)
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(outcomes):
        label, verdict = outcomes[number]
        terminalreporter.write_line(f"criterion {number} ({label}): {verdict}")
