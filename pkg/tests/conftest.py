import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

SUITE_SEED = 20240917

# (label, ok, detail) lines filled in by the acceptance tests
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def table1_suite():
    """Full eight-block study at 5000 replications, shared across modules."""
    from bggl.montecarlo import run_table1_suite

    reports = run_table1_suite(SUITE_SEED, replications=5000)
    return {(r.config.theta_true.alpha, r.config.n): r for r in reports}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label:<18} {detail}")
