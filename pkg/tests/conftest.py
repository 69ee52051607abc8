import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def age_recurrence_violations(ages: np.ndarray, events: np.ndarray, user: int) -> list[int]:
    """Slots where the age neither increments nor resets to slot - generation of a decode at that slot."""
    resets = {int(s): int(s - g) for u, s, g in events if u == user}
    bad = []
    prev = 0
    for i, a in enumerate(ages):
        t = i + 1
        expected = resets.get(t, prev + 1)
        if a != expected or a < 0:
            bad.append(t)
        prev = a
    return bad


@pytest.fixture
def check_ages():
    def check(trace):
        for user, ages in ((1, trace.ages1), (2, trace.ages2)):
            assert age_recurrence_violations(ages, trace.events, user) == []
    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
