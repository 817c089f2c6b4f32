import random
from fractions import Fraction

import pytest

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the acceptance summary, then assert."""

    def _report(criterion, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}  {detail}".rstrip())
        assert ok, f"{criterion}: {detail}"

    return _report


TABLE_I = [(1, 2), (1, 3), (2, 4)]
TABLE_II = [(1, 5), (Fraction(3, 2), 4), (1, 6)]


def random_panel(rng: random.Random, max_n=20, grid=Fraction(1, 4), lo=1, hi=9):
    """Random interval list with endpoints on a regular grid inside [lo, hi]."""
    steps = int((hi - lo) / grid)
    out = []
    for _ in range(rng.randint(1, max_n)):
        a, b = sorted(rng.randint(0, steps) for _ in range(2))
        out.append((lo + a * grid, lo + b * grid))
    return out


def random_nondegenerate_panel(rng, **kw):
    while True:
        p = random_panel(rng, **kw)
        if any(a < b for a, b in p):
            return p
