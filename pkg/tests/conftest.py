import random
from fractions import Fraction

import pytest

from tfpvkit import FIXTURES, load_fixture

ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail=""):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(params=FIXTURES)
def fixture_net(request):
    return request.param, load_fixture(request.param)


@pytest.fixture
def rng():
    return random.Random(1234)


def random_rational(rng, lo=1, hi=9, den=5):
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))
