import os
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("ci", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


def rand_q(rng: random.Random, lo=-6, hi=6, dens=(1, 2, 3, 4, 5, 8)) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.choice(dens))


def rand_basis(rng: random.Random, n: int, k: int):
    """k rational vectors in R^n, redrawn until independent."""
    from grasscert.exactcore import RatMatrix
    while True:
        vecs = [[rand_q(rng) for _ in range(n)] for _ in range(k)]
        if RatMatrix.from_rows(vecs).rank() == k:
            return vecs


@pytest.fixture
def rng():
    return random.Random(12345)


# --- acceptance summary ----------------------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """record(criterion, ok, detail) prints now and again in the terminal summary."""
    def record(num: int, ok: bool, detail: str) -> bool:
        line = f"[acceptance {num:2d}] {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[num] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[num])
