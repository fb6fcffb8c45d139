import random

import pytest

from hm_lab.geometry import SolitonParams

# criterion number -> (passed, summary); filled by test_acceptance.py
ACCEPTANCE = {}


def random_member(rng, ns=(3, 4, 5, 6), ell=(0.5, 3.0), a=(-5.0, 5.0), r0=(0.5, 2.0)):
    return SolitonParams(
        n=rng.choice(ns),
        ell=rng.uniform(*ell),
        a=rng.uniform(*a),
        r0=rng.uniform(*r0),
    )


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def hm3():
    """n = 3, ell = 1, a = 0, r0 = 1 with unit theta period."""
    return SolitonParams(n=3, lambdas=(1.0,))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {text}")
