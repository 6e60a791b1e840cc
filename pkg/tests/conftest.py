import numpy as np
import pytest

import rieszprob as R


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def fair_coin():
    """Single fair coin on a one-atom base."""
    base = R.make_space([1.0])
    T = R.make_cond_expectation(base, [[0]])
    return R.make_bernoulli_process(T, base.constant(0.5), 1)


@pytest.fixture
def quarter_coins():
    """Two coins with success probability 1/4 on a one-atom base."""
    base = R.make_space([1.0])
    T = R.make_cond_expectation(base, [[0]])
    return R.make_bernoulli_process(T, base.constant(0.25), 2)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.LINES:
        terminalreporter.write_line(line)
