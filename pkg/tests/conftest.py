import numpy as np
import pytest

from divlab.knots import KnotSet
from divlab.verify.sampling import sample_knots, trial_rng


def random_knots(rng, m, r, min_gap=1e-3, policy="random", preset="uniform"):
    return sample_knots(rng, m + 1, r, min_gap, policy, preset)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def hermite_example():
    return KnotSet.parse("-1,-1,1,1")


def trials(seed, count):
    for i in range(count):
        yield i, trial_rng(seed, i)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        passed, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'} {detail}")
