import math

import numpy as np
import pytest


class ScriptedRng:
    """Replays a fixed list of uniforms, for stepping through draw-by-draw logic."""

    def __init__(self, draws):
        self._draws = list(draws)

    def random(self):
        return self._draws.pop(0)


class NumpyRng:
    def __init__(self, seed):
        self._gen = np.random.default_rng(seed)

    def random(self):
        return float(self._gen.random())


def binomial_sigma(p, n):
    return math.sqrt(p * (1 - p) / n)


def assert_within_sigma(observed, expected, n, k=3.0):
    sigma = binomial_sigma(expected, n)
    assert abs(observed - expected) <= k * sigma, (
        f"{observed!r} vs {expected!r}: {abs(observed - expected) / sigma:.2f} sigma (n={n})")


@pytest.fixture
def rng():
    return NumpyRng(20070201)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one acceptance line; the verdict is printed in the terminal summary."""

    def _report(criterion, passed, detail):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
