import numpy as np
import pytest

from agboost.core import BaseDistribution, BoundedFn, ExampleDistribution


def uniform_pair(table):
    table = np.asarray(table, dtype=np.float64)
    n = int(table.size).bit_length() - 1
    return ExampleDistribution(BaseDistribution.uniform(n), BoundedFn(table))


def random_boolean(n, rng):
    return np.where(rng.random(1 << n) < 0.5, -1.0, 1.0)


def random_explicit(n, rng):
    w = rng.random(1 << n) + 0.05
    return BaseDistribution.explicit(w / w.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            lines += [v for k, v in getattr(rep, "user_properties", []) if k == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
