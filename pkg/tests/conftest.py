import numpy as np
import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_instance(rng, d, n=200):
    """Skewed mixed data with a generic non-degenerate (m, W)."""
    S = np.column_stack([rng.exponential(size=n) * rng.choice([-1, 1]) for _ in range(d)])
    A = rng.normal(size=(d, d)) + 2 * np.eye(d)
    X = S @ A.T
    m = X.mean(axis=0) + 0.05 * X.std(axis=0) * rng.normal(size=d)
    W = rng.normal(size=(d, d)) + np.eye(d)
    return X, m, W
