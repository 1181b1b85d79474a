import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from edsvm.elite import EliteGuide
from edsvm.kernels import Dataset, KernelSpec

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion id -> (passed, message); filled by test_acceptance and printed at the end
ACCEPTANCE = {}

KERNELS = (KernelSpec.linear(), KernelSpec.rbf(1.0), KernelSpec.poly(2))


def noisy_dataset(rng, n, p=2, noise=0.7):
    """Labels from a noisy linear rule so solutions are generic; both classes present."""
    X = rng.normal(size=(n, p))
    y = np.where(X[:, 0] + 0.5 * X[:, -1] + noise * rng.normal(size=n) > 0, 1.0, -1.0)
    y[0], y[1] = 1.0, -1.0
    return Dataset(X, y)


def random_guide(rng, n, m=None, hi=2.0):
    m = int(rng.integers(0, n + 1)) if m is None else m
    idx = rng.choice(n, size=m, replace=False)
    return EliteGuide(idx, rng.uniform(0.0, hi, size=m))


def two_point():
    return Dataset([[1.0, 0.0], [-1.0, 0.0]], [1.0, -1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {msg}")
