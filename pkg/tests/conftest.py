import numpy as np
import pytest

from wignerbloch import IntegratorConfig, WavepacketSpec, normalize


@pytest.fixture(scope="session")
def quad():
    return IntegratorConfig()


@pytest.fixture(scope="session")
def mc():
    return IntegratorConfig(method="monte_carlo", samples=10**6, seed=7)


@pytest.fixture(scope="session")
def iso_spec():
    return WavepacketSpec.isotropic(1.0, 0.01)


@pytest.fixture(scope="session")
def iso(iso_spec, quad):
    return normalize(iso_spec, quad)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line; call with (label, passed, measured)."""

    def record(label: str, passed: bool, measured: str) -> bool:
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {label}: {measured}")
        print(ACCEPTANCE_LINES[-1])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
