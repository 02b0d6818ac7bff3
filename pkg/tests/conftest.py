import numpy as np
import pytest

from eitnoise.lambda_system import AtomicParams


@pytest.fixture
def weak_probe_params():
    """Rates in units of a reference rate; used throughout the steady-state tests."""
    return AtomicParams(g=1.0, N=1.0, omega_c=1.0, gamma_b=0.5, gamma_c=0.5,
                        gamma_ba=0.5, gamma_ac=0.5, gamma_bc_prime=0.01)


@pytest.fixture
def lr_params():
    """g^2 N / c = 1, gamma_ba = 1, gamma_bc' = 0.01, Omega_c = 1, L = 100."""
    return AtomicParams(g=1.0, N=1.0, c_light=1.0, omega_c=1.0, gamma_b=0.5, gamma_c=0.5,
                        gamma_ba=1.0, gamma_ac=1.0, gamma_bc_prime=0.01, length=100.0)


def random_params(rng, **fixed):
    gb, gc = rng.uniform(0.05, 1.0, 2)
    values = dict(
        g=rng.uniform(0.1, 2.0),
        N=rng.uniform(0.1, 2.0),
        c_light=rng.uniform(0.5, 2.0),
        omega_c=rng.uniform(0.2, 3.0) * np.exp(1j * rng.uniform(0, 2 * np.pi)),
        gamma_b=gb,
        gamma_c=gc,
        gamma_bc_prime=rng.uniform(0.0, 0.2),
        gamma_bc_popexch=rng.uniform(0.0, 0.5),
        length=rng.uniform(0.0, 50.0),
    )
    values.update(fixed)
    return AtomicParams(**values)


@pytest.fixture
def rng():
    return np.random.default_rng(20260116)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def record_acceptance(number, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {detail}"
    ACCEPTANCE_LINES[number] = line
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
