import numpy as np
import pytest


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_density(rng, dim, rank=None):
    g = rand_complex(rng, dim, rank or dim)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def rand_pure(rng, dim):
    v = rand_complex(rng, dim)
    return v / np.linalg.norm(v)


def rand_unitary(rng, dim):
    q, r = np.linalg.qr(rand_complex(rng, dim, dim))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE_LINES = []


def pytest_configure(config):
    config._acceptance_lines = _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
