from functools import lru_cache

import pytest

from edgebits.dmrg import dmrg_ground_state
from edgebits.model import ChainConfig, Pinning, build_hamiltonian


@lru_cache(maxsize=None)
def _ground(L, J, kind, eps):
    return dmrg_ground_state(build_hamiltonian(ChainConfig(L, J, Pinning(kind, eps))))


@pytest.fixture(scope="session")
def ground():
    """Cached DMRG ground state: ``ground(L, J, kind="polarized_z", eps=0.05)``."""

    def get(L, J, kind="polarized_z", eps=0.05):
        return _ground(L, float(J), kind, eps)

    return get


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
