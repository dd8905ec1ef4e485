import pytest

from ezk.primitives import DeterministicRng


@pytest.fixture
def rng():
    return DeterministicRng(12345)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running statistical checks")
    config.addinivalue_line("markers", "acceptance: acceptance criteria with runtime budgets")
