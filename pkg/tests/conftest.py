import pytest

from deathlab import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # JIT compilation happens once here, not inside timed tests
    kernels.warmup()
