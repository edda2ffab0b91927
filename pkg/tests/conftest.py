import pytest

from spquad import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once so timed tests measure algorithm cost."""
    _kernels.warmup()
