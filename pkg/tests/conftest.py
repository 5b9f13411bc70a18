import pytest

from localp2 import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile/late-bind the hot kernels once so timed tests measure math,
    # not JIT latency
    _kernels.warmup()
