import numpy as np
import pytest

from fdcalc import _accel, kernels

BACKENDS = ["numpy"] + (["numba"] if _accel.NUMBA_AVAILABLE else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Run the test once per kernel backend."""
    old = kernels.backend()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(old)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
