import importlib.util

import numpy as np
import pytest

from hyporate import kernels

BACKENDS = ["python"]
if importlib.util.find_spec("hyporate._ckernels") is not None:
    BACKENDS.append("cython")


@pytest.fixture(params=BACKENDS)
def backend(request):
    return kernels.backend_module(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
