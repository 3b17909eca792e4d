import numpy as np
import pytest

from eventgibbs import _pykernels

try:
    from eventgibbs import _ckernels
except ImportError:
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])


@pytest.fixture(params=BACKENDS, ids=lambda k: k.BACKEND)
def kernel_module(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)
