import numpy as np
import pytest

from readout_rebalance import build_tensor_response, default_response
from readout_rebalance.core import QubitNoiseParams


@pytest.fixture(scope="session")
def committed_response():
    """The 5-qubit asymmetric model shipped with the package."""
    return default_response()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def make_response(eps01, eps10):
    return build_tensor_response(
        [QubitNoiseParams(a, b) for a, b in zip(eps01, eps10)]
    )
