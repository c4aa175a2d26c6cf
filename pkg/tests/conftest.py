import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from roadkpp.model import LOGISTIC, REMARK33, Params  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def base():
    return Params(D=1.0, d=1.0, mu=1.0, nu=1.0, L=2.0)


@pytest.fixture
def logistic():
    return LOGISTIC


@pytest.fixture
def remark33():
    return REMARK33
