import pytest

from basis import JainParams
from numerics import SeriesQuadConfig


@pytest.fixture
def cfg():
    return SeriesQuadConfig()


@pytest.fixture
def loose_cfg():
    return SeriesQuadConfig(tail_tol=1e-10, quad_rel_tol=1e-9)


@pytest.fixture
def params():
    return JainParams(2.0, 0.5)
