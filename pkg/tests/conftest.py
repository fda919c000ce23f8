import pytest

from flatband.model import ModelParams


@pytest.fixture
def unit():
    return ModelParams(1.0)
