import pytest
from hypothesis import settings

from starext.hyper import Universe
from starext.oracle import OracleConfig, OracleState

settings.register_profile("starext", deadline=None, derandomize=True)
settings.load_profile("starext")


def make_universe(horizon: int = 2000, tiebreak: str = "least") -> Universe:
    return Universe(OracleState(OracleConfig(horizon=horizon, tiebreak=tiebreak)))


@pytest.fixture
def u() -> Universe:
    return make_universe()
