import pytest

from foldlaunch.config import reference_config
from foldlaunch.mission import run_mission


@pytest.fixture(scope="session")
def ref_cfg():
    return reference_config()


@pytest.fixture(scope="session")
def moving_cfg():
    return reference_config("squid_moving_vehicle.cfg")


@pytest.fixture(scope="session")
def ref_traj(ref_cfg):
    return run_mission(ref_cfg)


@pytest.fixture(scope="session")
def moving_traj(moving_cfg):
    return run_mission(moving_cfg)
