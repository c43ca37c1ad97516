from os import environ

import numpy as np
from dotenv import load_dotenv
from pytest import fixture, mark

from merge_advisor.traffic import IdmParams, RampGeometry

load_dotenv()


def pytest_addoption(parser):
    parser.addoption(
        "--slow",
        action="store_true",
        dest="slow",
        default=False,
        help="Run the long simulation sweeps",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running simulation sweep")


def pytest_collection_modifyitems(config, items):
    if config.getoption("slow") or environ.get("MERGE_ADVISOR_SLOW_TESTS"):
        return
    skip_slow = mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@fixture
def rng():
    """A fixed-seed generator so randomized tests are reproducible."""
    return np.random.default_rng(20240611)


@fixture
def geometry():
    return RampGeometry()


@fixture
def idm_params():
    return IdmParams()
