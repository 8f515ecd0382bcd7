import sys
from pathlib import Path

import pytest

root_dir = Path(__file__).parent.parent
if str(root_dir) not in sys.path:
    sys.path.insert(0, str(root_dir))

from allocation_instance import Instance, Mode  # noqa: E402
from utility_distributions import FamilyMixture, MixtureName  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--run-acceptance", action="store_true", default=False,
                     help="run the long Monte-Carlo acceptance criteria")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-acceptance"):
        return
    skip = pytest.mark.skip(reason="needs --run-acceptance")
    for item in items:
        if "acceptance" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def unit_uniform():
    return FamilyMixture(name=MixtureName.UNIFORM_ONLY, uniform_a=(0.0, 0.0), uniform_b=(1.0, 1.0))


@pytest.fixture
def hand_trace():
    """Two agents, three goods, every item Uniform(0, 1)."""
    return Instance.from_values([[0.9, 0.2, 0.3], [0.3, 0.9, 0.8]], Mode.GOODS)
