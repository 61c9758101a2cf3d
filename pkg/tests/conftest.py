import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from prtrp import build_index, make_instance

# The 3-vertex worked example: source 1 feeds leaves 2 and 3, symmetric
# road distances d(0,1)=1 d(0,2)=2 d(0,3)=3 d(1,2)=1 d(1,3)=2 d(2,3)=1.
STAR_TRAVEL = [
    [0, 1, 2, 3],
    [1, 0, 1, 2],
    [2, 1, 0, 1],
    [3, 2, 1, 0],
]


@pytest.fixture
def star():
    return make_instance("star", STAR_TRAVEL, {2: 1, 3: 1}, source=1)


@pytest.fixture
def star_index(star):
    return build_index(star)


@pytest.fixture
def chain():
    # Same road network, power tree is the path 1 -> 2 -> 3.
    return make_instance("chain", STAR_TRAVEL, {2: 1, 3: 2}, source=1)


@pytest.fixture
def chain_index(chain):
    return build_index(chain)
