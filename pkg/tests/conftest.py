import pytest

from brickeval import BrickStructure, DEFAULT_WORLD, make_brick


@pytest.fixture
def world():
    return DEFAULT_WORLD


@pytest.fixture
def perfect_fixture():
    """Two 1x2 bricks on the ground bridged by a 1x4: scores the maximum."""
    return BrickStructure((
        make_brick(1, 2, 0, 0, 0),
        make_brick(1, 2, 0, 2, 0),
        make_brick(1, 4, 0, 0, 1),
    ))
