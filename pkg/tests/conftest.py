import pytest

from factories import binary_spec, z2_line
from games import GameStructure
from numerics import Grid1D


@pytest.fixture
def binary_normal():
    """β = (0.5, 1), g ~ N(0, 1) on the 65 x 33 identification grid."""
    return binary_spec(0.5, 1.0, z2_values=z2_line(0.5, 1.5, 33))


@pytest.fixture
def example_game():
    def make(concept: str, selection: float = 0.5) -> GameStructure:
        return GameStructure.two_player((0.5, -0.25), -1.0, -0.5, concept, selection=selection)

    return make


@pytest.fixture
def wide_v_grids():
    return [Grid1D(lo=-7.0, hi=7.0, n=141), Grid1D(lo=-7.0, hi=7.0, n=141)]
