"""Shared fixtures: the classical example game and the worked initial states."""

import pytest

from qhd_system.core.classical import BimatrixGame2x2, HawkDoveParams, build_hawk_dove
from qhd_system.core.quantum import InitialState, payoff_surface
from qhd_system.core.verification import WORKED_STATES


@pytest.fixture
def example_params() -> HawkDoveParams:
    return HawkDoveParams(resource_value=50.0, injury_cost=-100.0, display_cost=-10.0)


@pytest.fixture
def example_game(example_params) -> BimatrixGame2x2:
    return build_hawk_dove(example_params)


@pytest.fixture
def worked_state():
    """Factory: worked_state("symmetric-case-3") -> InitialState."""
    def make(name: str) -> InitialState:
        return InitialState.from_squared_moduli(*WORKED_STATES[name])
    return make


@pytest.fixture
def worked_surfaces(worked_state, example_game):
    """Factory: worked_surfaces(name) -> (surface A, surface B) for the example game."""
    def make(name: str):
        return payoff_surface(worked_state(name), example_game)
    return make


@pytest.fixture
def config_text():
    """Factory for small configuration documents with the example [game] section."""
    def make(body: str = "") -> str:
        return "[game]\nresource_value = 50\ninjury_cost = -100\ndisplay_cost = -10\n" + body
    return make
