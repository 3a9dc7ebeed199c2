"""Stag Hunt workbench: guilt-averse Theory-of-Mind learners, equilibrium
analysis of the guilt-transformed game, and desk-scale experiment harnesses
for matrix-form self-play, group tournaments, and a grid-world variant."""

__version__ = "0.1.0"

from .game import C, U, UNKNOWN, JointOutcome, PayoffMatrix, PolicyLabel, payoff, validate_payoffs
from .beliefs import Belief, ToMState, make_tom_state, update_beliefs
from .shaping import (
    GuiltParams,
    InequityParams,
    expected_other_value,
    guilt_reward,
    inequity_reward,
    shape_reward,
)
from .equilibrium import (
    EquilibriumReport,
    TransformedGame,
    guilt_threshold_f,
    pure_nash,
    transform_game,
    verify_observation1,
)

__all__ = [
    "__version__",
    "C", "U", "UNKNOWN",
    "PolicyLabel", "PayoffMatrix", "JointOutcome",
    "payoff", "validate_payoffs",
    "Belief", "ToMState", "make_tom_state", "update_beliefs",
    "GuiltParams", "InequityParams",
    "expected_other_value", "guilt_reward", "shape_reward", "inequity_reward",
    "TransformedGame", "EquilibriumReport",
    "transform_game", "pure_nash", "guilt_threshold_f", "verify_observation1",
]
