"""Psychological reward shaping: guilt aversion and the inequity baseline.

The guilt pipeline per terminal outcome:

    phi      expected material value the other agent experiences, under the
             agent's (zero-order x first-order) beliefs
    guilt    -theta * max(0, phi - other's realised material reward)
    shaped   material + guilt

Shaping applies to the terminal material reward only; intermediate steps
of multi-step games carry zero material reward.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .beliefs import ToMState
from .game import C, U, PayoffMatrix


@dataclass(frozen=True, slots=True)
class GuiltParams:
    """Guilt sensitivity theta > 0."""

    theta: float

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"guilt sensitivity must be > 0, got {self.theta}")


@dataclass(frozen=True, slots=True)
class InequityParams:
    """Advantageous/disadvantageous inequity sensitivities for N agents."""

    theta_advantageous: float
    theta_disadvantageous: float
    n_agents: int = 2

    def __post_init__(self):
        if self.theta_advantageous < 0 or self.theta_disadvantageous < 0:
            raise ValueError("inequity sensitivities must be >= 0")
        if self.n_agents < 2:
            raise ValueError("inequity shaping needs at least 2 agents")


def expected_other_value(state: ToMState, matrix: PayoffMatrix) -> float:
    """Expected material value the other agent experiences (phi).

    Bilinear in the two beliefs: sums the other's payoff over joint labels,
    weighting the other's label by the zero-order belief and this agent's
    own label by the first-order belief. Always lands in [g, h].
    """
    b0 = state.zero_order  # over the other's label
    b1 = state.first_order  # over this agent's label, as seen by the other
    total = 0.0
    for own in (C, U):
        for other in (C, U):
            total += b0.mass(other) * b1.mass(own) * matrix.payoff(other, own)
    return total


def guilt_reward(params: GuiltParams, phi_j: float, actual_other_reward: float) -> float:
    """Psychological reward of feeling guilty; zero when expectations were met."""
    return -params.theta * max(0.0, phi_j - actual_other_reward)


def shape_reward(material: float, psychological: float) -> float:
    return material + psychological


def inequity_reward(
    params: InequityParams, own_reward: float, other_rewards: Sequence[float]
) -> float:
    """Fehr-Schmidt shaping: penalise both advantageous and disadvantageous gaps."""
    if len(other_rewards) == 0:
        raise ValueError("inequity_reward needs at least one other agent's reward")
    n1 = params.n_agents - 1
    advantage = sum(max(own_reward - r, 0.0) for r in other_rewards)
    disadvantage = sum(max(r - own_reward, 0.0) for r in other_rewards)
    return (
        -params.theta_advantageous / n1 * advantage
        - params.theta_disadvantageous / n1 * disadvantage
    )
