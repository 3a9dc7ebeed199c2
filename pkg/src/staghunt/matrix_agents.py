"""One-shot (matrix-form) Stag Hunt agents.

Three families live here:

    * value learners (guilt-averse with or without first-order belief
      updates, or purely individual when guilt is off) that pick actions
      from their action values and learn with a TD(1)-style update whose
      bootstrap term is the belief-weighted best material payoff;
    * the Pavlov baseline (generalised Win-Stay-Lose-Shift) that cooperates
      with probability i/n and nudges i on behaviour matches/mismatches;
    * the single-iteration driver that plays two agents against each other
      and routes every per-iteration update in the right order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .beliefs import ToMState, update_beliefs
from .game import C, U, JointOutcome, PayoffMatrix, PolicyLabel
from .shaping import GuiltParams, expected_other_value, guilt_reward, shape_reward


@dataclass(frozen=True, slots=True)
class Exploration:
    """Action-selection settings.

    kind="softmax": P(C) is a logistic over the value gap at the current
    temperature, which decays geometrically each iteration.
    kind="epsilon": greedy on values with probability 1-epsilon, uniform
    otherwise (ties break toward C).
    """

    kind: str = "softmax"
    temperature: float = 1.0
    temperature_decay: float = 0.995
    epsilon: float = 0.1

    def __post_init__(self):
        if self.kind not in ("softmax", "epsilon"):
            raise ValueError(f"unknown exploration kind: {self.kind}")
        if self.kind == "softmax" and not self.temperature > 0:
            raise ValueError("softmax temperature must be > 0")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")


@dataclass(frozen=True, slots=True)
class MatrixAgentState:
    """A value learner for the one-shot game.

    guilt=None disables reward shaping entirely (the individual learner and
    the ToM-without-guilt variant); beliefs keep updating either way.
    """

    values: dict[PolicyLabel, float]
    tom: ToMState
    guilt: GuiltParams | None
    alpha: float
    gamma: float
    explore: Exploration

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")


@dataclass(frozen=True, slots=True)
class PavlovState:
    """Cooperates with probability i/n; i moves by one on match/mismatch."""

    i_count: int
    n: int

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("Pavlov resolution n must be positive")
        if not 0 <= self.i_count <= self.n:
            raise ValueError(f"i_count must lie in [0, {self.n}], got {self.i_count}")

    @property
    def p_cooperate(self) -> float:
        return self.i_count / self.n


MatrixPlayer = Union[MatrixAgentState, PavlovState]


def values_for_cooperation_probability(
    p: float, temperature: float = 1.0, clamp: float = 1e-3
) -> dict[PolicyLabel, float]:
    """Initial action values whose softmax P(C) equals p at the given temperature.

    p is clamped away from {0, 1} so the log-odds stay finite; the clamp is
    what "never cooperates" means operationally for a softmax policy.
    """
    p = min(max(p, clamp), 1.0 - clamp)
    gap = temperature * math.log(p / (1.0 - p))
    return {C: gap / 2.0, U: -gap / 2.0}


def _logistic(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def cooperation_probability(agent: MatrixAgentState) -> float:
    """The agent's current probability of playing C under its exploration rule."""
    gap = agent.values[C] - agent.values[U]
    if agent.explore.kind == "softmax":
        return _logistic(gap / agent.explore.temperature)
    eps = agent.explore.epsilon
    greedy_c = 1.0 if gap >= 0 else 0.0
    return (1.0 - eps) * greedy_c + eps / 2.0


def select_action(agent: MatrixAgentState, rng: np.random.Generator) -> PolicyLabel:
    return C if rng.random() < cooperation_probability(agent) else U


def decay_exploration(agent: MatrixAgentState) -> MatrixAgentState:
    if agent.explore.kind != "softmax" or agent.explore.temperature_decay == 1.0:
        return agent
    new_temp = agent.explore.temperature * agent.explore.temperature_decay
    return replace(agent, explore=replace(agent.explore, temperature=new_temp))


def td1_update(
    agent: MatrixAgentState,
    taken: PolicyLabel,
    shaped_reward: float,
    matrix: PayoffMatrix,
) -> MatrixAgentState:
    """V(taken) += alpha * (shaped + gamma * lookahead - V(taken)).

    The lookahead is the best material payoff under the zero-order belief
    about the opponent's action; beliefs must already reflect this
    iteration's observations when this runs.
    """
    b0 = agent.tom.zero_order
    lookahead = max(
        b0.mass(C) * matrix.payoff(C, C) + b0.mass(U) * matrix.payoff(C, U),
        b0.mass(C) * matrix.payoff(U, C) + b0.mass(U) * matrix.payoff(U, U),
    )
    delta = shaped_reward + agent.gamma * lookahead - agent.values[taken]
    new_values = dict(agent.values)
    new_values[taken] = agent.values[taken] + agent.alpha * delta
    return replace(agent, values=new_values)


def pavlov_act(state: PavlovState, rng: np.random.Generator) -> PolicyLabel:
    return C if rng.random() < state.p_cooperate else U


def pavlov_update(state: PavlovState, own: PolicyLabel, other: PolicyLabel) -> PavlovState:
    """Unit step up on matched behaviours, unit step down otherwise, clamped."""
    if own is other:
        return replace(state, i_count=min(state.i_count + 1, state.n))
    return replace(state, i_count=max(state.i_count - 1, 0))


@dataclass(frozen=True, slots=True)
class IterationRecord:
    """Per-agent diagnostics from one matrix iteration (None for Pavlov)."""

    phi: float | None
    psychological: float | None
    shaped: float | None


def _act(player: MatrixPlayer, rng: np.random.Generator) -> PolicyLabel:
    if isinstance(player, PavlovState):
        return pavlov_act(player, rng)
    return select_action(player, rng)


def _learn(
    player: MatrixPlayer,
    own: PolicyLabel,
    other: PolicyLabel,
    matrix: PayoffMatrix,
) -> tuple[MatrixPlayer, IterationRecord]:
    if isinstance(player, PavlovState):
        return pavlov_update(player, own, other), IterationRecord(None, None, None)

    material = matrix.payoff(own, other)
    other_material = matrix.payoff(other, own)
    new_tom = update_beliefs(player.tom, other, own, matrix)
    player = replace(player, tom=new_tom)
    phi = expected_other_value(new_tom, matrix)
    psychological = guilt_reward(player.guilt, phi, other_material) if player.guilt else 0.0
    shaped = shape_reward(material, psychological)
    player = td1_update(player, own, shaped, matrix)
    player = decay_exploration(player)
    return player, IterationRecord(phi=phi, psychological=psychological, shaped=shaped)


def play_matrix_iteration(
    agents: tuple[MatrixPlayer, MatrixPlayer],
    matrix: PayoffMatrix,
    rng: np.random.Generator,
) -> tuple[tuple[MatrixPlayer, MatrixPlayer], JointOutcome, tuple[float, float], tuple[IterationRecord, IterationRecord]]:
    """Play one simultaneous round and run every agent's update pipeline.

    Agents never see each other's internals, only the revealed labels.
    Returns (updated agents, outcome from agent 0's perspective, material
    rewards, per-agent diagnostics).
    """
    a0 = _act(agents[0], rng)
    a1 = _act(agents[1], rng)
    rewards = (matrix.payoff(a0, a1), matrix.payoff(a1, a0))
    new0, rec0 = _learn(agents[0], a0, a1, matrix)
    new1, rec1 = _learn(agents[1], a1, a0, matrix)
    return (new0, new1), JointOutcome(label_self=a0, label_other=a1), rewards, (rec0, rec1)
