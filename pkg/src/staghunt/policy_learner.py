"""Episodic learner for the grid world: tabular softmax policy trained with
a clipped policy-gradient surrogate, plus the label/belief/guilt wiring
that turns episode outcomes into shaped terminal rewards.

The grid is tiny, so preferences and value estimates are exact tables over
observation encodings; no function approximation anywhere. One iteration =
one episode, then (for guilt agents) a belief update from the revealed
labels, a shaped terminal reward, and a few epochs of clipped updates over
the episode's transitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .beliefs import ToMState, make_tom_state, update_beliefs
from .game import C, KNOWN_LABELS, U, UNKNOWN, PolicyLabel
from .gridworld import (
    EpisodeRecord,
    GridAction,
    GridConfig,
    GridState,
    run_episode,
)
from .shaping import (
    GuiltParams,
    InequityParams,
    expected_other_value,
    guilt_reward,
    inequity_reward,
    shape_reward,
)

ACTIONS = tuple(GridAction)
N_ACTIONS = len(ACTIONS)
ACTION_INDEX = {a: i for i, a in enumerate(ACTIONS)}

ObsKey = tuple


@dataclass(frozen=True, slots=True)
class LearnerConfig:
    step_size: float = 0.05
    gamma: float = 0.99
    clip_ratio: float = 0.2
    epochs: int = 4
    entropy_weight: float = 0.01
    time_bucket_width: int = 1


@dataclass(slots=True)
class PolicyParams:
    """Tabular softmax policy and state-value table."""

    hyper: LearnerConfig = field(default_factory=LearnerConfig)
    preferences: dict[ObsKey, np.ndarray] = field(default_factory=dict)
    values: dict[ObsKey, float] = field(default_factory=dict)

    def prefs(self, key: ObsKey) -> np.ndarray:
        if key not in self.preferences:
            self.preferences[key] = np.zeros(N_ACTIONS)
        return self.preferences[key]

    def value(self, key: ObsKey) -> float:
        return self.values.get(key, 0.0)


def observation_key(state: GridState, agent_index: int, config: LearnerConfig) -> ObsKey:
    """Discrete, injective encoding of what one agent sees."""
    own = state.agent_positions[agent_index]
    other = state.agent_positions[1 - agent_index]
    bucket = state.timestep // config.time_bucket_width
    return (own, other, state.stag_position, bucket)


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max()
    e = np.exp(shifted)
    return e / e.sum()


def action_probs(policy: PolicyParams, key: ObsKey) -> np.ndarray:
    return _softmax(policy.prefs(key))


def sample_action(policy: PolicyParams, key: ObsKey, rng: np.random.Generator) -> GridAction:
    p = action_probs(policy, key)
    return ACTIONS[rng.choice(N_ACTIONS, p=p)]


def discounted_returns(rewards: Sequence[float], gamma: float) -> list[float]:
    out = [0.0] * len(rewards)
    running = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        running = rewards[t] + gamma * running
        out[t] = running
    return out


# One batch item: (observation key, action index, behaviour probability of
# that action when it was taken, advantage).
BatchItem = tuple[ObsKey, int, float, float]


def surrogate_objective(
    preferences: dict[ObsKey, np.ndarray],
    batch: Sequence[BatchItem],
    clip_ratio: float,
    entropy_weight: float,
) -> float:
    """Clipped surrogate plus entropy bonus, as a pure function of preferences."""
    total = 0.0
    for key, action, old_p, adv in batch:
        probs = _softmax(preferences[key])
        ratio = probs[action] / old_p
        clipped = min(max(ratio, 1.0 - clip_ratio), 1.0 + clip_ratio)
        total += min(ratio * adv, clipped * adv)
        entropy = -float(np.sum(probs * np.log(probs + 1e-12)))
        total += entropy_weight * entropy
    return total


def surrogate_gradient(
    preferences: dict[ObsKey, np.ndarray],
    batch: Sequence[BatchItem],
    clip_ratio: float,
    entropy_weight: float,
) -> dict[ObsKey, np.ndarray]:
    """Analytic gradient of surrogate_objective w.r.t. every preference entry."""
    grads: dict[ObsKey, np.ndarray] = {}
    for key, action, old_p, adv in batch:
        probs = _softmax(preferences[key])
        ratio = probs[action] / old_p
        grad = grads.setdefault(key, np.zeros(N_ACTIONS))
        # The clipped branch has zero gradient once the ratio leaves the
        # trust region in the advantage's favoured direction.
        active = (adv > 0 and ratio < 1.0 + clip_ratio) or (
            adv < 0 and ratio > 1.0 - clip_ratio
        )
        if active:
            one_hot = np.zeros(N_ACTIONS)
            one_hot[action] = 1.0
            grad += adv * ratio * (one_hot - probs)
        if entropy_weight:
            logp = np.log(probs + 1e-12)
            entropy = -float(np.sum(probs * logp))
            grad += entropy_weight * (-probs * (logp + entropy))
    return grads


def policy_update(policy: PolicyParams, episode: "ShapedEpisode") -> PolicyParams:
    """Run the configured number of clipped-surrogate epochs over one episode.

    A zero clip ratio pins every ratio at 1, so the surrogate is constant
    and the update is skipped outright.
    """
    cfg = policy.hyper
    if not episode.keys:
        raise ValueError("policy_update needs a non-empty episode")
    if cfg.clip_ratio == 0.0:
        return policy

    returns = discounted_returns(episode.rewards, cfg.gamma)
    batch: list[BatchItem] = []
    for key, action, old_p, ret in zip(episode.keys, episode.actions, episode.behaviour_probs, returns):
        adv = ret - policy.value(key)
        policy.prefs(key)  # materialise rows before differentiating
        batch.append((key, ACTION_INDEX[action], old_p, adv))

    for _ in range(cfg.epochs):
        grads = surrogate_gradient(policy.preferences, batch, cfg.clip_ratio, cfg.entropy_weight)
        for key, grad in grads.items():
            policy.preferences[key] = policy.prefs(key) + cfg.step_size * grad
    # single squared-error step toward the returns, after the policy epochs,
    # so the baseline tracks a running mean instead of swallowing the batch
    for (key, _, _, _), ret in zip(batch, returns):
        policy.values[key] = policy.value(key) + cfg.step_size * (ret - policy.value(key))
    return policy


@dataclass(slots=True)
class ShapedEpisode:
    """An episode flattened to per-step training rows for one agent."""

    keys: list[ObsKey]
    actions: list[GridAction]
    behaviour_probs: list[float]
    rewards: list[float]


VARIANTS = ("individual", "inequity", "ga-no-tom", "tomaga")


@dataclass(slots=True)
class GridLearner:
    """One grid-world agent: a policy plus its social-preference attachments."""

    policy: PolicyParams
    tom: ToMState
    guilt: GuiltParams | None = None
    inequity: InequityParams | None = None
    variant: str = "individual"


def make_grid_learner(
    variant: str,
    learner_config: LearnerConfig | None = None,
    theta: float = 2.0,
    inequity_params: InequityParams | None = None,
    zero_order: float = 0.5,
    first_order: float = 0.5,
    confidence: float = 0.5,
    learning_rate: float = 0.1,
) -> GridLearner:
    """Build one of the four comparison variants with shared defaults."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    cfg = learner_config or LearnerConfig()
    tom = make_tom_state(
        zero_order=zero_order,
        first_order=first_order,
        confidence=confidence,
        learning_rate=learning_rate,
        tom_enabled=(variant == "tomaga"),
    )
    guilt = GuiltParams(theta) if variant in ("tomaga", "ga-no-tom") else None
    inequity = None
    if variant == "inequity":
        inequity = inequity_params or InequityParams(1.0, 1.0, n_agents=2)
    return GridLearner(
        policy=PolicyParams(hyper=cfg), tom=tom, guilt=guilt, inequity=inequity, variant=variant
    )


@dataclass(frozen=True, slots=True)
class ShapingDetail:
    """How one agent's terminal reward was shaped this iteration."""

    phi: float | None
    psychological: float
    shaped: float


def _shaped_terminal_reward(
    learner: GridLearner,
    labels: tuple[PolicyLabel, PolicyLabel],
    terminal_rewards: tuple[float, float],
    agent_index: int,
    label_matrix,
) -> ShapingDetail:
    """Belief update plus psychological shaping for one agent's episode end.

    Guilt needs both labels: the psychological reward is a function of the
    revealed label pair, so episodes with an Unknown label keep both the
    beliefs and the material reward untouched. Inequity shaping only needs
    realised rewards and therefore always applies.
    """
    own_label = labels[agent_index]
    other_label = labels[1 - agent_index]
    material = terminal_rewards[agent_index]
    other_material = terminal_rewards[1 - agent_index]

    if learner.guilt is not None:
        if own_label in KNOWN_LABELS and other_label in KNOWN_LABELS:
            learner.tom = update_beliefs(learner.tom, other_label, own_label, label_matrix)
            phi = expected_other_value(learner.tom, label_matrix)
            psy = guilt_reward(learner.guilt, phi, other_material)
            return ShapingDetail(phi, psy, shape_reward(material, psy))
        return ShapingDetail(None, 0.0, material)
    if learner.inequity is not None:
        psy = inequity_reward(learner.inequity, material, [other_material])
        return ShapingDetail(None, psy, shape_reward(material, psy))
    return ShapingDetail(None, 0.0, material)


def run_iteration(
    learners: tuple[GridLearner, GridLearner],
    config: GridConfig,
    rng: np.random.Generator,
) -> tuple[tuple[GridLearner, GridLearner], EpisodeRecord, tuple[ShapingDetail, ShapingDetail]]:
    """Play one episode, reveal labels, shape terminal rewards, update policies."""
    cfgs = tuple(learner.policy.hyper for learner in learners)
    behaviour: list[list[float]] = [[], []]

    def joint_policy(state: GridState, agent_index: int, step_rng: np.random.Generator) -> GridAction:
        policy = learners[agent_index].policy
        key = observation_key(state, agent_index, cfgs[agent_index])
        probs = action_probs(policy, key)
        idx = step_rng.choice(N_ACTIONS, p=probs)
        behaviour[agent_index].append(float(probs[idx]))
        return ACTIONS[idx]

    record = run_episode(config, joint_policy, rng)
    label_matrix = config.label_payoffs()

    details = []
    for i, learner in enumerate(learners):
        detail = _shaped_terminal_reward(
            learner, record.labels, record.terminal_rewards, i, label_matrix
        )
        details.append(detail)
        keys = [
            observation_key(state, i, cfgs[i]) for state, _, _, _ in record.transitions
        ]
        actions = [acts[i] for _, acts, _, _ in record.transitions]
        rewards = [0.0] * (len(record.transitions) - 1) + [detail.shaped]
        episode = ShapedEpisode(
            keys=keys, actions=actions, behaviour_probs=behaviour[i], rewards=rewards
        )
        learner.policy = policy_update(learner.policy, episode)
    return learners, record, (details[0], details[1])


def classify_run(
    history: Sequence[tuple[PolicyLabel, PolicyLabel]], window: int
) -> list[list[tuple[float, float, float]]]:
    """Per-agent moving proportions of (C, U, Unknown) labels.

    Entry [agent][t] covers the trailing min(t+1, window) iterations.
    """
    if window <= 0:
        raise ValueError("window must be positive")
    if window > len(history):
        raise ValueError("window cannot exceed the history length")
    out: list[list[tuple[float, float, float]]] = [[], []]
    for agent in range(2):
        labels = [pair[agent] for pair in history]
        for t in range(len(labels)):
            lo = max(0, t + 1 - window)
            chunk = labels[lo : t + 1]
            n = len(chunk)
            out[agent].append(
                (
                    sum(1 for l in chunk if l is C) / n,
                    sum(1 for l in chunk if l is U) / n,
                    sum(1 for l in chunk if l is UNKNOWN) / n,
                )
            )
    return out


def iterations_to_threshold(
    history: Sequence[tuple[PolicyLabel, PolicyLabel]],
    window: int,
    threshold: float = 0.8,
) -> int | None:
    """First iteration whose trailing full window is >= threshold cooperative.

    The proportion pools both agents' labels. Returns None when the run
    never crosses the threshold.
    """
    if window > len(history):
        return None
    for t in range(window - 1, len(history)):
        chunk = history[t + 1 - window : t + 1]
        c_count = sum(1 for pair in chunk for label in pair if label is C)
        if c_count / (2 * window) >= threshold:
            return t
    return None
