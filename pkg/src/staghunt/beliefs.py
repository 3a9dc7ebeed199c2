"""First-order Theory-of-Mind belief state and its update pipeline.

An agent tracks a zero-order belief (will the other act cooperatively?),
a first-order belief (what does the other think *I* will do?), and a
confidence in its own predictions. After each iteration it runs, in order:

    1. predict the other's label from the first-order belief,
    2. update confidence from the prediction's correctness,
    3. blend the zero-order belief with the prediction (belief integration),
    4. if first-order updates are enabled, pull the first-order belief
       toward the agent's own revealed label.

All updates are pure: they return a new state and never mutate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .game import C, KNOWN_LABELS, U, PayoffMatrix, PolicyLabel


def _clamp01(x: float) -> float:
    # Convex combinations of values in [0, 1] can drift by one ulp.
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


@dataclass(frozen=True, slots=True)
class Belief:
    """Probability mass on the Cooperative label; mass on U is the complement."""

    p_cooperative: float

    def __post_init__(self):
        if not 0.0 <= self.p_cooperative <= 1.0:
            raise ValueError(f"belief probability outside [0, 1]: {self.p_cooperative}")

    def mass(self, label: PolicyLabel) -> float:
        if label is C:
            return self.p_cooperative
        if label is U:
            return 1.0 - self.p_cooperative
        raise ValueError("beliefs are defined over C/U only")

    @classmethod
    def point(cls, label: PolicyLabel) -> "Belief":
        return cls(1.0 if label is C else 0.0)

    @classmethod
    def uniform(cls) -> "Belief":
        return cls(0.5)


@dataclass(frozen=True, slots=True)
class ToMState:
    """One agent's belief state.

    tom_enabled=False is the guilt-averse-without-ToM ablation: the
    first-order belief stays frozen at its initial value forever.
    """

    zero_order: Belief
    first_order: Belief
    confidence: float
    learning_rate: float
    tom_enabled: bool = True

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence outside [0, 1]: {self.confidence}")
        if not 0.0 <= self.learning_rate <= 1.0:
            raise ValueError(f"learning rate outside [0, 1]: {self.learning_rate}")


def make_tom_state(
    zero_order: float = 0.5,
    first_order: float = 0.5,
    confidence: float = 0.5,
    learning_rate: float = 0.1,
    tom_enabled: bool = True,
) -> ToMState:
    """Default-initialised belief state; every value is a config knob."""
    return ToMState(
        zero_order=Belief(zero_order),
        first_order=Belief(first_order),
        confidence=confidence,
        learning_rate=learning_rate,
        tom_enabled=tom_enabled,
    )


def predict_other(state: ToMState, matrix: PayoffMatrix) -> PolicyLabel:
    """Label the other is predicted to pick if it greedily maximises material reward.

    Scores each candidate label by the other's expected payoff under the
    first-order belief about what the other thinks this agent will do.
    Ties break toward C (the Pareto-efficient label).
    """
    b1 = state.first_order
    score_c = b1.mass(C) * matrix.payoff(C, C) + b1.mass(U) * matrix.payoff(C, U)
    score_u = b1.mass(C) * matrix.payoff(U, C) + b1.mass(U) * matrix.payoff(U, U)
    return C if score_c >= score_u else U


def update_confidence(
    state: ToMState, observed_other: PolicyLabel, predicted_other: PolicyLabel
) -> ToMState:
    """Exponential-average the prediction hit/miss into the confidence."""
    if observed_other not in KNOWN_LABELS:
        raise ValueError("confidence updates require an observed label in {C, U}")
    hit = 1.0 if observed_other is predicted_other else 0.0
    lam = state.learning_rate
    new_conf = _clamp01((1.0 - lam) * state.confidence + lam * hit)
    return replace(state, confidence=new_conf)


def integrate_belief(state: ToMState, predicted_other: PolicyLabel) -> Belief:
    """Convex blend of the zero-order belief and the prediction's point mass.

    Uses the confidence as it stands on `state`, i.e. callers must update
    confidence first (the pipeline order is confidence, then integration).
    """
    c = state.confidence
    blended = (1.0 - c) * state.zero_order.mass(C) + c * Belief.point(predicted_other).mass(C)
    return Belief(_clamp01(blended))


def update_beliefs(
    state: ToMState,
    observed_other: PolicyLabel,
    observed_self: PolicyLabel,
    matrix: PayoffMatrix,
) -> ToMState:
    """Run the full per-iteration belief pipeline and return the new state."""
    if observed_other not in KNOWN_LABELS or observed_self not in KNOWN_LABELS:
        raise ValueError("belief updates require both observed labels in {C, U}")

    predicted = predict_other(state, matrix)
    state = update_confidence(state, observed_other, predicted)
    new_zero = integrate_belief(state, predicted)

    if state.tom_enabled:
        c = state.confidence
        own = 1.0 if observed_self is C else 0.0
        new_first = Belief(_clamp01((1.0 - c) * state.first_order.mass(C) + c * own))
    else:
        new_first = state.first_order

    return replace(state, zero_order=new_zero, first_order=new_first)
