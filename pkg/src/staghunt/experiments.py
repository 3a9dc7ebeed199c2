"""Experiment protocols: self-play sweep, group tournament, grid-world comparison.

Every run is a pure function of its spec and a base seed: per-unit seeds
are spawned from numpy SeedSequence with the unit's indices, so results
reproduce exactly regardless of execution order or worker count, and the
same game-level randomness is shared across agent variants for fairness.
"""

from __future__ import annotations

import csv
import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .game import C, PayoffMatrix, PolicyLabel
from .gridworld import make_scenario
from .matrix_agents import (
    Exploration,
    MatrixAgentState,
    MatrixPlayer,
    PavlovState,
    cooperation_probability,
    play_matrix_iteration,
    values_for_cooperation_probability,
)
from .beliefs import make_tom_state
from .policy_learner import (
    InequityParams,
    LearnerConfig,
    iterations_to_threshold,
    make_grid_learner,
    run_iteration,
)
from .shaping import GuiltParams

MATRIX_VARIANTS = ("tomaga", "ga-no-tom", "individual", "tom-no-guilt")


@dataclass(frozen=True, slots=True)
class AgentParams:
    """Shared hyper-parameters for matrix-form value learners."""

    theta: float = 200.0
    alpha: float = 0.1
    gamma: float = 0.9
    learning_rate: float = 0.1  # belief/confidence EWMA rate
    confidence: float = 0.5
    zero_order: float = 0.5
    first_order: float = 0.5
    temperature: float = 1.0
    temperature_decay: float = 0.995
    prob_clamp: float = 1e-3


def make_matrix_agent(
    variant: str, params: AgentParams, initial_p_cooperate: float = 0.5
) -> MatrixAgentState:
    """Build a matrix-form learner variant with its softmax P(C) preset."""
    if variant not in MATRIX_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {MATRIX_VARIANTS}")
    tom = make_tom_state(
        zero_order=params.zero_order,
        first_order=params.first_order,
        confidence=params.confidence,
        learning_rate=params.learning_rate,
        tom_enabled=(variant != "ga-no-tom"),
    )
    guilt = GuiltParams(params.theta) if variant in ("tomaga", "ga-no-tom") else None
    return MatrixAgentState(
        values=values_for_cooperation_probability(
            initial_p_cooperate, params.temperature, params.prob_clamp
        ),
        tom=tom,
        guilt=guilt,
        alpha=params.alpha,
        gamma=params.gamma,
        explore=Exploration(
            kind="softmax",
            temperature=params.temperature,
            temperature_decay=params.temperature_decay,
        ),
    )


@dataclass(slots=True)
class RunResult:
    """A flat table of experiment rows plus reproducibility metadata."""

    columns: tuple[str, ...]
    rows: list[tuple]
    meta: dict = field(default_factory=dict)

    def write_csv(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            writer.writerows(self.rows)


def _rng_for(base_seed: int, *indices: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([base_seed, *indices]))


def _pmap(worker, payloads: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(payloads) <= 1:
        return [worker(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, payloads))


# ---------------------------------------------------------------------------
# Matrix-form self-play sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SweepSpec:
    """Grid of initial cooperation probabilities for two self-play learners."""

    probabilities: tuple[float, ...] = tuple(round(p * 0.1, 1) for p in range(11))
    iterations: int = 500
    repetitions: int = 20
    matrix: PayoffMatrix = PayoffMatrix(40.0, 30.0, 20.0, 0.0)
    variants: tuple[str, ...] = ("tomaga", "ga-no-tom")
    agent_params: AgentParams = AgentParams()
    measure_window: int = 50

    def __post_init__(self):
        if any(not 0.0 <= p <= 1.0 for p in self.probabilities):
            raise ValueError("initial probabilities must lie in [0, 1]")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


def run_match(
    agents: tuple[MatrixPlayer, MatrixPlayer],
    matrix: PayoffMatrix,
    iterations: int,
    rng: np.random.Generator,
    trace: list | None = None,
) -> tuple[tuple[MatrixPlayer, MatrixPlayer], list[tuple[PolicyLabel, PolicyLabel]]]:
    """Run repeated one-shot play, returning final agents and the action history."""
    history: list[tuple[PolicyLabel, PolicyLabel]] = []
    for it in range(iterations):
        agents, outcome, rewards, records = play_matrix_iteration(agents, matrix, rng)
        history.append((outcome.label_self, outcome.label_other))
        if trace is not None:
            trace.append(_trace_row(it, agents, outcome, rewards, records))
    return agents, history


TRACE_COLUMNS = (
    "iteration", "action_0", "action_1", "reward_0", "reward_1",
    "phi_0", "psy_0", "phi_1", "psy_1",
    "b0_0", "b1_0", "conf_0", "b0_1", "b1_1", "conf_1",
    "v_c_0", "v_u_0", "v_c_1", "v_u_1",
)


def _trace_row(iteration, agents, outcome, rewards, records):
    def agent_cols(agent: MatrixPlayer):
        if isinstance(agent, MatrixAgentState):
            from .game import C as coop, U as defe

            return (
                agent.tom.zero_order.p_cooperative,
                agent.tom.first_order.p_cooperative,
                agent.tom.confidence,
                agent.values[coop],
                agent.values[defe],
            )
        return (None, None, None, None, None)

    b0_0, b1_0, conf_0, vc0, vu0 = agent_cols(agents[0])
    b0_1, b1_1, conf_1, vc1, vu1 = agent_cols(agents[1])
    return (
        iteration, str(outcome.label_self), str(outcome.label_other), rewards[0], rewards[1],
        records[0].phi, records[0].psychological, records[1].phi, records[1].psychological,
        b0_0, b1_0, conf_0, b0_1, b1_1, conf_1,
        vc0, vu0, vc1, vu1,
    )


SWEEP_COLUMNS = (
    "variant", "p_init_0", "p_init_1", "repetition",
    "final_coop_softmax", "final_coop_freq",
)


def _sweep_unit(payload) -> tuple:
    spec_dict, variant, p0, p1, rep, base_seed, i, j = payload
    spec = _sweep_spec_from_dict(spec_dict)
    rng = _rng_for(base_seed, i, j, rep)
    agents = (
        make_matrix_agent(variant, spec.agent_params, p0),
        make_matrix_agent(variant, spec.agent_params, p1),
    )
    agents, history = run_match(agents, spec.matrix, spec.iterations, rng)
    window = history[-spec.measure_window :]
    freq = sum(1 for pair in window if pair[0] is C) / len(window)
    return (variant, p0, p1, rep, cooperation_probability(agents[0]), freq)


def _sweep_spec_to_dict(spec: SweepSpec) -> dict:
    d = asdict(spec)
    d["matrix"] = spec.matrix.as_dict()
    return d


def _sweep_spec_from_dict(d: dict) -> SweepSpec:
    d = dict(d)
    d["matrix"] = PayoffMatrix(**d["matrix"])
    d["agent_params"] = AgentParams(**d["agent_params"])
    d["probabilities"] = tuple(d["probabilities"])
    d["variants"] = tuple(d["variants"])
    return SweepSpec(**d)


def run_sweep(spec: SweepSpec, base_seed: int = 0, jobs: int = 1) -> RunResult:
    """Fill the initial-probability grid for every variant.

    The random stream for a grid cell depends only on (base_seed, cell,
    repetition), never on the variant, so variants face identical luck.
    """
    spec_dict = _sweep_spec_to_dict(spec)
    payloads = []
    for variant in spec.variants:
        for i, p0 in enumerate(spec.probabilities):
            for j, p1 in enumerate(spec.probabilities):
                for rep in range(spec.repetitions):
                    payloads.append((spec_dict, variant, p0, p1, rep, base_seed, i, j))
    rows = _pmap(_sweep_unit, payloads, jobs)
    return RunResult(
        columns=SWEEP_COLUMNS,
        rows=rows,
        meta={"base_seed": base_seed, "spec": spec_dict},
    )


def sweep_cell_means(result: RunResult) -> dict[tuple[str, float, float], float]:
    """Mean final softmax cooperation probability per (variant, p0, p1) cell."""
    sums: dict[tuple[str, float, float], list[float]] = {}
    for variant, p0, p1, _rep, coop, _freq in result.rows:
        sums.setdefault((variant, p0, p1), []).append(coop)
    return {key: sum(v) / len(v) for key, v in sums.items()}


# ---------------------------------------------------------------------------
# Group tournament with random matching
# ---------------------------------------------------------------------------

COMPOSITIONS = ("tomaga", "pavlov", "heterogeneous", "tom-no-guilt")


@dataclass(frozen=True, slots=True)
class TournamentSpec:
    group_sizes: tuple[int, ...] = (2, 4, 8)
    rounds: int = 5000
    report_window: int = 100
    repetitions: int = 10
    matrix: PayoffMatrix = PayoffMatrix(5.0, 4.0, 2.0, 1.0)
    compositions: tuple[str, ...] = ("tomaga", "pavlov", "heterogeneous")
    agent_params: AgentParams = AgentParams()
    pavlov_n: int = 10
    # a cooperative-leaning start: from 0.5 a Pavlov facing a steady
    # cooperator is a driftless walk and locks into always-defect on half
    # of all seeds, which buries the heterogeneous-group comparison in
    # matching noise rather than anything about the agents
    pavlov_p0: float = 0.9

    def __post_init__(self):
        if any(n < 2 for n in self.group_sizes):
            raise ValueError("group sizes must be >= 2")
        for comp in self.compositions:
            if comp not in COMPOSITIONS:
                raise ValueError(f"unknown composition {comp!r}")


def _make_group(composition: str, size: int, spec: TournamentSpec) -> list[MatrixPlayer]:
    pavlov = PavlovState(i_count=round(spec.pavlov_n * spec.pavlov_p0), n=spec.pavlov_n)
    if composition == "pavlov":
        return [pavlov for _ in range(size)]
    if composition == "tomaga":
        return [make_matrix_agent("tomaga", spec.agent_params) for _ in range(size)]
    if composition == "tom-no-guilt":
        return [make_matrix_agent("tom-no-guilt", spec.agent_params) for _ in range(size)]
    # heterogeneous: one guilt-averse ToM agent among Pavlov players
    return [make_matrix_agent("tomaga", spec.agent_params)] + [pavlov] * (size - 1)


TOURNAMENT_COLUMNS = ("composition", "group_size", "repetition", "mean_common_reward")


def _tournament_unit(payload) -> tuple:
    spec_dict, composition, size, rep, base_seed, size_idx, comp_idx = payload
    spec = _tournament_spec_from_dict(spec_dict)
    rng = _rng_for(base_seed, comp_idx, size_idx, rep)
    group = _make_group(composition, size, spec)
    common: list[float] = []
    for _ in range(spec.rounds):
        order = rng.permutation(size)
        round_rewards: list[float] = []
        for k in range(0, size - 1, 2):
            a, b = int(order[k]), int(order[k + 1])
            pair = (group[a], group[b])
            pair, _outcome, rewards, _recs = play_matrix_iteration(pair, spec.matrix, rng)
            group[a], group[b] = pair
            round_rewards.extend(rewards)
        common.append(sum(round_rewards) / len(round_rewards))
    window = common[-spec.report_window :]
    return (composition, size, rep, sum(window) / len(window))


def _tournament_spec_to_dict(spec: TournamentSpec) -> dict:
    d = asdict(spec)
    d["matrix"] = spec.matrix.as_dict()
    return d


def _tournament_spec_from_dict(d: dict) -> TournamentSpec:
    d = dict(d)
    d["matrix"] = PayoffMatrix(**d["matrix"])
    d["agent_params"] = AgentParams(**d["agent_params"])
    d["group_sizes"] = tuple(d["group_sizes"])
    d["compositions"] = tuple(d["compositions"])
    return TournamentSpec(**d)


def run_tournament(spec: TournamentSpec, base_seed: int = 0, jobs: int = 1) -> RunResult:
    """Randomly matched repeated play; reports last-window mean common reward.

    Common reward for a round is the mean material (unshaped) reward over
    the agents that actually played; with an odd group size one uniformly
    chosen agent sits out.
    """
    spec_dict = _tournament_spec_to_dict(spec)
    payloads = []
    for comp_idx, composition in enumerate(spec.compositions):
        for size_idx, size in enumerate(spec.group_sizes):
            for rep in range(spec.repetitions):
                payloads.append((spec_dict, composition, size, rep, base_seed, size_idx, comp_idx))
    rows = _pmap(_tournament_unit, payloads, jobs)
    return RunResult(
        columns=TOURNAMENT_COLUMNS,
        rows=rows,
        meta={"base_seed": base_seed, "spec": spec_dict},
    )


def tournament_means(result: RunResult) -> dict[tuple[str, int], float]:
    """Mean over repetitions of the last-window common reward."""
    sums: dict[tuple[str, int], list[float]] = {}
    for composition, size, _rep, reward in result.rows:
        sums.setdefault((composition, size), []).append(reward)
    return {key: sum(v) / len(v) for key, v in sums.items()}


# ---------------------------------------------------------------------------
# Grid-world comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class GridworldSpec:
    scenarios: tuple[str, ...] = ("near-stag", "near-hares")
    variants: tuple[str, ...] = ("individual", "inequity", "ga-no-tom", "tomaga")
    seeds: int = 10
    iterations: int = 1500
    theta: float = 4.0
    inequity_advantageous: float = 1.0
    inequity_disadvantageous: float = 1.0
    window: int = 50
    threshold: float = 0.8
    zero_order: float = 0.5
    first_order: float = 0.5
    confidence: float = 0.5
    learning_rate: float = 0.1
    step_size: float = 0.5
    gamma: float = 0.99
    clip_ratio: float = 0.2
    epochs: int = 6
    entropy_weight: float = 0.03
    # one bucket spanning the whole episode: the comparison trains
    # stationary policies, which learn far faster on the tiny grid
    time_bucket_width: int = 32
    # None keeps each scenario file's motion mode; "static" pins the stag,
    # which keeps the joint capture learnable at desk-scale iteration counts
    stag_motion: str | None = "static"


GRIDWORLD_COLUMNS = (
    "scenario", "variant", "seed", "iterations_to_threshold",
    "final_c_prop", "final_u_prop", "final_unknown_prop",
)


def _gridworld_unit(payload) -> tuple:
    spec_dict, scenario, variant, seed_idx, base_seed, scen_idx, var_idx = payload
    spec = GridworldSpec(**{**spec_dict, "scenarios": tuple(spec_dict["scenarios"]), "variants": tuple(spec_dict["variants"])})
    config = make_scenario(scenario)
    if spec.stag_motion is not None:
        config = dataclasses.replace(config, stag_motion=spec.stag_motion)
    rng = _rng_for(base_seed, scen_idx, var_idx, seed_idx)
    learner_cfg = LearnerConfig(
        step_size=spec.step_size,
        gamma=spec.gamma,
        clip_ratio=spec.clip_ratio,
        epochs=spec.epochs,
        entropy_weight=spec.entropy_weight,
        time_bucket_width=spec.time_bucket_width,
    )
    inequity = InequityParams(
        spec.inequity_advantageous, spec.inequity_disadvantageous, n_agents=2
    )
    learners = tuple(
        make_grid_learner(
            variant,
            learner_config=learner_cfg,
            theta=spec.theta,
            inequity_params=inequity,
            zero_order=spec.zero_order,
            first_order=spec.first_order,
            confidence=spec.confidence,
            learning_rate=spec.learning_rate,
        )
        for _ in range(2)
    )
    history = []
    for _ in range(spec.iterations):
        learners, record, _details = run_iteration(learners, config, rng)
        history.append(record.labels)
    reached = iterations_to_threshold(history, spec.window, spec.threshold)
    tail = history[-spec.window :]
    labels = [label for pair in tail for label in pair]
    n = len(labels)
    c_prop = sum(1 for l in labels if l.value == "C") / n
    u_prop = sum(1 for l in labels if l.value == "U") / n
    return (
        scenario, variant, seed_idx,
        -1 if reached is None else reached,
        c_prop, u_prop, 1.0 - c_prop - u_prop,
    )


def run_gridworld_comparison(spec: GridworldSpec, base_seed: int = 0, jobs: int = 1) -> RunResult:
    spec_dict = asdict(spec)
    payloads = []
    for scen_idx, scenario in enumerate(spec.scenarios):
        for var_idx, variant in enumerate(spec.variants):
            for seed_idx in range(spec.seeds):
                payloads.append(
                    (spec_dict, scenario, variant, seed_idx, base_seed, scen_idx, var_idx)
                )
    rows = _pmap(_gridworld_unit, payloads, jobs)
    return RunResult(
        columns=GRIDWORLD_COLUMNS,
        rows=rows,
        meta={"base_seed": base_seed, "spec": spec_dict},
    )


GRIDWORLD_DETAIL_COLUMNS = (
    "iteration", "episode_length", "label_0", "label_1", "reward_0", "reward_1",
    "phi_0", "psy_0", "shaped_0", "phi_1", "psy_1", "shaped_1",
    "c_prop_0", "c_prop_1",
    "b0_0", "b1_0", "conf_0", "b0_1", "b1_1", "conf_1",
)


def run_gridworld_detail(
    spec: GridworldSpec,
    scenario: str,
    variant: str,
    seed_index: int,
    base_seed: int = 0,
    episode_log: list | None = None,
) -> RunResult:
    """Replay a single comparison run, logging every iteration.

    Uses the identical seeding path as run_gridworld_comparison, so the
    logged run is the same one that produced the aggregate row. Pass a list
    as episode_log to also capture each episode's transition rows.
    """
    from .gridworld import episode_transition_rows

    scen_idx = spec.scenarios.index(scenario)
    var_idx = spec.variants.index(variant)
    config = make_scenario(scenario)
    if spec.stag_motion is not None:
        config = dataclasses.replace(config, stag_motion=spec.stag_motion)
    rng = _rng_for(base_seed, scen_idx, var_idx, seed_index)
    learner_cfg = LearnerConfig(
        step_size=spec.step_size,
        gamma=spec.gamma,
        clip_ratio=spec.clip_ratio,
        epochs=spec.epochs,
        entropy_weight=spec.entropy_weight,
        time_bucket_width=spec.time_bucket_width,
    )
    inequity = InequityParams(
        spec.inequity_advantageous, spec.inequity_disadvantageous, n_agents=2
    )
    learners = tuple(
        make_grid_learner(
            variant,
            learner_config=learner_cfg,
            theta=spec.theta,
            inequity_params=inequity,
            zero_order=spec.zero_order,
            first_order=spec.first_order,
            confidence=spec.confidence,
            learning_rate=spec.learning_rate,
        )
        for _ in range(2)
    )
    history: list = []
    rows: list[tuple] = []
    for it in range(spec.iterations):
        learners, record, details = run_iteration(learners, config, rng)
        history.append(record.labels)
        chunk = history[-spec.window :]
        c_props = tuple(
            sum(1 for pair in chunk if pair[i] is C) / len(chunk) for i in range(2)
        )
        toms = tuple(learner.tom for learner in learners)
        rows.append(
            (
                it, len(record.transitions),
                str(record.labels[0]), str(record.labels[1]),
                record.terminal_rewards[0], record.terminal_rewards[1],
                details[0].phi, details[0].psychological, details[0].shaped,
                details[1].phi, details[1].psychological, details[1].shaped,
                c_props[0], c_props[1],
                toms[0].zero_order.p_cooperative, toms[0].first_order.p_cooperative,
                toms[0].confidence,
                toms[1].zero_order.p_cooperative, toms[1].first_order.p_cooperative,
                toms[1].confidence,
            )
        )
        if episode_log is not None:
            episode_log.extend((it, *row) for row in episode_transition_rows(record))
    return RunResult(
        columns=GRIDWORLD_DETAIL_COLUMNS,
        rows=rows,
        meta={
            "base_seed": base_seed,
            "scenario": scenario,
            "variant": variant,
            "seed_index": seed_index,
            "spec": asdict(spec),
        },
    )


def gridworld_threshold_summary(result: RunResult) -> dict[tuple[str, str], dict]:
    """Per (scenario, variant): reach counts and the median iterations-to-threshold.

    Runs that never reach the threshold enter the median as one-past-budget
    so that "never" compares worse than any finite crossing.
    """
    groups: dict[tuple[str, str], list[int]] = {}
    budget = result.meta.get("spec", {}).get("iterations", 0)
    for scenario, variant, _seed, reached, *_rest in result.rows:
        groups.setdefault((scenario, variant), []).append(
            budget + 1 if reached < 0 else reached
        )
    out = {}
    for key, values in groups.items():
        out[key] = {
            "median_iterations": float(np.median(values)),
            "n_reached": sum(1 for v in values if v <= budget),
            "n_runs": len(values),
        }
    return out
