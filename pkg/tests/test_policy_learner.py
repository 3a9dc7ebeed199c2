import numpy as np
import pytest

from staghunt.game import C, U, UNKNOWN, PayoffMatrix
from staghunt.gridworld import GridAction, make_scenario
from staghunt.policy_learner import (
    ACTIONS,
    LearnerConfig,
    PolicyParams,
    ShapedEpisode,
    action_probs,
    classify_run,
    discounted_returns,
    iterations_to_threshold,
    make_grid_learner,
    observation_key,
    policy_update,
    run_iteration,
    surrogate_gradient,
    surrogate_objective,
)


# --- returns -------------------------------------------------------------------


@pytest.mark.parametrize(
    "gamma,expected",
    [
        (0.0, [1.0, 2.0, 4.0]),
        (0.5, [1.0 + 0.5 * (2.0 + 0.5 * 4.0), 2.0 + 0.5 * 4.0, 4.0]),
        (1.0, [7.0, 6.0, 4.0]),
    ],
)
def test_discounted_returns_hand_checked(gamma, expected):
    assert discounted_returns([1.0, 2.0, 4.0], gamma) == pytest.approx(expected)


# --- surrogate objective and gradient --------------------------------------------


def frozen_batch():
    rng = np.random.default_rng(5)
    prefs = {}
    batch = []
    for k in range(4):
        key = ("s", k)
        prefs[key] = rng.normal(0, 0.7, len(ACTIONS))
        probs = np.exp(prefs[key]) / np.exp(prefs[key]).sum()
        action = int(rng.integers(len(ACTIONS)))
        # behaviour probability deliberately differs from the current policy
        old_p = float(np.clip(probs[action] * rng.uniform(0.6, 1.4), 0.05, 0.95))
        adv = float(rng.normal(0, 2.0))
        batch.append((key, action, old_p, adv))
    return prefs, batch


@pytest.mark.parametrize("entropy_weight", [0.0, 0.01])
def test_gradient_matches_central_finite_differences(entropy_weight):
    prefs, batch = frozen_batch()
    clip = 0.2
    grads = surrogate_gradient(prefs, batch, clip, entropy_weight)
    h = 1e-5
    for key in prefs:
        for idx in range(len(ACTIONS)):
            up = {k: v.copy() for k, v in prefs.items()}
            down = {k: v.copy() for k, v in prefs.items()}
            up[key][idx] += h
            down[key][idx] -= h
            numeric = (
                surrogate_objective(up, batch, clip, entropy_weight)
                - surrogate_objective(down, batch, clip, entropy_weight)
            ) / (2 * h)
            analytic = grads.get(key, np.zeros(len(ACTIONS)))[idx]
            assert analytic == pytest.approx(numeric, rel=1e-4, abs=1e-7)


def test_zero_advantages_leave_preferences_unchanged():
    policy = PolicyParams(hyper=LearnerConfig(entropy_weight=0.0))
    key = ((0, 0), (1, 1), (2, 2), 0)
    policy.preferences[key] = np.array([0.3, -0.1, 0.0, 0.2, -0.4])
    policy.values[key] = 1.0  # matches the return below, so advantage is zero
    episode = ShapedEpisode(keys=[key], actions=[GridAction.STAY], behaviour_probs=[0.2],
                            rewards=[1.0])
    before = policy.preferences[key].copy()
    policy_update(policy, episode)
    assert np.allclose(policy.preferences[key], before)


def test_positive_advantage_increases_taken_action_probability():
    policy = PolicyParams(hyper=LearnerConfig())
    key = ((0, 0), (1, 1), (2, 2), 0)
    p_before = action_probs(policy, key)[0]
    episode = ShapedEpisode(
        keys=[key], actions=[ACTIONS[0]], behaviour_probs=[p_before], rewards=[4.0]
    )
    policy_update(policy, episode)
    assert action_probs(policy, key)[0] > p_before


def test_zero_clip_ratio_freezes_the_policy():
    policy = PolicyParams(hyper=LearnerConfig(clip_ratio=0.0))
    key = ((0, 0), (1, 1), (2, 2), 0)
    episode = ShapedEpisode(
        keys=[key], actions=[ACTIONS[2]], behaviour_probs=[0.2], rewards=[10.0]
    )
    policy_update(policy, episode)
    assert not policy.preferences or np.allclose(policy.preferences[key], 0.0)
    assert policy.value(key) == 0.0


def test_policy_stays_a_distribution_after_updates():
    policy = PolicyParams(hyper=LearnerConfig(step_size=0.5))
    key = ((0, 0), (1, 1), (2, 2), 0)
    rng = np.random.default_rng(0)
    for _ in range(50):
        action = ACTIONS[rng.integers(5)]
        probs = action_probs(policy, key)
        episode = ShapedEpisode(
            keys=[key], actions=[action],
            behaviour_probs=[float(probs[list(ACTIONS).index(action)])],
            rewards=[float(rng.normal())],
        )
        policy_update(policy, episode)
        probs = action_probs(policy, key)
        assert probs.sum() == pytest.approx(1.0)
        assert (probs > 0).all()


def test_policy_update_rejects_empty_episode():
    with pytest.raises(ValueError):
        policy_update(PolicyParams(), ShapedEpisode([], [], [], []))


# --- iteration wiring -------------------------------------------------------------


def run_n(variant, n, seed=3, scenario="near-stag", **kwargs):
    config = make_scenario(scenario)
    learners = tuple(make_grid_learner(variant, **kwargs) for _ in range(2))
    rng = np.random.default_rng(seed)
    records = []
    for _ in range(n):
        learners, record, _ = run_iteration(learners, config, rng)
        records.append(record)
    return learners, records


def test_individual_learners_keep_material_rewards():
    """With guilt off, r* equals the material terminal reward: values trained
    toward material returns only (checked through the value table's scale)."""
    learners, records = run_n("individual", 30)
    for record in records:
        assert record.terminal_rewards in {
            (4.0, 4.0), (2.0, 2.0), (3.0, 0.0), (0.0, 3.0), (0.0, 0.0)
        }
    # individual learners never update beliefs
    assert learners[0].tom.zero_order.p_cooperative == 0.5


def test_mutual_stag_capture_with_aligned_beliefs_has_zero_guilt():
    """(C,C) labels with point-mass-C beliefs: phi = 4.0 = reward, guilt 0."""
    from staghunt.beliefs import make_tom_state
    from staghunt.policy_learner import _shaped_terminal_reward

    learner = make_grid_learner("tomaga", theta=1.0, zero_order=1.0, first_order=1.0)
    learner.tom = make_tom_state(1.0, 1.0, confidence=1.0, learning_rate=0.0)
    label_matrix = PayoffMatrix(4.0, 3.0, 2.0, 0.0)
    detail = _shaped_terminal_reward(learner, (C, C), (4.0, 4.0), 0, label_matrix)
    assert detail.shaped == pytest.approx(4.0)
    assert detail.phi == pytest.approx(4.0)
    assert detail.psychological == 0.0


def test_hare_catcher_guilt_with_confident_beliefs():
    """(U, C) with beliefs pinned at mutual cooperation: 3 - 1*(4-0) = -1."""
    from staghunt.beliefs import make_tom_state
    from staghunt.policy_learner import _shaped_terminal_reward

    learner = make_grid_learner("tomaga", theta=1.0)
    learner.tom = make_tom_state(1.0, 1.0, confidence=0.0, learning_rate=0.0)
    label_matrix = PayoffMatrix(4.0, 3.0, 2.0, 0.0)
    detail = _shaped_terminal_reward(learner, (U, C), (3.0, 0.0), 0, label_matrix)
    assert detail.shaped == pytest.approx(-1.0)
    assert detail.psychological == pytest.approx(-4.0)


def test_unknown_labels_skip_beliefs_and_guilt():
    from staghunt.policy_learner import _shaped_terminal_reward

    learner = make_grid_learner("tomaga", theta=5.0)
    tom_before = learner.tom
    label_matrix = PayoffMatrix(4.0, 3.0, 2.0, 0.0)
    detail = _shaped_terminal_reward(learner, (U, UNKNOWN), (3.0, 0.0), 0, label_matrix)
    assert detail.shaped == 3.0
    assert detail.psychological == 0.0
    assert learner.tom == tom_before


def test_inequity_shaping_applies_to_unequal_outcomes():
    from staghunt.policy_learner import _shaped_terminal_reward

    learner = make_grid_learner("inequity")
    label_matrix = PayoffMatrix(4.0, 3.0, 2.0, 0.0)
    assert _shaped_terminal_reward(learner, (U, UNKNOWN), (3.0, 0.0), 0, label_matrix).shaped == 0.0
    assert _shaped_terminal_reward(learner, (UNKNOWN, UNKNOWN), (0.0, 0.0), 0, label_matrix).shaped == 0.0


def test_ga_without_tom_keeps_first_order_frozen():
    learners, _ = run_n("ga-no-tom", 40, theta=2.0, first_order=0.4)
    assert learners[0].tom.first_order.p_cooperative == 0.4


def test_iteration_history_reproducible_bit_for_bit():
    _, first = run_n("tomaga", 25, seed=11)
    _, second = run_n("tomaga", 25, seed=11)
    assert [r.labels for r in first] == [r.labels for r in second]
    assert [r.terminal_rewards for r in first] == [r.terminal_rewards for r in second]


def test_make_grid_learner_rejects_unknown_variant():
    with pytest.raises(ValueError):
        make_grid_learner("edti")


# --- run classification -------------------------------------------------------------


def test_classify_run_all_cooperative():
    history = [(C, C)] * 10
    props = classify_run(history, window=5)
    assert props[0][-1] == (1.0, 0.0, 0.0)
    assert props[1][-1] == (1.0, 0.0, 0.0)


def test_classify_run_alternating_counts():
    history = [(C, C), (U, U)] * 5
    props = classify_run(history, window=2)
    assert props[0][-1] == (0.5, 0.5, 0.0)


def test_classify_run_counts_unknown():
    history = [(C, UNKNOWN)] * 4
    props = classify_run(history, window=4)
    assert props[0][-1] == (1.0, 0.0, 0.0)
    assert props[1][-1] == (0.0, 0.0, 1.0)


def test_classify_run_validates_window():
    with pytest.raises(ValueError):
        classify_run([(C, C)], window=2)
    with pytest.raises(ValueError):
        classify_run([(C, C)], window=0)


def test_iterations_to_threshold_finds_first_full_window():
    history = [(U, U)] * 6 + [(C, C)] * 10
    # with window 4, the first fully cooperative window ends at iteration 9
    assert iterations_to_threshold(history, window=4, threshold=0.8) == 9
    assert iterations_to_threshold([(U, U)] * 12, window=4) is None
    assert iterations_to_threshold([(C, C)] * 3, window=10) is None


def test_observation_key_injective_at_unit_bucket_width():
    from staghunt.gridworld import GridState

    cfg = LearnerConfig(time_bucket_width=1)
    base = GridState(((0, 0), (2, 1)), (1, 0), 3, False)
    variants = [
        GridState(((0, 1), (2, 1)), (1, 0), 3, False),  # own moved
        GridState(((0, 0), (3, 1)), (1, 0), 3, False),  # other moved
        GridState(((0, 0), (2, 1)), (2, 0), 3, False),  # stag moved
        GridState(((0, 0), (2, 1)), (1, 0), 4, False),  # time advanced
    ]
    keys = {observation_key(s, 0, cfg) for s in [base, *variants]}
    assert len(keys) == 5
    # the two agents see mirrored encodings of the same state
    assert observation_key(base, 0, cfg) != observation_key(base, 1, cfg)


def test_sample_action_tracks_policy_distribution():
    from staghunt.policy_learner import sample_action

    policy = PolicyParams()
    key = ((1, 1), (2, 2), (0, 0), 0)
    policy.preferences[key] = np.array([2.0, 0.0, 0.0, 0.0, -2.0])
    rng = np.random.default_rng(8)
    draws = [sample_action(policy, key, rng) for _ in range(4000)]
    freq_first = draws.count(ACTIONS[0]) / len(draws)
    expected = action_probs(policy, key)[0]
    assert abs(freq_first - expected) < 0.03


def test_individual_learner_keeps_material_terminal_reward():
    from staghunt.policy_learner import _shaped_terminal_reward

    learner = make_grid_learner("individual")
    label_matrix = PayoffMatrix(4.0, 3.0, 2.0, 0.0)
    for labels, rewards in [((U, C), (3.0, 0.0)), ((C, U), (0.0, 3.0)), ((U, U), (2.0, 2.0))]:
        detail = _shaped_terminal_reward(learner, labels, rewards, 0, label_matrix)
        assert detail.psychological == 0.0
        assert detail.shaped == rewards[0]
