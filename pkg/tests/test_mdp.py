import json

import numpy as np
import pytest

from tsallis_mdp.envs import EnvKind, EnvSpec, make_chain, random_mdp
from tsallis_mdp.errors import MdpParseError, MdpValidationError
from tsallis_mdp.mdp import (
    TabularMdp,
    bellman_expectation,
    bellman_optimality,
    content_hash,
    exact_policy_value,
    mdp_from_file,
    mdp_from_json,
    mdp_hash,
    mdp_to_dict,
    mdp_to_file,
    regularized_backup,
)
from tsallis_mdp.policy import greedy_table, softmax_table


def hand_mdp():
    P = np.zeros((2, 2, 2))
    P[0, 0] = [1.0, 0.0]
    P[0, 1] = [0.5, 0.5]
    P[1, 0] = [0.0, 1.0]
    P[1, 1] = [0.25, 0.75]
    r = np.array([[1.0, 0.0], [2.0, -1.0]])
    return TabularMdp(P, r, 0.5, [1.0, 0.0])


def test_expectation_by_hand():
    mdp = hand_mdp()
    Q = np.array([[1.0, 2.0], [3.0, 4.0]])
    pi = np.array([[0.5, 0.5], [1.0, 0.0]])
    v = [1.5, 3.0]
    expected = [
        [1.0 + 0.5 * v[0], 0.0 + 0.5 * (0.5 * v[0] + 0.5 * v[1])],
        [2.0 + 0.5 * v[1], -1.0 + 0.5 * (0.25 * v[0] + 0.75 * v[1])],
    ]
    assert np.allclose(bellman_expectation(mdp, Q, pi), expected, atol=1e-15)


def test_zero_reward_zero_q():
    mdp = random_mdp(1)
    zero = TabularMdp(mdp.transition, np.zeros(mdp.shape), mdp.gamma, mdp.initial_dist)
    pi = np.full(mdp.shape, 1.0 / mdp.n_actions)
    assert np.all(bellman_expectation(zero, np.zeros(mdp.shape), pi) == 0)


def test_single_state_optimum():
    mdp = TabularMdp(np.ones((1, 1, 1)), [[1.0]], 0.9, [1.0])
    Q = np.zeros((1, 1))
    for _ in range(400):
        Q = bellman_optimality(mdp, Q)
    assert Q[0, 0] == pytest.approx(10.0, abs=1e-12)


def test_contraction_and_monotonicity():
    rng = np.random.default_rng(0)
    mdp = random_mdp(3)
    for _ in range(100):
        Q1, Q2 = rng.normal(size=(2, *mdp.shape)) * 5
        pi = rng.dirichlet(np.ones(mdp.n_actions), size=mdp.n_states)
        gap = np.max(np.abs(Q1 - Q2))
        assert np.max(np.abs(bellman_expectation(mdp, Q1, pi) - bellman_expectation(mdp, Q2, pi))) <= mdp.gamma * gap + 1e-12
        assert np.max(np.abs(bellman_optimality(mdp, Q1) - bellman_optimality(mdp, Q2))) <= mdp.gamma * gap + 1e-12
        omega = rng.normal(size=mdp.n_states)
        d = regularized_backup(mdp, Q1, pi, omega) - regularized_backup(mdp, Q2, pi, omega)
        assert np.max(np.abs(d)) <= mdp.gamma * gap + 1e-12
        lo = np.minimum(Q1, Q2)
        assert np.all(bellman_optimality(mdp, lo) <= bellman_optimality(mdp, Q1) + 1e-12)


def test_optimality_is_expectation_under_greedy():
    rng = np.random.default_rng(1)
    mdp = random_mdp(4)
    for _ in range(100):
        Q = rng.normal(size=mdp.shape)
        assert np.allclose(bellman_optimality(mdp, Q), bellman_expectation(mdp, Q, greedy_table(Q)), atol=1e-12)


def test_value_iteration_matches_policy_iteration():
    mdp = random_mdp(5, n_states=5, n_actions=3)
    Q = np.zeros(mdp.shape)
    while True:
        nxt = bellman_optimality(mdp, Q)
        done = np.max(np.abs(nxt - Q)) < 1e-12
        Q = nxt
        if done:
            break
    pi = greedy_table(np.zeros(mdp.shape))
    for _ in range(50):
        Qpi = exact_policy_value(mdp, pi)
        new = greedy_table(Qpi)
        if np.array_equal(new, pi):
            break
        pi = new
    assert np.max(np.abs(Q - Qpi)) < 1e-10


def test_regularized_backup_zero_omega():
    mdp = random_mdp(6)
    rng = np.random.default_rng(6)
    Q = rng.normal(size=mdp.shape)
    pi = softmax_table(Q, 0.3)
    assert np.array_equal(regularized_backup(mdp, Q, pi, np.zeros(mdp.n_states)), bellman_expectation(mdp, Q, pi))


def test_soft_fixed_point_matches_logsumexp_vi():
    from scipy.special import logsumexp

    mdp = random_mdp(7, n_states=3, n_actions=2, branching=2)
    tau = 0.4
    Q = np.zeros(mdp.shape)
    for _ in range(3000):
        pi = softmax_table(Q, tau)
        with np.errstate(divide="ignore", invalid="ignore"):
            ent = -np.sum(np.where(pi > 0, pi * np.log(pi), 0.0), axis=1)
        Q = regularized_backup(mdp, Q, pi, -tau * ent)
    soft = np.zeros(mdp.shape)
    for _ in range(3000):
        soft = mdp.reward + mdp.gamma * np.einsum("ijk,k->ij", mdp.transition, tau * logsumexp(soft / tau, axis=1))
    assert np.max(np.abs(Q - soft)) < 1e-10


def test_exact_value_matches_iteration():
    rng = np.random.default_rng(8)
    for seed in range(50):
        mdp = random_mdp(seed)
        pi = rng.dirichlet(np.ones(mdp.n_actions), size=mdp.n_states)
        omega = rng.normal(size=mdp.n_states)
        exact = exact_policy_value(mdp, pi, omega)
        assert np.max(np.abs(regularized_backup(mdp, exact, pi, omega) - exact)) <= 1e-10
        Q = np.zeros(mdp.shape)
        for _ in range(400):
            Q = regularized_backup(mdp, Q, pi, omega)
        assert np.max(np.abs(Q - exact)) < 1e-10


def test_exact_value_single_state_and_chain():
    mdp = TabularMdp(np.ones((1, 2, 1)), [[1.0, 3.0]], 0.8, [1.0])
    pi = np.array([[0.25, 0.75]])
    Q = exact_policy_value(mdp, pi, np.array([0.5]))
    v = (0.25 * 1 + 0.75 * 3 - 0.5) / (1 - 0.8)
    assert np.dot(pi[0], Q[0]) - 0.5 == pytest.approx(v, abs=1e-12)
    chain = make_chain(EnvSpec(EnvKind.CHAIN, length=4, gamma=0.9))
    right = np.tile([0.0, 1.0], (4, 1))
    # goal reached after 3 moves, then 1 per step forever
    assert exact_policy_value(chain, right)[0, 1] == pytest.approx(0.9**3 / 0.1, abs=1e-12)


def test_validation_errors():
    P = np.full((2, 1, 2), 0.5)
    with pytest.raises(MdpValidationError, match="gamma"):
        TabularMdp(P, np.zeros((2, 1)), 1.0, [0.5, 0.5])
    with pytest.raises(MdpValidationError, match="state 1, action 0"):
        bad = P.copy()
        bad[1, 0] = [0.5, 0.4]
        TabularMdp(bad, np.zeros((2, 1)), 0.9, [0.5, 0.5])
    with pytest.raises(ValueError):
        bellman_optimality(random_mdp(0), np.zeros((2, 2)))


def test_immutable():
    mdp = hand_mdp()
    with pytest.raises(ValueError):
        mdp.reward[0, 0] = 5.0


def test_round_trip_bitwise(tmp_path):
    for mdp in (random_mdp(11), make_chain(EnvSpec(EnvKind.CHAIN, length=6, noise=0.13))):
        path = tmp_path / "m.json"
        mdp_to_file(mdp, path)
        back = mdp_from_file(path)
        assert back.same_as(mdp)
        assert back.meta == mdp.meta
        assert content_hash(path) == mdp_hash(mdp)
        assert path.read_bytes().endswith(b"\n") and b"\r" not in path.read_bytes()


def test_row_sum_09_rejected_with_location():
    doc = mdp_to_dict(random_mdp(2))
    doc["transition"][3][1] = [v * 0.9 for v in doc["transition"][3][1]]
    with pytest.raises(MdpValidationError, match="state 3, action 1"):
        mdp_from_json(json.dumps(doc))


def test_small_drift_renormalized():
    doc = mdp_to_dict(random_mdp(2))
    row = doc["transition"][0][0]
    k = int(np.argmax(row))
    row[k] += 5e-10
    mdp = mdp_from_json(json.dumps(doc))
    assert abs(mdp.transition[0, 0].sum() - 1.0) <= 1e-12


def test_parse_errors_name_context(tmp_path):
    with pytest.raises(MdpParseError, match="line 1, column"):
        mdp_from_json("{bad json")
    doc = mdp_to_dict(random_mdp(2))
    del doc["reward"]
    with pytest.raises(MdpParseError, match="reward"):
        mdp_from_json(json.dumps(doc))
    doc = mdp_to_dict(random_mdp(2))
    doc["reward"] = [[1, 2]]
    with pytest.raises(MdpParseError, match="'reward' must have shape"):
        mdp_from_json(json.dumps(doc))
    with pytest.raises(MdpParseError, match="cannot read"):
        mdp_from_file(tmp_path / "missing.json")


def test_content_hash_is_git_blob_id():
    # `printf 'hello\n' | git hash-object --stdin`
    assert content_hash(b"hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a"
