import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsallis_mdp import oracles
from tsallis_mdp.errors import DomainError, UnsupportedIndexError
from tsallis_mdp.policy import (
    PolicySpec,
    greedy_policy,
    kl_prior_table,
    softmax_policy,
    sparsemax_policy,
    sparsemax_table,
    taylor_policy,
    taylor_table,
    tkl2_table,
    tkl_greedy_policy,
    total_variation,
    tsallis_policy,
)
from tsallis_mdp.qmath import tsallis_entropy

rows = st.lists(st.floats(-5.0, 5.0), min_size=1, max_size=8).map(np.asarray)
taus = st.sampled_from([0.1, 1.0, 10.0])


def _valid(pi):
    return np.all(pi >= 0) and abs(pi.sum() - 1.0) <= 1e-12


def test_softmax_examples():
    assert np.allclose(softmax_policy([2.0, 2.0, 2.0], 0.3), 1.0 / 3.0)
    e = math.e
    assert np.allclose(softmax_policy([1.0, 0.0], 1.0), [e / (e + 1), 1 / (e + 1)], atol=1e-15)


def test_sparsemax_examples():
    res = sparsemax_policy([3.0, 1.0, 0.0], 1.0)
    assert np.array_equal(res.pi, [1.0, 0.0, 0.0])
    assert res.support.indices == (0,)
    assert res.psi == pytest.approx(0.5)
    assert np.allclose(sparsemax_policy([4.0] * 4, 1.0).pi, 0.25)


def test_greedy_examples():
    assert np.array_equal(greedy_policy([1.0, 2.0, 3.0]), [0, 0, 1])
    assert np.array_equal(greedy_policy([5.0, 5.0, 1.0]), [1, 0, 0])


def test_small_tau_sparsemax_concentrates():
    rng = np.random.default_rng(0)
    for _ in range(100):
        row = rng.uniform(-1, 1, rng.integers(2, 9))
        assert np.array_equal(sparsemax_policy(row, 1e-6).pi, greedy_policy(row))


@given(rows, taus)
def test_sparsemax_matches_enumeration(row, tau):
    res = sparsemax_policy(row, tau)
    ref = oracles.sparsemax_by_enumeration(row, tau)
    assert set(res.support.indices) == set(np.flatnonzero(ref))
    assert np.max(np.abs(res.pi - ref)) <= 1e-10


@given(rows, taus)
def test_truncation_boundary(row, tau):
    res = sparsemax_policy(row, tau)
    threshold = 2 * tau * res.psi
    kept = np.zeros(row.size, bool)
    kept[list(res.support.indices)] = True
    assert np.all(row[kept] > threshold - 1e-12)
    assert np.all(row[~kept] <= threshold + 1e-12)
    assert np.all(res.pi[~kept] == 0)


@given(rows, taus, st.floats(-50, 50))
def test_translation_invariance(row, tau, c):
    assert np.allclose(sparsemax_policy(row + c, tau).pi, sparsemax_policy(row, tau).pi, atol=1e-10)
    assert np.allclose(softmax_policy(row + c, tau), softmax_policy(row, tau), atol=1e-10)
    # the shift can round near-ties together, so compare picked values
    assert row[np.argmax(greedy_policy(row + c))] >= row.max() - 1e-12 * (1 + abs(c))
    spec = PolicySpec(3.0, tau)
    assert np.allclose(taylor_policy(row + c, spec).pi, taylor_policy(row, spec).pi, atol=1e-10)


@given(rows)
def test_support_grows_with_tau(row):
    sizes = [len(sparsemax_policy(row, t).support) for t in np.geomspace(1e-3, 1e3, 25)]
    assert sizes == sorted(sizes)


@given(rows, taus, st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0, 4.5]))
def test_policies_are_valid(row, tau, q):
    for pi in (softmax_policy(row, tau), sparsemax_policy(row, tau).pi, greedy_policy(row), tsallis_policy(row, q, tau)):
        assert _valid(pi)


def test_taylor_constant_row_uniform():
    for q in (0.5, 1.5, 2.0, 3.0):
        assert np.allclose(taylor_policy(np.zeros(5), PolicySpec(q, 0.7)).pi, 0.2)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=8).map(np.asarray), taus, st.floats(0.1, 2.0))
def test_taylor_q2_is_sparsemax_at_scaled_tau(row, tau, p):
    # with z = Q / (2 tau) the linearized policy is z - psi on its support with
    # sum 1 = sum z - k psi scaled by 1/p, which is sparsemax at temperature p tau
    pi = taylor_policy(row, PolicySpec(2.0, tau, p)).pi
    assert np.max(np.abs(pi - sparsemax_policy(row, p * tau).pi)) <= 1e-8


@given(rows, taus, st.floats(1.1, 5.0), st.floats(0.2, 2.0))
def test_taylor_equals_sparsemax_at_pqtau_over_2(row, tau, q, p):
    pi = taylor_table(row[None, :], q, tau, p)[0][0]
    assert np.max(np.abs(pi - sparsemax_policy(row, p * q * tau / 2.0).pi)) <= 1e-8


def _tsallis_entropy_oracle(row, q, tau):
    def f(x):
        return float(x @ row + tau * tsallis_entropy(x, q, validate=False))

    def g(x):
        with np.errstate(divide="ignore"):
            return row + tau * (q / (q - 1.0)) * (1.0 / q - x ** (q - 1.0)) if q != 1 else row - tau * (np.log(x) + 1)

    return oracles.simplex_maximize(f, g, row.size)


def test_taylor_q3_close_to_exact_optimizer():
    row = np.array([2.0, 1.0, 0.0])
    exact = _tsallis_entropy_oracle(row, 3.0, 1.0)
    assert exact.converged
    pi = taylor_policy(row, PolicySpec(3.0, 1.0)).pi
    assert total_variation(pi, exact.argmax) <= 0.05


def test_taylor_printed_support_rule_is_documented_outlier():
    row = np.array([2.0, 1.0, 0.0])
    exact = _tsallis_entropy_oracle(row, 3.0, 1.0).argmax
    printed = taylor_policy(row, PolicySpec(3.0, 1.0), support_rule="printed").pi
    assert total_variation(printed, exact) > 0.1


def test_taylor_rejects_q1_and_infinity():
    with pytest.raises(UnsupportedIndexError):
        taylor_policy([1.0, 0.0], PolicySpec(1.0, 1.0))
    with pytest.raises(UnsupportedIndexError):
        taylor_policy([1.0, 0.0], PolicySpec(math.inf, 1.0))


def test_taylor_diagnostics():
    diag = {}
    taylor_policy([3.0, 1.0, 0.2], PolicySpec(2.5, 0.4), diagnostics=diag)
    assert diag["defect"] >= 0


def test_policy_spec_validation():
    with pytest.raises(DomainError):
        PolicySpec(2.0, 0.0)
    with pytest.raises(DomainError):
        PolicySpec(2.0, 1.0, p=-1)
    with pytest.raises(DomainError):
        sparsemax_policy([1.0], -1.0)


# --- Tsallis KL greedy step ---


def test_tkl_large_tau_returns_prior():
    prior = np.array([0.5, 0.3, 0.2])
    for q in (1.0, 2.0, 3.0):
        pi = tkl_greedy_policy(np.array([1.0, -2.0, 0.5]), prior, 1e6, q)
        assert total_variation(pi, prior) < 1e-4


def test_tkl_q1_is_prior_times_exp():
    rng = np.random.default_rng(1)
    for _ in range(20):
        row, prior = rng.normal(size=4), rng.dirichlet(np.ones(4))
        ref = prior * np.exp(row / 0.7)
        ref /= ref.sum()
        assert np.max(np.abs(tkl_greedy_policy(row, prior, 0.7, 1.0) - ref)) < 1e-8


def test_tkl_two_action_example():
    pi_num = tkl_greedy_policy(np.array([1.0, 0.0]), np.array([0.9, 0.1]), 1.0, 2.0)
    pi_closed = tkl_greedy_policy(np.array([1.0, 0.0]), np.array([0.9, 0.1]), 1.0, 2.0, method="closed_form")
    assert total_variation(pi_num, pi_closed) < 1e-6
    # hand solution: pi = mu (Q - lam) / 2 with lam from normalization
    lam = (0.9 * 1.0 + 0.1 * 0.0 - 2.0) / 1.0
    assert np.allclose(pi_closed, [0.9 * (1 - lam) / 2, 0.1 * (0 - lam) / 2], atol=1e-15)


def test_tkl_uniform_prior_is_sparsemax():
    # D_2(pi || u) = n sum pi^2 - 1 = n (1 - S_2(pi)) - 1, so tau D_2 acts like tau n S_2
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        row, tau = rng.normal(size=n), float(rng.choice([0.1, 1.0]))
        pi = tkl_greedy_policy(row, np.full(n, 1.0 / n), tau, 2.0)
        assert total_variation(pi, sparsemax_policy(row, n * tau).pi) < 1e-8


def test_tkl_closed_form_table_matches_optimizer():
    rng = np.random.default_rng(4)
    Q = rng.normal(size=(30, 5))
    prior = rng.dirichlet(np.ones(5), size=30)
    pi, psi = tkl2_table(Q, prior, 0.3)
    for s in range(30):
        assert total_variation(pi[s], tkl_greedy_policy(Q[s], prior[s], 0.3, 2.0)) < 1e-8
    # pi = prior * exp_2(Q / (2 tau) - psi) with exp_2(x) = [1 + x]_+
    assert np.allclose(pi, prior * np.maximum(1.0 + Q / 0.6 - psi[:, None], 0.0), atol=1e-12)


def test_tkl_respects_prior_support():
    pi = tkl_greedy_policy(np.array([5.0, 0.0, 1.0]), np.array([0.0, 0.5, 0.5]), 0.2, 2.0)
    assert pi[0] == 0.0 and _valid(pi)


def test_tkl_other_q_numeric_only():
    pi = tkl_greedy_policy(np.array([1.0, 0.0, 0.5]), np.full(3, 1 / 3), 0.5, 1.5)
    assert _valid(pi)
    with pytest.raises(UnsupportedIndexError):
        tkl_greedy_policy(np.array([1.0, 0.0]), np.array([0.5, 0.5]), 0.5, 1.5, method="closed_form")


def test_kl_prior_table_weight_zero_is_softmax():
    Q = np.array([[1.0, 0.0, -1.0]])
    assert np.allclose(kl_prior_table(Q, np.array([[0.7, 0.2, 0.1]]), 0.5, weight=0.0)[0], softmax_policy(Q[0], 0.5))


def test_table_and_row_agree():
    rng = np.random.default_rng(5)
    Q = rng.normal(size=(10, 6))
    pi, _, _ = sparsemax_table(Q, 0.4)
    for s in range(10):
        assert np.array_equal(pi[s], sparsemax_policy(Q[s], 0.4).pi)
