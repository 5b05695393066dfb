import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsallis_mdp import oracles
from tsallis_mdp.errors import PreconditionError
from tsallis_mdp.policy import softmax_policy, sparsemax_policy
from tsallis_mdp.qmath import q_exp


def _s2_problem(row, tau):
    f = lambda x: float(x @ row + tau * (1.0 - x @ x))  # noqa: E731
    g = lambda x: row - 2.0 * tau * x  # noqa: E731
    return f, g


def test_linear_objective_gives_argmax():
    row = np.array([0.3, 2.0, -1.0, 1.9])
    res = oracles.simplex_maximize(lambda x: float(x @ row), lambda x: row, 4)
    assert res.converged
    assert np.allclose(res.argmax, [0, 1, 0, 0], atol=1e-9)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=8).map(np.asarray), st.sampled_from([0.1, 1.0, 10.0]))
def test_optimizer_and_enumeration_agree(row, tau):
    f, g = _s2_problem(row, tau)
    res = oracles.simplex_maximize(f, g, row.size)
    ref = oracles.sparsemax_by_enumeration(row, tau)
    assert res.converged
    assert np.max(np.abs(res.argmax - ref)) < 1e-8
    assert np.max(np.abs(res.argmax - sparsemax_policy(row, tau).pi)) < 1e-8


def test_entropy_objective_gives_softmax():
    rng = np.random.default_rng(0)
    for _ in range(50):
        row, tau = rng.normal(size=5), 0.5

        def f(x):
            pos = x > 0
            return float(x @ row - tau * np.sum(x[pos] * np.log(x[pos])))

        def g(x):
            with np.errstate(divide="ignore"):
                return row - tau * (np.log(x) + 1.0)

        res = oracles.simplex_maximize(f, g, 5)
        assert res.converged
        assert np.max(np.abs(res.argmax - softmax_policy(row, tau))) < 1e-8


def test_enumeration_examples():
    assert np.array_equal(oracles.sparsemax_by_enumeration([3.0, 1.0, 0.0], 1.0), [1.0, 0.0, 0.0])
    assert np.allclose(oracles.sparsemax_by_enumeration([1.0] * 5, 0.3), 0.2)


def test_kl_average_policy_examples():
    rng = np.random.default_rng(1)
    Q = rng.normal(size=(3, 4))
    assert np.allclose(oracles.kl_average_policy([Q], 0.7, 1), softmax_policy(Q[1], 0.7))
    assert np.allclose(oracles.kl_average_policy([Q] * 6, 0.7, 2), softmax_policy(6 * Q[2], 0.7))


def test_weighted_average_examples():
    assert oracles.weighted_average_identity_check([0.4], 2.5) == 0.0
    # exp_2(0.8) = 1.8 and exp_2(0.5) exp_2(0.3 / 1.5) = 1.5 * 1.2
    assert oracles.weighted_average_identity_check([0.5, 0.3], 2.0) < 1e-15
    assert q_exp(0.8, 2) == pytest.approx(1.8)


@given(st.lists(st.floats(0.0, 0.5), min_size=1, max_size=5), st.floats(1.01, 3.0))
def test_weighted_average_sweep(values, q):
    assert oracles.weighted_average_identity_check(values, q) < 1e-10


@given(st.lists(st.floats(-0.4, 0.5), min_size=1, max_size=6), st.floats(0.3, 3.0).filter(lambda q: abs(q - 1) > 1e-2))
def test_product_expansion(values, q):
    if any(1 + (q - 1) * v <= 1e-3 for v in values + [sum(values)]):
        return
    assert oracles.product_expansion_defect(values, q) < 1e-9


def test_product_expansion_competing_reading_only_agrees_at_q2():
    vals = [0.2, 0.3, 0.1]
    alt = lambda j: 2 * (j - 1)  # noqa: E731
    assert oracles.product_expansion_defect(vals, 2.0, exponent=alt) < 1e-14
    assert oracles.product_expansion_defect(vals, 1.7, exponent=alt) > 1e-4


def test_elementary_symmetric_by_hand():
    vals = [1.0, 2.0, 3.0, 4.0]
    assert oracles.elementary_symmetric(vals, 2) == sum(a * b for a, b in itertools.combinations(vals, 2))
    assert oracles.elementary_symmetric(vals, 4) == 24.0


def test_clipped_inputs_rejected():
    with pytest.raises(PreconditionError):
        oracles.product_expansion_defect([-2.0, 0.1], 2.0)
    with pytest.raises(PreconditionError):
        oracles.weighted_average_identity_check([-3.0], 1.5)


def test_enumeration_size_limit():
    with pytest.raises(ValueError):
        oracles.sparsemax_by_enumeration(np.zeros(21), 1.0)
    with pytest.raises(ValueError):
        oracles.product_expansion_defect([0.1] * 7, 2.0)


def test_optimizer_handles_degenerate_boundary():
    # the second action sits exactly on the support threshold
    f, g = _s2_problem(np.array([1.0, 0.0]), 0.5)
    res = oracles.simplex_maximize(f, g, 2)
    assert res.converged and math.isclose(res.argmax[0], 1.0, abs_tol=1e-8)
