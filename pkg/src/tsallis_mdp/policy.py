"""Regularized greedy policies built from action values.

Row functions (``softmax_policy``, ``sparsemax_policy``, ...) take a 1-D
array of action values and return a distribution over actions. The
``*_table`` functions do the same for every row of a ``(states, actions)``
table at once and are what the solvers call.

Actions are ranked by value with ties broken by lower index first, so the
support sets below are deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import log_softmax, logsumexp

from .errors import ConvergenceError, DomainError, UnsupportedIndexError
from .qmath import as_q, check_prob, tsallis_kl

PRIOR_FLOOR = 1e-15


@dataclass(frozen=True)
class SupportSet:
    """Actions kept by a truncating policy, ordered by decreasing value."""

    indices: tuple
    sorted_values: tuple

    def __len__(self):
        return len(self.indices)

    def __contains__(self, a):
        return a in self.indices


@dataclass(frozen=True)
class PolicySpec:
    q: float
    tau: float
    p: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "q", as_q(self.q))
        if not self.tau > 0:
            raise DomainError(f"tau must be > 0, got {self.tau}")
        if not self.p > 0:
            raise DomainError(f"p must be > 0, got {self.p}")


class PolicyResult(NamedTuple):
    pi: np.ndarray
    support: SupportSet
    psi: float


def _check_tau(tau):
    if not tau > 0:
        raise DomainError(f"tau must be > 0, got {tau}")


def _as_table(Q):
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[1] == 0:
        raise DomainError("expected a (states, actions) table")
    return Q


def _rank(Z):
    """Descending order with ties broken by lower index, plus each action's rank."""
    order = np.argsort(-Z, axis=1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(Z.shape[1])[None, :], axis=1)
    return order, ranks


def _largest_true(cond):
    """1-based position of the last True per row; 0 when a row has none."""
    n = cond.shape[1]
    last = n - np.argmax(cond[:, ::-1], axis=1)
    return np.where(cond.any(axis=1), last, 0)


def _support(row, order, k):
    idx = tuple(int(a) for a in order[:k])
    return SupportSet(idx, tuple(float(row[a]) for a in idx))


# --- tables -------------------------------------------------------------------


def softmax_table(Q, tau):
    _check_tau(tau)
    return np.exp(log_softmax(_as_table(Q) / tau, axis=1))


def log_softmax_table(Q, tau):
    _check_tau(tau)
    return log_softmax(_as_table(Q) / tau, axis=1)


def greedy_table(Q):
    Q = _as_table(Q)
    pi = np.zeros_like(Q)
    pi[np.arange(Q.shape[0]), np.argmax(Q, axis=1)] = 1.0
    return pi


def sparsemax_table(Q, tau, *, strict=True):
    """Sparsemax of ``Q / (2 tau)`` per row; returns ``(pi, support_size, psi)``."""
    _check_tau(tau)
    Z = _as_table(Q) / (2.0 * tau)
    order, ranks = _rank(Z)
    Zs = np.take_along_axis(Z, order, axis=1)
    css = np.cumsum(Zs, axis=1)
    i = np.arange(1, Z.shape[1] + 1)
    lhs = 1.0 + i * Zs
    cond = lhs > css if strict else lhs >= css
    k = np.maximum(_largest_true(cond), 1)
    rows = np.arange(Z.shape[0])
    psi = (css[rows, k - 1] - 1.0) / k
    pi = np.where(ranks < k[:, None], np.maximum(Z - psi[:, None], 0.0), 0.0)
    return pi, k, psi


def taylor_table(Q, q, tau, p=0.5, *, strict=False, support_rule="consistent"):
    """First-order Taylor approximation of the Tsallis-entropy greedy policy.

    With ``z = Q / (q tau)`` and ``c = p - p / (q - 1)`` the linearized policy
    is ``1 + ((z - psi) (q - 1) / p - 1) / (q - 1)`` on the support and
    ``psi = (sum_S z - p) / |S| + c`` normalizes it. The support is the
    largest prefix ``i`` of ranked actions with

    * ``support_rule='consistent'``: ``p + i z_(i) >= sum_{j<=i} z_(j)``,
      which is exactly positivity of the linearized mass of ``a_(i)``;
    * ``support_rule='printed'``: ``p + i z_(i) >= sum_{j<=i} z_(j) + i c``.

    The two rules coincide at ``q = 2``. Under the consistent rule the
    result equals ``sparsemax`` at temperature ``p q tau / 2``.

    Returns ``(pi, support_size, psi_tilde, defect)``, where ``defect`` is the
    L1 distance between the raw linearized values on the support and the
    clipped, renormalized policy.
    """
    q = as_q(q)
    if q == 1.0 or math.isinf(q):
        raise UnsupportedIndexError("the Taylor policy is defined for finite q != 1")
    _check_tau(tau)
    if not p > 0:
        raise DomainError(f"p must be > 0, got {p}")
    Z = _as_table(Q) / (q * tau)
    order, ranks = _rank(Z)
    Zs = np.take_along_axis(Z, order, axis=1)
    css = np.cumsum(Zs, axis=1)
    i = np.arange(1, Z.shape[1] + 1)
    shift = p - p / (q - 1.0)
    if support_rule not in ("consistent", "printed"):
        raise ValueError(f"unknown support_rule {support_rule!r}")
    lhs = p + i * Zs
    rhs = css + i * shift if support_rule == "printed" else css
    cond = lhs > rhs if strict else lhs >= rhs
    # the printed rule can reject every prefix; keep the top action then
    k = np.maximum(_largest_true(cond), 1)
    rows = np.arange(Z.shape[0])
    psi = (css[rows, k - 1] - p) / k + shift
    in_support = ranks < k[:, None]
    raw = 1.0 + ((Z - psi[:, None]) * (q - 1.0) / p - 1.0) / (q - 1.0)
    raw = np.where(in_support, raw, 0.0)
    pi = np.clip(raw, 0.0, 1.0)
    total = pi.sum(axis=1)
    dead = total <= 0
    if np.any(dead):
        top = order[dead, 0]
        pi[dead] = 0.0
        pi[np.flatnonzero(dead), top] = 1.0
        total = pi.sum(axis=1)
    pi = pi / total[:, None]
    defect = np.abs(raw - pi).sum(axis=1)
    return pi, k, psi, defect


def tsallis_policy_table(Q, q, tau, p=0.5):
    """Greedy policy under ``-tau S_q``: softmax, sparsemax, Taylor or argmax by ``q``."""
    q = as_q(q)
    if q == 1.0:
        return softmax_table(Q, tau)
    if q == 2.0:
        return sparsemax_table(Q, tau)[0]
    if math.isinf(q):
        return greedy_table(Q)
    return taylor_table(Q, q, tau, p)[0]


def kl_prior_table(Q, prior, tau, weight=1.0):
    """``pi ∝ prior**weight * exp(Q / tau)`` row by row."""
    _check_tau(tau)
    Q = _as_table(Q)
    prior = np.asarray(prior, dtype=float)
    with np.errstate(divide="ignore"):
        logits = Q / tau + weight * np.where(prior > PRIOR_FLOOR, np.log(prior), -np.inf)
    return np.exp(logits - logsumexp(logits, axis=1, keepdims=True))


def tkl2_table(Q, prior, tau):
    """Exact maximizer of ``<pi, Q> - tau D_2(pi || prior)`` per row.

    The optimum is ``pi = prior * [Q - lam]_+ / (2 tau)``; the threshold
    ``lam`` is found by scanning actions in decreasing value, like sparsemax
    with prior weights. Returns ``(pi, psi)`` where ``psi = 1 + lam / (2 tau)``
    so that ``pi = prior * exp_2(Q / (2 tau) - psi)``.
    """
    _check_tau(tau)
    Q = _as_table(Q)
    mu = np.asarray(prior, dtype=float)
    live = mu > PRIOR_FLOOR
    # off-support actions sort last and carry no weight
    key = np.where(live, Q, -np.inf)
    order, ranks = _rank(key)
    Qs = np.take_along_axis(Q, order, axis=1)
    ws = np.take_along_axis(np.where(live, mu, 0.0), order, axis=1)
    W = np.cumsum(ws, axis=1)
    WQ = np.cumsum(ws * Qs, axis=1)
    n_live = live.sum(axis=1)
    pos = np.arange(Q.shape[1])[None, :]
    cond = (WQ - Qs * W < 2.0 * tau) & (pos < n_live[:, None])
    k = np.maximum(_largest_true(cond), 1)
    rows = np.arange(Q.shape[0])
    lam = (WQ[rows, k - 1] - 2.0 * tau) / W[rows, k - 1]
    keep = (ranks < k[:, None]) & live
    pi = np.where(keep, mu * np.maximum(Q - lam[:, None], 0.0) / (2.0 * tau), 0.0)
    pi = pi / pi.sum(axis=1, keepdims=True)
    return pi, 1.0 + lam / (2.0 * tau)


# --- rows ---------------------------------------------------------------------


def _as_row(row):
    row = np.asarray(row, dtype=float)
    if row.ndim != 1 or row.size == 0:
        raise DomainError("expected a nonempty 1-D array of action values")
    return row


def softmax_policy(row, tau):
    return softmax_table(_as_row(row)[None, :], tau)[0]


def sparsemax_policy(row, tau, *, strict=True) -> PolicyResult:
    """Sparsemax ``pi(a) = [Q(a)/(2 tau) - psi]_+``.

    ``psi = (sum_{a in S} Q(a)/(2 tau) - 1) / |S|`` where ``S`` is the largest
    prefix ``i`` of the ranked actions with
    ``1 + i Q(a_(i))/(2 tau) > sum_{j<=i} Q(a_(j))/(2 tau)``.
    ``strict=False`` uses ``>=`` instead and exists for fault-injection checks.
    """
    row = _as_row(row)
    pi, k, psi = sparsemax_table(row[None, :], tau, strict=strict)
    order = np.argsort(-row, kind="stable")
    return PolicyResult(pi[0], _support(row, order, int(k[0])), float(psi[0]))


def taylor_policy(row, spec: PolicySpec, diagnostics=None, support_rule="consistent") -> PolicyResult:
    """Approximate Tsallis policy for general ``q`` (Taylor expansion at 1).

    If ``diagnostics`` is a dict it receives ``'defect'``, the L1 mass moved
    by clipping the linearized values to ``[0, 1]`` and renormalizing.
    """
    row = _as_row(row)
    pi, k, psi, defect = taylor_table(row[None, :], spec.q, spec.tau, spec.p, support_rule=support_rule)
    if diagnostics is not None:
        diagnostics["defect"] = float(defect[0])
    order = np.argsort(-row, kind="stable")
    return PolicyResult(pi[0], _support(row, order, int(k[0])), float(psi[0]))


def greedy_policy(row):
    return greedy_table(_as_row(row)[None, :])[0]


def tsallis_policy(row, q, tau, p=0.5):
    return tsallis_policy_table(_as_row(row)[None, :], q, tau, p)[0]


def total_variation(p, m):
    return 0.5 * np.abs(np.asarray(p, dtype=float) - np.asarray(m, dtype=float)).sum(axis=-1)


def _tkl_objective(Q, mu, tau, q):
    """``<pi, Q> - tau D_q(pi || mu)`` and its gradient, for ``mu > 0``."""
    if q == 1.0:
        def f(x):
            pos = x > 0
            return float(x @ Q - tau * np.sum(x[pos] * np.log(x[pos] / mu[pos])))

        def grad(x):
            with np.errstate(divide="ignore"):
                return Q - tau * (np.log(x / mu) + 1.0)
    else:
        c = tau / (q - 1.0)

        def f(x):
            return float(x @ Q - c * (np.sum(x**q * mu ** (1.0 - q)) - 1.0))

        def grad(x):
            with np.errstate(divide="ignore"):
                return Q - c * q * x ** (q - 1.0) * mu ** (1.0 - q)
    return f, grad


def tkl_greedy_policy(row, prior, tau, q, *, method="numeric", tol=1e-10):
    """Maximizer of ``<pi, Q> - tau D_q(pi || prior)`` over the simplex.

    ``method='numeric'`` runs the reference simplex optimizer; for ``q`` in
    {1, 2} the closed form is computed as well and must agree within 1e-6
    total variation. ``method='closed_form'`` skips the optimizer and is
    only available for ``q`` in {1, 2}. Actions with prior below 1e-15 get
    probability zero.
    """
    from .oracles import simplex_maximize

    row = _as_row(row)
    q = as_q(q)
    _check_tau(tau)
    prior = check_prob(prior, "prior")
    if prior.shape != row.shape:
        raise DomainError("prior and row must have the same length")
    if math.isinf(q):
        raise UnsupportedIndexError("Tsallis KL needs a finite q")
    closed = None
    if q == 1.0:
        closed = kl_prior_table(row[None, :], prior[None, :], tau)[0]
    elif q == 2.0:
        closed = tkl2_table(row[None, :], prior[None, :], tau)[0][0]
    if method == "closed_form":
        if closed is None:
            raise UnsupportedIndexError("closed-form Tsallis KL greedy exists only for q in {1, 2}")
        return closed
    if method != "numeric":
        raise ValueError(f"unknown method {method!r}")

    live = np.flatnonzero(prior > PRIOR_FLOOR)
    mu = prior[live] / prior[live].sum()
    f, grad = _tkl_objective(row[live], mu, tau, q)
    res = simplex_maximize(f, grad, live.size, tol=tol)
    if not res.converged:
        raise ConvergenceError(
            f"simplex optimizer did not certify the Tsallis KL greedy step (residual {res.residual:.3e})"
        )
    pi = np.zeros_like(row)
    pi[live] = res.argmax
    if closed is not None:
        tv = float(total_variation(pi, closed))
        if tv > 1e-6:
            raise ConvergenceError(f"closed form and optimizer disagree by {tv:.3e} total variation")
    return pi


def tkl_value(row, prior, tau, q, pi):
    """Objective ``<pi, Q> - tau D_q(pi || prior)``; handy for comparing candidates."""
    return float(np.dot(pi, row) - tau * tsallis_kl(pi, prior, q))
