"""Brute-force reference implementations.

These are deliberately independent of the production paths in
:mod:`tsallis_mdp.policy` and :mod:`tsallis_mdp.solvers`: they enumerate,
optimize numerically or expand sums term by term. They are slow and meant
for tests and the ``verify`` command.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import PreconditionError, UnsupportedIndexError
from .qmath import as_q, q_exp


@dataclass
class SimplexOptResult:
    argmax: np.ndarray
    objective: float
    iterations: int
    converged: bool
    residual: float


def _eg_phase(f, grad, x, tol, max_iter):
    """Exponentiated-gradient ascent with backtracking on the step size."""
    eta = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        g = grad(x)
        gap = float(np.max(g) - x @ g)
        if gap < tol:
            break
        fx = f(x)
        while True:
            logits = np.log(x) + eta * (g - np.max(g))
            y = np.exp(logits - logsumexp(logits))
            y = np.maximum(y, 1e-300)
            y /= y.sum()
            kl = float(np.sum(y * (np.log(y) - np.log(x))))
            if f(y) >= fx + g @ (y - x) - kl / eta - 1e-15 * (1.0 + abs(fx)):
                break
            eta *= 0.5
            if eta < 1e-12:
                return x, it
        x = y
        eta *= 1.5
    return x, it


def _newton_on_face(grad, x, support, max_iter=60):
    """Solve ``grad_S(x) = lam * 1``, ``sum x_S = 1`` on a fixed support.

    The Jacobian is built from central differences of the gradient, so
    only first-order information is needed.
    """
    S = np.asarray(support)
    n = S.size
    xs = x[S].copy()
    if n == 1:
        out = np.zeros_like(x)
        out[S] = 1.0
        return out, 0, True
    lam = float(np.mean(grad(_embed(x, S, xs))[S]))
    for it in range(1, max_iter + 1):
        full = _embed(x, S, xs)
        g = grad(full)[S]
        F = np.concatenate([g - lam, [xs.sum() - 1.0]])
        scale = 1.0 + np.max(np.abs(g))
        if np.max(np.abs(F)) < 1e-14 * scale:
            return full, it, True
        J = np.zeros((n + 1, n + 1))
        for j in range(n):
            h = min(1e-6 * max(xs[j], 1e-3), 0.5 * xs[j]) if xs[j] > 0 else 1e-9
            up, dn = xs.copy(), xs.copy()
            up[j] += h
            dn[j] = max(dn[j] - h, 0.0)
            J[:n, j] = (grad(_embed(x, S, up))[S] - grad(_embed(x, S, dn))[S]) / (up[j] - dn[j])
        J[:n, n] = -1.0
        J[n, :n] = 1.0
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return full, it, False
        t = 1.0
        neg = step[:n] < 0
        if np.any(neg):
            # stay strictly inside the face; a boundary hit means a wrong support
            t = min(1.0, 0.99 * float(np.min(-xs[neg] / step[:n][neg])))
        xs = xs + t * step[:n]
        lam = lam + t * step[n]
        if t < 1e-10:
            return _embed(x, S, xs), it, False
    return _embed(x, S, xs), max_iter, False


def _embed(x, S, xs):
    out = np.zeros_like(x)
    out[S] = xs
    return out


def simplex_maximize(objective, gradient, dim, tol=1e-10, max_iter=2000, x0=None, seed=0):
    """Maximize a concave function over the probability simplex.

    Exponentiated-gradient ascent locates the optimal face; an active-set
    Newton polish on that face then drives the first-order conditions to
    rounding level. The result is certified by the Frank-Wolfe gap
    ``max_a g_a - <x, g>`` (an upper bound on suboptimality) and by 20
    random feasible perturbations that must not improve the objective by
    more than ``tol``. Both tests scale ``tol`` by ``max(1, |gradient|_inf)``.
    """
    x = np.full(dim, 1.0 / dim) if x0 is None else np.asarray(x0, dtype=float).copy()
    # EG only has to locate the optimal face; the polish does the rest
    x, iters = _eg_phase(objective, gradient, x, max(tol, 1e-7), max_iter)

    support = np.flatnonzero(x > 1e-9 * np.max(x))
    for _ in range(2 * dim + 2):
        cand, it, ok = _newton_on_face(gradient, x, support)
        iters += it
        xs = cand[support]
        if not ok or np.any(xs <= 0):
            if support.size == 1:
                break
            # a wrong face shows up as a coordinate pushed to the boundary
            support = np.delete(support, np.argmin(xs))
            continue
        g = gradient(cand)
        lam = float(np.mean(g[support]))
        off = np.setdiff1d(np.arange(dim), support)
        if off.size and np.max(g[off]) > lam + 1e-12 * (1.0 + abs(lam)):
            support = np.sort(np.append(support, off[np.argmax(g[off])]))
            continue
        x = cand / cand.sum()
        break

    g = gradient(x)
    residual = float(np.max(g) - x @ g)
    fx = float(objective(x))
    # tolerances are relative to the gradient scale, floored at 1
    scale = max(1.0, float(np.max(np.abs(g[np.isfinite(g)]), initial=0.0)))
    rng = np.random.default_rng(seed)
    improved = False
    for _ in range(20):
        v = rng.dirichlet(np.ones(dim))
        for t in (1e-2, 1e-4, 1e-6):
            if objective((1 - t) * x + t * v) > fx + tol * scale:
                improved = True
    converged = bool(np.isfinite(residual) and residual < max(tol, 1e-12) * scale and not improved)
    return SimplexOptResult(x, fx, iters, converged, residual)


def sparsemax_by_enumeration(row, tau):
    """Sparsemax found by trying every support size and keeping the feasible one.

    For support size ``i`` over the ranked actions,
    ``psi_i = (sum_{j<=i} z_j - 1) / i`` with ``z = row / (2 tau)``. A candidate
    is feasible when every kept action gets positive mass and every dropped
    action would get nonpositive mass. Exactly one candidate must be feasible.
    """
    row = np.asarray(row, dtype=float)
    n = row.size
    if n > 20:
        raise ValueError("enumeration oracle is limited to 20 actions")
    z = row / (2.0 * tau)
    order = sorted(range(n), key=lambda a: (-z[a], a))
    feasible = []
    for i in range(1, n + 1):
        kept = order[:i]
        psi = (math.fsum(z[a] for a in kept) - 1.0) / i
        if all(z[a] - psi > 0 for a in kept) and all(z[a] - psi <= 0 for a in order[i:]):
            pi = np.zeros(n)
            for a in kept:
                pi[a] = z[a] - psi
            feasible.append(pi)
    assert len(feasible) == 1, f"expected one feasible support, found {len(feasible)}"
    return feasible[0]


def kl_average_policy(q_history, tau, state):
    """Softmax of the summed history ``sum_j Q_j[state] / tau``."""
    if len(q_history) == 0:
        raise ValueError("history must be nonempty")
    total = np.sum([np.asarray(Qj, dtype=float)[state] for Qj in q_history], axis=0)
    logits = total / tau
    return np.exp(logits - logsumexp(logits))


def _check_unclipped(values, q):
    for v in values:
        if 1.0 + (q - 1.0) * v <= 0:
            raise PreconditionError("q-exponential argument is on the clipped branch")


def weighted_average_identity_check(q_values, q):
    """``|exp_q(sum Q_i) - prod_k exp_q(Q_k / (1 + (q-1) sum_{i<k} Q_i))|``."""
    q = as_q(q)
    if q == 1.0 or math.isinf(q):
        raise UnsupportedIndexError("the weighted-average identity is checked for finite q != 1")
    vals = [float(v) for v in q_values]
    partial = [math.fsum(vals[:k]) for k in range(len(vals) + 1)]
    args = [vals[k] / (1.0 + (q - 1.0) * partial[k]) for k in range(len(vals))]
    _check_unclipped(partial[1:], q)
    _check_unclipped(args, q)
    lhs = float(q_exp(partial[-1], q))
    rhs = math.prod(float(q_exp(a, q)) for a in args)
    return abs(lhs - rhs)


def elementary_symmetric(values, j):
    """``sum_{i1 < ... < ij} v_i1 ... v_ij`` by explicit subset enumeration."""
    return math.fsum(math.prod(c) for c in itertools.combinations(values, j))


def product_expansion_defect(q_values, q, exponent=None):
    """Defect of ``(prod_j exp_q Q_j)^(q-1) = exp_q(sum Q)^(q-1) + sum_{j>=2} c_j e_j(Q)``.

    ``c_j = (q-1)**exponent(j)``; by default ``exponent(j) = j``. Passing
    ``exponent=lambda j: 2 * (j - 1)`` evaluates the competing reading,
    which agrees with the default only when ``q = 2`` or ``k <= 2``.
    """
    q = as_q(q)
    if q == 1.0 or math.isinf(q):
        raise UnsupportedIndexError("the product expansion is checked for finite q != 1")
    vals = [float(v) for v in q_values]
    if len(vals) > 6:
        raise ValueError("subset enumeration is limited to k <= 6")
    _check_unclipped(vals + [math.fsum(vals)], q)
    exponent = exponent or (lambda j: j)
    lhs = math.prod(float(q_exp(v, q)) for v in vals) ** (q - 1.0)
    terms = [float(q_exp(math.fsum(vals), q)) ** (q - 1.0)]
    terms += [(q - 1.0) ** exponent(j) * elementary_symmetric(vals, j) for j in range(2, len(vals) + 1)]
    return abs(lhs - math.fsum(terms))
