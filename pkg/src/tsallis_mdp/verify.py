"""Executable checks behind the ``verify`` command and the acceptance tests.

Each ``check_*`` function returns a :class:`CheckResult`. On failure the
``detail`` names the violated property and the worst input found.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from . import oracles
from . import policy as pol
from .envs import random_mdp
from .mdp import bellman_optimality
from .qmath import (
    max_tsallis_entropy,
    pseudo_additivity_defect,
    q_exp,
    q_log,
    tsallis_entropy,
    tsallis_kl,
    two_point_identity_defect,
)
from .solvers import (
    Regularizer,
    SolverConfig,
    cvi_parameters,
    munchausen_baseline,
    run_cvi,
    run_mvi,
    run_mvi_q,
    run_reg_vi,
    run_tsallis_vi,
)

IDENTITY_TOL = 1e-10
SPARSEMAX_TOL = 1e-8
AVERAGING_TOL = 1e-8
ALGEBRA_TOL = 1e-9
REDUCTION_TOL = 1e-10
GENVALUE_TOL = 1e-8
SPLIT_TOL = 1e-10

# tau for the Tsallis-KL batch; larger values slow the shrinkage of the support
TKL_BATCH_TAU = 0.1


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _rel(defect, scale):
    return np.abs(defect) / np.maximum(1.0, np.abs(scale))


def _random_q(rng, n, lo=0.05, hi=5.0):
    q = rng.uniform(lo, hi, n)
    # make sure the exact branches are exercised too
    q[::10] = 1.0
    q[5::10] = 2.0
    return q


def _random_simplex(rng, n, k, sparsity=0.0):
    p = -np.log1p(-rng.random((n, k)))
    if sparsity:
        p[rng.random((n, k)) < sparsity] = 0.0
        p[np.arange(n), rng.integers(0, k, n)] += 1.0
    return p / p.sum(axis=1, keepdims=True)


@_timed
def check_qmath_identities(cases=1000, seed=0):
    """Inverse pair, pseudo-additivity, two-point property, KL conditions and entropy bounds."""
    rng = np.random.default_rng(seed)
    worst = {}

    # below x = 0.1 the round trip at large q loses digits to conditioning, not to the code
    x = rng.uniform(0.1, 10.0, cases)
    q = _random_q(rng, cases)
    worst["exp(log x) = x"] = float(np.max(_rel(np.array([q_exp(q_log(a, b), b) for a, b in zip(x, q)]) - x, x)))
    y = rng.uniform(-2.0, 2.0, cases)
    q2 = _random_q(rng, cases)
    ok = 1.0 + (q2 - 1.0) * y > 1e-3
    back = np.array([q_log(q_exp(a, b), b) if keep else a for a, b, keep in zip(y, q2, ok)])
    worst["log(exp y) = y"] = float(np.max(_rel(back - y, y)))

    a, b = rng.uniform(1e-3, 10.0, cases), rng.uniform(1e-3, 10.0, cases)
    q3 = _random_q(rng, cases)
    d = np.array([pseudo_additivity_defect(u, v, w) for u, v, w in zip(a, b, q3)])
    scale = np.array([q_log(u * v, w) for u, v, w in zip(a, b, q3)])
    worst["pseudo-additivity"] = float(np.max(_rel(d, scale)))

    tp = []
    while len(tp) < cases:
        qq = rng.uniform(0.05, 5.0)
        if qq == 1.0:
            continue
        u, v = rng.uniform(-1.0, 1.0, 2)
        if min(1 + (qq - 1) * u, 1 + (qq - 1) * v, 1 + (qq - 1) * (u + v)) <= 1e-2:
            continue
        lhs = (q_exp(u, qq) * q_exp(v, qq)) ** (qq - 1.0)
        tp.append(float(_rel(two_point_identity_defect(u, v, qq), lhs)))
    worst["two-point property"] = max(tp)

    k = rng.integers(2, 9, cases)
    kl_neg, kl_zero, ent = 0.0, 0.0, 0.0
    q4 = _random_q(rng, cases)
    for n, qq in zip(k, q4):
        p = _random_simplex(rng, 1, n, sparsity=0.3)[0]
        m = _random_simplex(rng, 1, n)[0]
        kl_neg = max(kl_neg, -float(tsallis_kl(p, m, qq)))
        kl_zero = max(kl_zero, abs(float(tsallis_kl(p, p, qq))))
        s = float(tsallis_entropy(p, qq))
        ent = max(ent, -s, s - max_tsallis_entropy(n, qq))
    worst["Tsallis KL >= 0"] = max(kl_neg, 0.0)
    worst["Tsallis KL(p, p) = 0"] = kl_zero
    worst["0 <= S_q <= -ln_q(1/n)"] = max(ent, 0.0)

    bad = {k: v for k, v in worst.items() if not v < IDENTITY_TOL}
    detail = "; ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return CheckResult("qmath identities", not bad, detail if not bad else f"violated: {bad}")


BOUNDARY_ROWS = (
    # 1 + i z_(i) equals the running sum at the last rank: strict and non-strict disagree
    (np.array([1.0, 0.0]), 0.5),
    (np.array([2.0, 1.0, 0.0]), 0.5),
    (np.array([0.0, 0.0, -2.0]), 0.5),
)


@_timed
def check_sparsemax_oracles(cases=500, seed=0, strict=True):
    """Closed form vs support enumeration vs simplex optimizer.

    ``strict=False`` flips the support inequality of the closed form and
    must make this check fail (fault injection).
    """
    rng = np.random.default_rng(seed)
    taus = (0.1, 1.0, 10.0)
    rows = [(rng.uniform(-5.0, 5.0, rng.integers(1, 9)), taus[i % 3]) for i in range(cases)]
    rows += list(BOUNDARY_ROWS)
    worst_p, worst_opt = 0.0, 0.0
    for row, tau in rows:
        res = pol.sparsemax_policy(row, tau, strict=strict)
        enum = oracles.sparsemax_by_enumeration(row, tau)
        f = lambda x, row=row, tau=tau: float(x @ row + tau * (1.0 - x @ x))  # noqa: E731
        g = lambda x, row=row, tau=tau: row - 2.0 * tau * x  # noqa: E731
        opt = oracles.simplex_maximize(f, g, row.size)
        supp = sorted(res.support.indices)
        if supp != sorted(np.flatnonzero(enum > 0).tolist()):
            return CheckResult(
                "sparsemax oracles", False, f"support mismatch vs enumeration for Q={row.tolist()}, tau={tau}: {supp}"
            )
        if not opt.converged or supp != sorted(np.flatnonzero(opt.argmax > SPARSEMAX_TOL).tolist()):
            return CheckResult(
                "sparsemax oracles", False, f"optimizer disagrees on support for Q={row.tolist()}, tau={tau}"
            )
        worst_p = max(worst_p, float(np.max(np.abs(res.pi - enum))))
        worst_opt = max(worst_opt, float(np.max(np.abs(res.pi - opt.argmax))))
    ok = worst_p < SPARSEMAX_TOL and worst_opt < SPARSEMAX_TOL
    return CheckResult(
        "sparsemax oracles",
        ok,
        f"{len(rows)} rows; max |closed - enumeration| {worst_p:.1e}; max |closed - optimizer| {worst_opt:.1e}",
    )


@_timed
def check_kl_averaging(seed=0, k=10, tau=0.5):
    """KL-to-previous VI keeps ``pi_k ∝ exp(sum_{j<k} Q_j / tau)``."""
    mdp = random_mdp(seed, n_states=4, n_actions=3)
    cfg = SolverConfig(tau=tau, max_iters=k, early_stop=False, record_history=True)
    _, _, trace = run_reg_vi(mdp, cfg, Regularizer.KL_TO_PREV)
    qs = [h[0] for h in trace.history]
    worst = 0.0
    for j in range(1, len(trace.history)):
        pi_j = trace.history[j][1]
        for s in range(mdp.n_states):
            ref = oracles.kl_average_policy(qs[:j], tau, s)
            worst = max(worst, float(pol.total_variation(pi_j[s], ref)))
    return CheckResult(
        "KL averaging", worst < AVERAGING_TOL, f"{k} iterations on 4x3 MDP (seed {seed}); max TV {worst:.1e}"
    )


@_timed
def check_history_identities(cases=1000, seed=0):
    """Product expansion and weighted-average identity on scalars."""
    rng = np.random.default_rng(seed)
    exp_worst, alt_worst, avg_worst = 0.0, 0.0, 0.0
    for _ in range(cases):
        k = int(rng.integers(1, 7))
        q = float(rng.uniform(0.2, 2.8))
        if q == 1.0:
            continue
        # |sum| <= 0.5 keeps every q-exponential on the unclipped branch
        vals = rng.uniform(-0.5, 0.5, k) / k
        lhs = math.prod(float(q_exp(v, q)) for v in vals) ** (q - 1.0)
        exp_worst = max(exp_worst, oracles.product_expansion_defect(vals, q) / max(1.0, lhs))
        alt_worst = max(
            alt_worst, oracles.product_expansion_defect(vals, q, exponent=lambda j: 2 * (j - 1)) / max(1.0, lhs)
        )
    for _ in range(cases):
        k = int(rng.integers(1, 6))
        q = float(rng.uniform(1.0, 3.0))
        if q == 1.0:
            continue
        vals = rng.uniform(0.0, 0.5, k)
        avg_worst = max(avg_worst, oracles.weighted_average_identity_check(vals, q))
    ok = exp_worst < ALGEBRA_TOL and avg_worst < ALGEBRA_TOL
    return CheckResult(
        "product expansion and weighted average",
        ok,
        f"expansion {exp_worst:.1e} (2(j-1) reading: {alt_worst:.1e}); weighted average {avg_worst:.1e}",
    )


def _tail_nonincreasing(res, frac=0.1):
    n = len(res)
    tail = res[n - max(2, int(math.ceil(frac * n))):]
    return all(b <= a for a, b in zip(tail, tail[1:]))


@_timed
def check_tkl_convergence(n_mdps=20, seed=0, tau=TKL_BATCH_TAU, max_iters=2000):
    """Tsallis-KL (q = 2) regularized VI converges on random 10x4 MDPs."""
    worst_iters, failures = 0, []
    cfg = SolverConfig(q=2.0, tau=tau, max_iters=max_iters, regularizer=Regularizer.TSALLIS_KL_TO_PREV)
    for i in range(n_mdps):
        mdp = random_mdp(seed + i, n_states=10, n_actions=4, gamma=0.9)
        _, _, trace = run_reg_vi(mdp, cfg)
        worst_iters = max(worst_iters, len(trace))
        if not trace.converged:
            failures.append(f"seed {seed + i}: residual {trace.final_residual:.1e} after {len(trace)} iterations")
        elif not _tail_nonincreasing(trace.residual):
            failures.append(f"seed {seed + i}: residual tail increases")
    if failures:
        return CheckResult("Tsallis-KL convergence", False, "; ".join(failures))
    return CheckResult(
        "Tsallis-KL convergence", True, f"{n_mdps} MDPs, tau={tau}: all below 1e-8, max {worst_iters} iterations"
    )


def advantage_learning(mdp, alpha, max_iters=5000, tol=1e-8):
    """Reference advantage learning ``Q <- T*Q + alpha (Q - max Q)``."""
    Q = np.zeros(mdp.shape)
    for _ in range(max_iters):
        nxt = bellman_optimality(mdp, Q) + alpha * (Q - Q.max(axis=1, keepdims=True))
        done = np.max(np.abs(nxt - Q)) < tol
        Q = nxt
        if done:
            break
    return Q


@_timed
def check_reductions(n_mdps=20, seed=0, tau=0.1, alpha=0.9):
    """q = 1, alpha = 0, q = inf and CVI reductions plus the Munchausen identity."""
    worst = {"MVI(q=1) vs MVI": 0.0, "alpha=0 vs Tsallis-VI": 0.0, "q=inf vs advantage learning": 0.0,
             "CVI vs MVI": 0.0, "alpha tau ln pi vs alpha (Q - tau lse)": 0.0}
    boltz_gap = 0.0
    base = SolverConfig(tau=tau, alpha=alpha, max_iters=5000)
    for i in range(n_mdps):
        mdp = random_mdp(seed + i, n_states=10, n_actions=4)
        Qa, pa, _ = run_mvi_q(mdp, replace(base, q=1.0))
        Qb, pb, tb = run_mvi(mdp, base)
        worst["MVI(q=1) vs MVI"] = max(worst["MVI(q=1) vs MVI"], float(np.max(np.abs(Qa - Qb))), float(np.max(np.abs(pa - pb))))
        worst["alpha tau ln pi vs alpha (Q - tau lse)"] = max(
            worst["alpha tau ln pi vs alpha (Q - tau lse)"], max(tb.extras["munchausen_gap"])
        )
        # the Boltzmann expectation misses the log-sum-exp by exactly tau H(pi)
        soft = munchausen_baseline(Qb, tau, 1.0)
        boltz = np.einsum("ij,ij->i", pb, Qb)
        boltz_gap = max(boltz_gap, float(np.max(np.abs(alpha * (soft - boltz) - alpha * tau * tsallis_entropy(pb, 1.0)))))
        for q in (2.0, 3.0, 1.5, math.inf):
            cfg = replace(base, q=q, alpha=0.0)
            Qm, pm, _ = run_mvi_q(mdp, cfg)
            Qt, pt, _ = run_tsallis_vi(mdp, cfg)
            worst["alpha=0 vs Tsallis-VI"] = max(worst["alpha=0 vs Tsallis-VI"], float(np.max(np.abs(Qm - Qt))))
        Qi, _, _ = run_mvi_q(mdp, replace(base, q=math.inf))
        Qal = advantage_learning(mdp, alpha, tol=base.residual_tol)
        worst["q=inf vs advantage learning"] = max(worst["q=inf vs advantage learning"], float(np.max(np.abs(Qi - Qal))))
        cvi_alpha = 0.5
        par = cvi_parameters(cvi_alpha, tau)
        Qc, pc, _ = run_cvi(mdp, replace(base, alpha=cvi_alpha))
        Qm, pm, _ = run_mvi(mdp, replace(base, alpha=cvi_alpha, tau=par["tau_mvi"]))
        worst["CVI vs MVI"] = max(worst["CVI vs MVI"], float(np.max(np.abs(Qc - Qm))), float(np.max(np.abs(pc - pm))))
    bad = {k: v for k, v in worst.items() if not v < REDUCTION_TOL}
    detail = "; ".join(f"{k} {v:.1e}" for k, v in worst.items())
    detail += f"; Boltzmann baseline offset minus alpha tau H(pi) {boltz_gap:.1e}"
    return CheckResult("solver reductions", not bad, detail if not bad else f"violated: {bad}")


@_timed
def check_decomposition(n_mdps=10, seed=0, tau=0.1, alpha=0.9, iters=200):
    """Generalized-value recursion at q = 1 and the q = 2 split with its cross term."""
    genval, split, cross, checked = 0.0, 0.0, 0.0, 0
    for i in range(n_mdps):
        mdp = random_mdp(seed + i, n_states=10, n_actions=4)
        cfg = SolverConfig(tau=tau, alpha=alpha, max_iters=iters, early_stop=False, record_history=True)
        _, _, tm = run_mvi(mdp, cfg)
        q0 = np.full(mdp.shape, alpha * tau * math.log(mdp.n_actions))
        _, _, tr = run_reg_vi(mdp, cfg, Regularizer.KL_ENTROPY_TO_PREV, q_init=q0)
        for (Qk, pk), (Rk, rk) in zip(tm.history[1:], tr.history[1:]):
            genval = max(genval, float(np.max(np.abs(Qk - alpha * tau * np.log(pk) - Rk))), float(np.max(np.abs(pk - rk))))
        _, _, t2 = run_mvi_q(mdp, replace(cfg, q=2.0, record_history=False))
        split = max(split, max(t2.extras["split_defect"]))
        cross = max(cross, max(t2.extras["split_cross"]))
        checked += len(t2)
    ok = genval < GENVALUE_TOL and split < SPLIT_TOL
    return CheckResult(
        "generalized-value decompositions",
        ok,
        f"q=1 recursion {genval:.1e}; q=2 split with cross term {split:.1e}; "
        f"largest omitted cross term {cross:.3e} over {checked} iterations",
    )


CHECKS = (
    ("qmath", check_qmath_identities),
    ("sparsemax", check_sparsemax_oracles),
    ("averaging", check_kl_averaging),
    ("history", check_history_identities),
    ("tkl_convergence", check_tkl_convergence),
    ("reductions", check_reductions),
    ("decomposition", check_decomposition),
)


def run_all(seed=0, cases=None, inject_fault=False):
    """Run every check; ``cases`` scales the randomized suites (default sizes otherwise)."""
    results = []
    for key, fn in CHECKS:
        kwargs = {"seed": seed}
        if key in ("qmath", "history"):
            kwargs["cases"] = cases or 1000
        elif key == "sparsemax":
            kwargs["cases"] = cases or 500
            kwargs["strict"] = not inject_fault
        results.append(fn(**kwargs))
    return results


__all__ = [
    "CheckResult",
    "check_qmath_identities",
    "check_sparsemax_oracles",
    "check_kl_averaging",
    "check_history_identities",
    "check_tkl_convergence",
    "check_reductions",
    "check_decomposition",
    "advantage_learning",
    "run_all",
]
