"""Regularized value iteration and its Munchausen variants.

Every solver starts from ``Q_0 = 0`` and a uniform policy, performs
synchronous backups and records one :class:`IterationTrace` row per
iteration. The policy returned alongside the final ``Q`` is the solver's
policy map applied to that ``Q``.

Solvers
-------
``run_mvi_q``       Munchausen VI with Tsallis entropy of index ``q``.
``run_mvi``         Munchausen VI with Shannon entropy (``q = 1``).
``run_tsallis_vi``  Tsallis-entropy VI, i.e. ``run_mvi_q`` without the bonus.
``run_reg_vi``      explicit regularized VI for a chosen regularizer.
``run_cvi``         conservative VI on action preferences.
``run_naive_lnq``   MVI with every ``ln`` swapped for ``ln_q`` (a baseline).

Munchausen baselines
--------------------
The bonus ``alpha * (Q - B(Q))`` uses a per-state baseline ``B``:
``tau * logsumexp(Q / tau)`` at ``q = 1`` (so that the bonus equals
``alpha * tau * ln pi`` exactly), the sparsemax expectation at ``q = 2``,
the Taylor-policy expectation for other finite ``q`` and ``max Q`` at
``q = inf``. :func:`mq_value` keeps the plain policy expectation for every
``q``, Boltzmann included.
"""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.special import logsumexp

from . import policy as pol
from .errors import DivergenceError, DomainError, PreconditionError, UnsupportedIndexError
from .mdp import initial_value
from .qmath import as_q, format_q, q_log, tsallis_entropy, tsallis_kl

TRACE_HEADER = ("iter", "residual", "q_change", "policy_tv", "entropy", "tkl", "wall_ms")


class Algorithm(str, Enum):
    REG_VI = "reg-vi"
    MVI_Q = "mvi-q"
    TSALLIS_VI = "tsallis-vi"
    MVI = "mvi"
    CVI = "cvi"
    NAIVE_LNQ = "naive-lnq"


class Regularizer(str, Enum):
    TSALLIS_ENTROPY = "tsallis-entropy"
    TSALLIS_KL_TO_PREV = "tsallis-kl-to-prev"
    SHANNON_ENTROPY = "shannon-entropy"
    KL_TO_PREV = "kl-to-prev"
    # alpha*tau*KL(pi || pi_k) - (1 - alpha)*tau*H(pi): the explicit twin of MVI
    KL_ENTROPY_TO_PREV = "kl-entropy-to-prev"


@dataclass(frozen=True)
class SolverConfig:
    """Resolved solver settings.

    ``munchausen`` picks the bonus form of ``run_mvi_q``: ``'advantage'``
    (``alpha (Q - B(Q))``) or ``'log'`` (``alpha tau ln_q pi``, floored at
    ``log_floor``). ``greedy`` picks how the Tsallis-KL step of
    ``run_reg_vi`` is solved: ``'closed_form'`` (q in {1, 2}) or
    ``'numeric'``. ``cvi_operator`` is ``'lse'`` or ``'boltzmann'``.
    """

    algorithm: Algorithm = Algorithm.MVI_Q
    q: float = 2.0
    tau: float = 0.1
    alpha: float = 0.9
    p: float = 0.5
    max_iters: int = 1000
    residual_tol: float = 1e-8
    m: int = 1
    regularizer: Regularizer = Regularizer.TSALLIS_ENTROPY
    munchausen: str = "advantage"
    log_floor: float = -1e3
    divergence_factor: float = 1e3
    early_stop: bool = True
    greedy: str = "closed_form"
    cvi_operator: str = "lse"
    record_time: bool = False
    record_history: bool = False

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        object.__setattr__(self, "regularizer", Regularizer(self.regularizer))
        object.__setattr__(self, "q", as_q(self.q))
        if not self.tau > 0:
            raise DomainError(f"tau must be > 0, got {self.tau}")
        if not (0.0 <= self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not self.p > 0:
            raise DomainError(f"p must be > 0, got {self.p}")
        for name in ("max_iters", "m"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if not self.residual_tol > 0:
            raise DomainError(f"residual_tol must be > 0, got {self.residual_tol}")
        if self.munchausen not in ("advantage", "log"):
            raise DomainError(f"munchausen must be 'advantage' or 'log', got {self.munchausen!r}")
        if self.greedy not in ("closed_form", "numeric"):
            raise DomainError(f"greedy must be 'closed_form' or 'numeric', got {self.greedy!r}")
        if self.cvi_operator not in ("lse", "boltzmann"):
            raise DomainError(f"cvi_operator must be 'lse' or 'boltzmann', got {self.cvi_operator!r}")
        if not self.divergence_factor > 0:
            raise DomainError("divergence_factor must be > 0")

    @property
    def effective_q(self) -> float:
        return 1.0 if self.algorithm in (Algorithm.MVI, Algorithm.CVI) else self.q

    @property
    def effective_alpha(self) -> float:
        return 0.0 if self.algorithm is Algorithm.TSALLIS_VI else self.alpha

    def to_dict(self):
        out = asdict(self)
        out["algorithm"] = self.algorithm.value
        out["regularizer"] = self.regularizer.value
        out["q"] = format_q(self.q)
        return out

    @classmethod
    def from_dict(cls, doc):
        known = {f for f in cls.__dataclass_fields__}
        extra = set(doc) - known
        if extra:
            raise DomainError(f"unknown config field(s): {', '.join(sorted(extra))}")
        return cls(**doc)


@dataclass
class IterationTrace:
    """Per-iteration diagnostics; every list has one entry per completed iteration.

    ``extras`` holds solver-specific series of the same length (for
    example the exact policy value recorded by the naive baseline).
    ``history`` is filled with ``(Q_k, pi_k)`` pairs only when the config
    asks for it.
    """

    iters: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    q_change: list = field(default_factory=list)
    policy_tv: list = field(default_factory=list)
    entropy: list = field(default_factory=list)
    tkl: list = field(default_factory=list)
    wall_ms: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    history: list = field(default_factory=list)
    converged: bool = False

    def __len__(self):
        return len(self.iters)

    def add(self, it, residual, q_change, policy_tv, entropy, tkl, wall_ms, **extras):
        self.iters.append(int(it))
        self.residual.append(float(residual))
        self.q_change.append(float(q_change))
        self.policy_tv.append(float(policy_tv))
        self.entropy.append(float(entropy))
        self.tkl.append(float(tkl))
        self.wall_ms.append(float(wall_ms))
        for k, v in extras.items():
            self.extras.setdefault(k, []).append(v)

    @property
    def final_residual(self) -> float:
        return self.residual[-1] if self.residual else math.inf

    def rows(self):
        return zip(self.iters, self.residual, self.q_change, self.policy_tv, self.entropy, self.tkl, self.wall_ms)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for it, *vals in self.rows():
            w.writerow([it] + [repr(float(v)) for v in vals])
        return buf.getvalue()

    def to_csv(self, path):
        from .mdp import atomic_write_text

        atomic_write_text(path, self.to_csv_text())


# --- value operators -----------------------------------------------------------


def boltzmann_value(row, tau) -> float:
    """``<softmax(Q / tau), Q>``."""
    row = np.asarray(row, dtype=float)
    return float(pol.softmax_policy(row, tau) @ row)


def lse_value(row, tau) -> float:
    """``tau * logsumexp(Q / tau)``, the soft maximum."""
    if not tau > 0:
        raise DomainError(f"tau must be > 0, got {tau}")
    return float(tau * logsumexp(np.asarray(row, dtype=float) / tau))


def mq_value(row, tau, q, p=0.5) -> float:
    """Expected value of ``row`` under the greedy policy of index ``q``.

    Boltzmann expectation at ``q = 1``, sparsemax at ``q = 2``, Taylor
    policy for other finite ``q`` and ``max`` at ``q = inf``.
    """
    row = np.asarray(row, dtype=float)
    q = as_q(q)
    if q == 1.0:
        return boltzmann_value(row, tau)
    if math.isinf(q):
        return float(np.max(row))
    return float(pol.tsallis_policy(row, q, tau, p) @ row)


def munchausen_baseline(Q, tau, q, p=0.5, pi=None):
    """Per-state baseline ``B`` of the Munchausen bonus ``alpha (Q - B(Q))``."""
    Q = np.asarray(Q, dtype=float)
    q = as_q(q)
    if q == 1.0:
        return tau * logsumexp(Q / tau, axis=1)
    if math.isinf(q):
        return Q.max(axis=1)
    if pi is None:
        pi = pol.tsallis_policy_table(Q, q, tau, p)
    return np.einsum("ij,ij->i", pi, Q)


def _diag_q(q):
    return 1.0 if math.isinf(q) else q


def _entropy_rows(pi, q):
    return tsallis_entropy(pi, _diag_q(q), validate=False)


def _lnq_floored(pi, q, floor):
    """``ln_q pi`` with the ``pi -> 0`` limit and a lower floor."""
    q = _diag_q(q)
    out = np.empty_like(pi)
    pos = pi > 0
    out[pos] = q_log(pi[pos], q)
    out[~pos] = -1.0 / (q - 1.0) if q > 1.0 else -math.inf
    return np.maximum(out, floor)


def divergence_bound(mdp, config) -> float:
    """Sup-norm bound on ``Q`` beyond which a run is declared divergent."""
    r_max = float(np.max(np.abs(mdp.reward)))
    scale = r_max + config.tau * (1.0 + math.log(mdp.n_actions))
    return config.divergence_factor * scale / (1.0 - mdp.gamma)


# --- the shared loop -------------------------------------------------------------


def _solve(mdp, config, step, final_policy, Q0=None, pi0=None, diag_q=None, always_full=False):
    """Drive ``step(Q, pi, k) -> (Q_next, pi_next, extras)`` to convergence.

    ``pi_next`` is the policy used inside the backup that produced
    ``Q_next``; the trace compares it with the previous one.
    """
    S, A = mdp.shape
    Q = np.zeros((S, A)) if Q0 is None else np.array(Q0, dtype=float)
    pi = np.full((S, A), 1.0 / A) if pi0 is None else np.array(pi0, dtype=float)
    dq = _diag_q(config.effective_q if diag_q is None else diag_q)
    bound = divergence_bound(mdp, config)
    trace = IterationTrace()
    if config.record_history:
        trace.history.append((Q.copy(), pi.copy()))
    for k in range(1, config.max_iters + 1):
        t0 = time.perf_counter() if config.record_time else 0.0
        Q_next, pi_next, extras = step(Q, pi, k)
        wall = (time.perf_counter() - t0) * 1e3 if config.record_time else 0.0
        with np.errstate(invalid="ignore", over="ignore"):
            residual = float(np.max(np.abs(Q_next - Q)))
        q_norm = float(np.max(np.abs(Q_next))) if np.all(np.isfinite(Q_next)) else math.inf
        tv = float(np.mean(pol.total_variation(pi_next, pi)))
        ent = float(np.mean(_entropy_rows(pi_next, dq)))
        kl = float(np.mean(tsallis_kl(pi_next, pi, dq, validate=False)))
        trace.add(k, residual, residual / max(1.0, q_norm), tv, ent, kl, wall, **extras)
        if config.record_history:
            trace.history.append((Q_next.copy(), pi_next.copy()))
        if not math.isfinite(q_norm) or q_norm > bound:
            raise DivergenceError(
                f"|Q| reached {q_norm:.3e} at iteration {k}, beyond the bound {bound:.3e}", trace
            )
        Q, pi = Q_next, pi_next
        if residual < config.residual_tol:
            trace.converged = True
            if config.early_stop and not always_full:
                break
        else:
            trace.converged = False
    return Q, final_policy(Q, pi), trace


def _greedy_tsallis(config, q):
    def greedy(Q):
        return pol.tsallis_policy_table(Q, q, config.tau, config.p)

    return greedy


# --- solvers ---------------------------------------------------------------------


def munchausen_split(pi_next, pi_prev, q, tau, alpha):
    """Per-state check of the Munchausen regularizer split for index ``q``.

    Evaluates ``L = <pi', alpha tau ln_q(1/pi) + tau ln_q pi'>`` and
    ``R = alpha tau D_q(pi' || pi) - (1 - alpha) tau S_q(pi') - X`` with the
    cross term ``X = alpha tau (q - 1) <pi', ln_q pi' * ln_q(1/pi)>``, on
    states where ``supp pi'`` lies inside ``supp pi``. Returns
    ``(max |L - R|, max |X|, number of states checked)``.
    """
    q = as_q(q)
    if math.isinf(q):
        raise UnsupportedIndexError("the decomposition needs a finite q")
    ok = np.all((pi_next <= 0) | (pi_prev > 0), axis=1)
    if not ok.any():
        return 0.0, 0.0, 0
    pn, pp = pi_next[ok], pi_prev[ok]
    live = pn > 0
    inv = np.zeros_like(pn)
    own = np.zeros_like(pn)
    inv[live] = q_log(1.0 / pp[live], q)
    own[live] = q_log(pn[live], q)
    lhs = np.einsum("ij,ij->i", pn, alpha * tau * inv + tau * own)
    cross = alpha * tau * (q - 1.0) * np.einsum("ij,ij->i", pn, own * inv)
    rhs = (
        alpha * tau * tsallis_kl(pn, pp, q, validate=False)
        - (1.0 - alpha) * tau * tsallis_entropy(pn, q, validate=False)
        - cross
    )
    return float(np.max(np.abs(lhs - rhs))), float(np.max(np.abs(cross))), int(ok.sum())


def run_mvi_q(mdp, config):
    """Munchausen VI with Tsallis-entropy index ``config.q``.

    ``pi_{k+1} = G_q(Q_k)`` and
    ``Q_{k+1} = r + bonus_k + gamma P <pi_{k+1}, Q_k - tau ln_q pi_{k+1}>``
    where ``bonus_k`` is ``alpha (Q_k - B(Q_k))`` (default) or
    ``alpha tau ln_q pi_{k+1}``. For finite ``q`` the trace extras carry
    ``split_defect`` and ``split_cross`` from :func:`munchausen_split`.
    """
    q, tau, alpha = config.effective_q, config.tau, config.effective_alpha
    greedy = _greedy_tsallis(config, q)
    finite = not math.isinf(q)

    def step(Q, pi, k):
        pi_next = greedy(Q)
        if finite:
            v = np.einsum("ij,ij->i", pi_next, Q) + tau * _entropy_rows(pi_next, q)
        else:
            v = Q.max(axis=1)
        Q_next = mdp.backup(v)
        if alpha > 0:
            if config.munchausen == "advantage":
                Q_next += alpha * (Q - munchausen_baseline(Q, tau, q, config.p, pi_next)[:, None])
            else:
                Q_next += alpha * tau * _lnq_floored(pi_next, q, config.log_floor) if finite else 0.0
        extras = {}
        if finite and k > 1:
            d, x, _ = munchausen_split(pi_next, pi, q, tau, alpha)
            extras = {"split_defect": d, "split_cross": x}
        elif finite:
            extras = {"split_defect": 0.0, "split_cross": 0.0}
        return Q_next, pi_next, extras

    return _solve(mdp, config, step, lambda Q, pi: greedy(Q))


def run_tsallis_vi(mdp, config):
    """Tsallis-entropy VI: ``Q_{k+1} = r + gamma P (<pi, Q> + tau S_q(pi))``.

    Runs the explicit regularized backup, so it shares no update code with
    :func:`run_mvi_q`; the two agree when ``alpha = 0``.
    """
    Q, pi, trace = run_reg_vi(mdp, replace(config, m=1), Regularizer.TSALLIS_ENTROPY)
    return Q, pi, trace


def run_mvi(mdp, config):
    """Munchausen VI with Shannon entropy.

    The bonus ``alpha tau ln pi_{k+1}`` is computed as
    ``alpha (Q_k - tau logsumexp(Q_k / tau))``; the largest gap between the
    two forms is kept in the ``munchausen_gap`` extra.
    """
    tau, alpha = config.tau, config.alpha

    def step(Q, pi, k):
        soft = tau * logsumexp(Q / tau, axis=1)
        log_pi = pol.log_softmax_table(Q, tau)
        pi_next = np.exp(log_pi)
        bonus = alpha * (Q - soft[:, None])
        gap = float(np.max(np.abs(alpha * tau * log_pi - bonus)))
        return mdp.backup(soft) + bonus, pi_next, {"munchausen_gap": gap}

    cfg = replace(config, algorithm=Algorithm.MVI)
    return _solve(mdp, cfg, step, lambda Q, pi: pol.softmax_table(Q, tau))


def cvi_parameters(alpha, tau_cvi):
    """Map ``(alpha, tau)`` of CVI to ``sigma``, ``zeta`` and the matching MVI temperature.

    ``alpha = sigma / (sigma + tau)`` and ``zeta = 1 / (sigma + tau)``; MVI
    with temperature ``1 / zeta`` and the same ``alpha`` iterates the same
    values.
    """
    if not (0.0 <= alpha < 1.0):
        raise DomainError(f"CVI needs alpha in [0, 1), got {alpha}")
    if not tau_cvi > 0:
        raise DomainError(f"tau must be > 0, got {tau_cvi}")
    sigma = alpha * tau_cvi / (1.0 - alpha)
    zeta = 1.0 / (sigma + tau_cvi)
    return {"sigma": sigma, "zeta": zeta, "tau_mvi": sigma + tau_cvi}


def run_cvi(mdp, config):
    """Conservative VI on preferences ``Psi``.

    ``Psi_{k+1} = r + gamma P L(Psi_k) + alpha (Psi_k - L(Psi_k))`` with
    ``pi_{k+1} = softmax(zeta Psi_k)``. ``L`` is ``logsumexp(zeta Psi) / zeta``
    by default, or the Boltzmann expectation when ``cvi_operator='boltzmann'``.
    ``config.tau`` is the CVI temperature; see :func:`cvi_parameters`.
    """
    zeta = cvi_parameters(config.alpha, config.tau)["zeta"]
    alpha = config.alpha
    boltz = config.cvi_operator == "boltzmann"

    def step(Psi, pi, k):
        z = zeta * Psi
        pi_next = np.exp(z - logsumexp(z, axis=1, keepdims=True))
        L = np.einsum("ij,ij->i", pi_next, Psi) if boltz else logsumexp(z, axis=1) / zeta
        return mdp.backup(L) + alpha * (Psi - L[:, None]), pi_next, {}

    def final(Psi, pi):
        z = zeta * Psi
        return np.exp(z - logsumexp(z, axis=1, keepdims=True))

    return _solve(mdp, replace(config, algorithm=Algorithm.CVI), step, final)


def run_naive_lnq(mdp, config):
    """MVI with ``ln`` replaced by ``ln_q`` everywhere.

    ``Q_{k+1} = r + alpha tau ln_q pi_{k+1} + gamma P <pi_{k+1}, Q_k - tau ln_q pi_{k+1}>``
    with ``pi_{k+1} = G_q(Q_k)``. Always runs ``max_iters`` iterations and
    stores the unregularized value of each ``pi_{k+1}`` from the initial
    distribution in the ``policy_value`` extra.
    """
    q, tau, alpha = config.q, config.tau, config.alpha
    if math.isinf(q):
        raise UnsupportedIndexError("the naive baseline needs a finite q")
    greedy = _greedy_tsallis(config, q)

    def step(Q, pi, k):
        pi_next = greedy(Q)
        v = np.einsum("ij,ij->i", pi_next, Q) + tau * _entropy_rows(pi_next, q)
        if q == 1.0:
            # tau ln pi = Q - tau lse(Q / tau); same arithmetic as MVI(q=1)
            bonus = alpha * (Q - munchausen_baseline(Q, tau, 1.0)[:, None])
            bonus = np.maximum(bonus, alpha * tau * config.log_floor)
        else:
            bonus = alpha * tau * _lnq_floored(pi_next, q, config.log_floor)
        Q_next = mdp.backup(v) + bonus
        return Q_next, pi_next, {"policy_value": initial_value(mdp, pi_next)}

    cfg = replace(config, algorithm=Algorithm.NAIVE_LNQ)
    return _solve(mdp, cfg, step, lambda Q, pi: greedy(Q), always_full=True)


def _tkl_step(config, q):
    tau = config.tau
    if config.greedy == "numeric":
        def greedy(Q, prior):
            return np.array([pol.tkl_greedy_policy(Q[s], prior[s], tau, q) for s in range(Q.shape[0])])
    elif q == 1.0:
        def greedy(Q, prior):
            return pol.kl_prior_table(Q, prior, tau)
    elif q == 2.0:
        def greedy(Q, prior):
            return pol.tkl2_table(Q, prior, tau)[0]
    else:
        raise UnsupportedIndexError("closed-form Tsallis KL steps exist only for q in {1, 2}; use greedy='numeric'")
    return greedy


def run_reg_vi(mdp, config, regularizer=None, q_init=None):
    """Explicit regularized VI ``Q_{k+1} = r + gamma P (<pi_{k+1}, Q_k> - Omega(pi_{k+1}))``.

    ``regularizer`` defaults to ``config.regularizer``:

    * ``TSALLIS_ENTROPY``: ``Omega = -tau S_q(pi)``, greedy ``G_q``.
    * ``SHANNON_ENTROPY``: ``Omega = -tau H(pi)``, softmax.
    * ``KL_TO_PREV``: ``Omega = tau KL(pi || pi_k)``, ``pi ∝ pi_k exp(Q / tau)``.
    * ``TSALLIS_KL_TO_PREV``: ``Omega = tau D_q(pi || pi_k)``.
    * ``KL_ENTROPY_TO_PREV``: ``Omega = alpha tau KL(pi || pi_k) - (1 - alpha) tau H(pi)``,
      ``pi ∝ pi_k**alpha exp(Q / tau)``.

    ``config.m > 1`` applies the evaluation backup ``m`` times per greedy
    step (modified policy iteration). ``q_init`` replaces ``Q_0 = 0``.
    """
    reg = Regularizer(regularizer if regularizer is not None else config.regularizer)
    tau, alpha, m = config.tau, config.alpha, config.m
    q = config.q
    if reg in (Regularizer.SHANNON_ENTROPY, Regularizer.KL_TO_PREV, Regularizer.KL_ENTROPY_TO_PREV):
        q = 1.0
    if reg is Regularizer.TSALLIS_KL_TO_PREV and math.isinf(q):
        raise UnsupportedIndexError("Tsallis KL needs a finite q")

    if reg in (Regularizer.TSALLIS_ENTROPY, Regularizer.SHANNON_ENTROPY):
        g = _greedy_tsallis(config, q)

        def greedy(Q, prev):
            return g(Q)

        def omega(pi, prev):
            return np.zeros(pi.shape[0]) if math.isinf(q) else -tau * _entropy_rows(pi, q)
    elif reg is Regularizer.KL_ENTROPY_TO_PREV:
        def greedy(Q, prev):
            return pol.kl_prior_table(Q, prev, tau, weight=alpha)

        def omega(pi, prev):
            return alpha * tau * tsallis_kl(pi, prev, 1.0, validate=False) - (1.0 - alpha) * tau * _entropy_rows(pi, 1.0)
    else:
        greedy = _tkl_step(config, q)

        def omega(pi, prev):
            return tau * tsallis_kl(pi, prev, q, validate=False)

    def step(Q, prev, k):
        pi_next = greedy(Q, prev)
        om = omega(pi_next, prev)
        if not np.all(np.isfinite(om)):
            raise PreconditionError("regularizer is infinite: the new policy left the previous support")
        Q_next = Q
        for _ in range(m):
            Q_next = mdp.backup(np.einsum("ij,ij->i", pi_next, Q_next) - om)
        return Q_next, pi_next, {}

    cfg = replace(config, algorithm=Algorithm.REG_VI, regularizer=reg, q=q)
    return _solve(mdp, cfg, step, lambda Q, prev: greedy(Q, prev), Q0=q_init)


SOLVERS = {
    Algorithm.MVI_Q: run_mvi_q,
    Algorithm.TSALLIS_VI: run_tsallis_vi,
    Algorithm.MVI: run_mvi,
    Algorithm.CVI: run_cvi,
    Algorithm.NAIVE_LNQ: run_naive_lnq,
    Algorithm.REG_VI: run_reg_vi,
}


def solve(mdp, config):
    """Dispatch on ``config.algorithm``."""
    return SOLVERS[config.algorithm](mdp, config)


__all__ = [
    "Algorithm",
    "Regularizer",
    "SolverConfig",
    "IterationTrace",
    "TRACE_HEADER",
    "boltzmann_value",
    "lse_value",
    "mq_value",
    "munchausen_baseline",
    "divergence_bound",
    "munchausen_split",
    "run_mvi_q",
    "run_tsallis_vi",
    "run_mvi",
    "run_cvi",
    "cvi_parameters",
    "run_naive_lnq",
    "run_reg_vi",
    "solve",
]
