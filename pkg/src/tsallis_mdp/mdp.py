"""Finite MDPs, Bellman operators and the JSON file format.

An MDP holds a transition tensor ``P[s, a, s']``, a reward table ``r[s, a]``,
a discount ``gamma`` in (0, 1) and an initial state distribution. Value
tables are plain float arrays: ``Q`` has shape ``(n_states, n_actions)``,
policies have the same shape with rows on the simplex.

Backups contract over successor states with ``np.einsum`` (no BLAS call),
so results do not depend on the BLAS thread count.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MdpParseError, MdpValidationError, SingularityError

ROW_ATOL = 1e-12
LOAD_ATOL = 1e-9
FORMAT_FIELDS = ("n_states", "n_actions", "gamma", "initial_dist", "reward", "transition")


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TabularMdp:
    """Immutable finite MDP; arrays are copied and made read-only."""

    transition: np.ndarray
    reward: np.ndarray
    gamma: float
    initial_dist: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        P, r, d = _frozen(self.transition), _frozen(self.reward), _frozen(self.initial_dist)
        object.__setattr__(self, "transition", P)
        object.__setattr__(self, "reward", r)
        object.__setattr__(self, "initial_dist", d)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "meta", dict(self.meta))
        _validate(P, r, self.gamma, d, ROW_ATOL)

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @property
    def n_actions(self) -> int:
        return self.transition.shape[1]

    @property
    def shape(self):
        return (self.n_states, self.n_actions)

    def backup(self, v, out=None):
        """``r + gamma * P v`` for a per-state value vector ``v``."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n_states,):
            raise ValueError(f"state values must have shape ({self.n_states},), got {v.shape}")
        nxt = np.einsum("ijk,k->ij", self.transition, v)
        if out is None:
            return self.reward + self.gamma * nxt
        np.multiply(nxt, self.gamma, out=out)
        out += self.reward
        return out

    def same_as(self, other) -> bool:
        """Bitwise equality of all tensors and the discount."""
        return (
            isinstance(other, TabularMdp)
            and self.gamma == other.gamma
            and np.array_equal(self.transition, other.transition)
            and np.array_equal(self.reward, other.reward)
            and np.array_equal(self.initial_dist, other.initial_dist)
        )


def _validate(P, r, gamma, d, atol):
    if P.ndim != 3 or P.shape[0] != P.shape[2] or P.shape[0] < 1 or P.shape[1] < 1:
        raise MdpValidationError(f"transition must have shape (S, A, S), got {P.shape}")
    S, A = P.shape[:2]
    if r.shape != (S, A):
        raise MdpValidationError(f"reward must have shape ({S}, {A}), got {r.shape}")
    if d.shape != (S,):
        raise MdpValidationError(f"initial_dist must have shape ({S},), got {d.shape}")
    if not (0.0 < gamma < 1.0):
        raise MdpValidationError(f"gamma must lie in (0, 1), got {gamma}")
    if not np.all(np.isfinite(r)):
        s, a = np.argwhere(~np.isfinite(r))[0]
        raise MdpValidationError(f"reward[{s}][{a}] is not finite")
    bad = ~np.isfinite(P) | (P < 0)
    if bad.any():
        s, a, t = np.argwhere(bad)[0]
        raise MdpValidationError(f"transition[{s}][{a}][{t}] must be a finite nonnegative probability")
    err = np.abs(P.sum(axis=2) - 1.0)
    if np.any(err > atol):
        s, a = np.unravel_index(np.argmax(err), err.shape)
        raise MdpValidationError(
            f"transition row for state {s}, action {a} sums to {P[s, a].sum():.12g}, not 1"
        )
    if not np.all(np.isfinite(d)) or np.any(d < 0) or abs(d.sum() - 1.0) > atol:
        raise MdpValidationError("initial_dist must be a probability vector")


def _check_table(mdp, Q, name="Q"):
    Q = np.asarray(Q, dtype=float)
    if Q.shape != mdp.shape:
        raise ValueError(f"{name} must have shape {mdp.shape}, got {Q.shape}")
    return Q


def _check_omega(mdp, omega):
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (mdp.n_states,):
        raise ValueError(f"omega_per_state must have length {mdp.n_states}, got shape {omega.shape}")
    return omega


def bellman_expectation(mdp, Q, pi, out=None):
    """``T_pi Q = r + gamma P <pi, Q>``."""
    Q, pi = _check_table(mdp, Q), _check_table(mdp, pi, "pi")
    return mdp.backup(np.einsum("ij,ij->i", pi, Q), out=out)


def bellman_optimality(mdp, Q, out=None):
    """``T* Q = r + gamma P max_a Q``."""
    Q = _check_table(mdp, Q)
    return mdp.backup(Q.max(axis=1), out=out)


def regularized_backup(mdp, Q, pi, omega_per_state, out=None):
    """``r + gamma P (<pi, Q> - Omega)`` with the regularizer given per state."""
    Q, pi = _check_table(mdp, Q), _check_table(mdp, pi, "pi")
    omega = _check_omega(mdp, omega_per_state)
    return mdp.backup(np.einsum("ij,ij->i", pi, Q) - omega, out=out)


def exact_policy_value(mdp, pi, omega_per_state=None):
    """Regularized action values of a fixed policy, by one dense solve.

    Solves ``(I - gamma P_pi) V = r_pi - Omega`` over states, then returns
    ``Q = r + gamma P V``.
    """
    pi = _check_table(mdp, pi, "pi")
    omega = np.zeros(mdp.n_states) if omega_per_state is None else _check_omega(mdp, omega_per_state)
    P_pi = np.einsum("ij,ijk->ik", pi, mdp.transition)
    r_pi = np.einsum("ij,ij->i", pi, mdp.reward)
    A = np.eye(mdp.n_states) - mdp.gamma * P_pi
    try:
        V = np.linalg.solve(A, r_pi - omega)
    except np.linalg.LinAlgError as exc:
        raise SingularityError(f"policy evaluation system is singular: {exc}") from None
    if not np.all(np.isfinite(V)):
        raise SingularityError("policy evaluation produced non-finite values")
    return mdp.backup(V)


def policy_state_values(mdp, pi, omega_per_state=None):
    pi = _check_table(mdp, pi, "pi")
    return np.einsum("ij,ij->i", pi, exact_policy_value(mdp, pi, omega_per_state))


def initial_value(mdp, pi):
    """Unregularized return of ``pi`` from the initial distribution."""
    return float(mdp.initial_dist @ policy_state_values(mdp, pi))


# --- file format --------------------------------------------------------------


def mdp_to_dict(mdp):
    return {
        "n_states": mdp.n_states,
        "n_actions": mdp.n_actions,
        "gamma": mdp.gamma,
        "initial_dist": mdp.initial_dist.tolist(),
        "reward": mdp.reward.tolist(),
        "transition": mdp.transition.tolist(),
        "meta": mdp.meta,
    }


def mdp_to_json(mdp) -> str:
    # json writes floats with repr, which round-trips exactly
    return json.dumps(mdp_to_dict(mdp), separators=(",", ":"), sort_keys=True) + "\n"


def atomic_write_text(path, text):
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def mdp_to_file(mdp, path):
    atomic_write_text(path, mdp_to_json(mdp))


def _numeric_array(doc, name, shape):
    try:
        arr = np.array(doc[name], dtype=float)
    except (TypeError, ValueError):
        raise MdpParseError(f"field '{name}' must be a numeric array") from None
    if arr.shape != shape:
        raise MdpParseError(f"field '{name}' must have shape {shape}, got {arr.shape}")
    return arr


def _positive_int(doc, name):
    v = doc[name]
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise MdpParseError(f"field '{name}' must be a positive integer, got {v!r}")
    return v


def _normalize_rows(arr, label):
    """Reject rows off by more than the load tolerance; renormalize small drift."""
    sums = arr.sum(axis=-1)
    err = np.abs(sums - 1.0)
    if np.any(err > LOAD_ATOL):
        idx = np.unravel_index(np.argmax(err), err.shape)
        where = ", ".join(f"{n} {i}" for n, i in zip(("state", "action"), idx))
        where = f" for {where}" if where else ""
        raise MdpValidationError(f"{label}{where} sums to {float(sums[idx]):.12g}, not 1 (tolerance {LOAD_ATOL})")
    drift = err > ROW_ATOL
    if np.any(drift):
        arr = arr.copy()
        arr[drift] = arr[drift] / sums[drift][..., None]
    return arr


def mdp_from_dict(doc):
    if not isinstance(doc, dict):
        raise MdpParseError("MDP document must be a JSON object")
    missing = [f for f in FORMAT_FIELDS if f not in doc]
    if missing:
        raise MdpParseError(f"missing field(s): {', '.join(missing)}")
    S, A = _positive_int(doc, "n_states"), _positive_int(doc, "n_actions")
    gamma = doc["gamma"]
    if isinstance(gamma, bool) or not isinstance(gamma, (int, float)):
        raise MdpParseError(f"field 'gamma' must be a number, got {gamma!r}")
    P = _numeric_array(doc, "transition", (S, A, S))
    r = _numeric_array(doc, "reward", (S, A))
    d = _numeric_array(doc, "initial_dist", (S,))
    if np.any(P < 0):
        s, a, t = np.argwhere(P < 0)[0]
        raise MdpValidationError(f"transition[{s}][{a}][{t}] is negative")
    P = _normalize_rows(P, "transition row")
    d = _normalize_rows(d, "initial_dist")
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise MdpParseError("field 'meta' must be an object")
    return TabularMdp(P, r, float(gamma), d, meta)


def mdp_from_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MdpParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return mdp_from_dict(doc)


def mdp_from_file(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MdpParseError(f"cannot read MDP file {path}: {exc.strerror}") from None
    try:
        return mdp_from_json(text)
    except MdpParseError as exc:
        raise MdpParseError(f"{path}: {exc}") from None


def content_hash(data) -> str:
    """Git blob id (SHA-1 of ``'blob <len>\\0' + bytes``) of a file or byte string."""
    if isinstance(data, (str, os.PathLike)) and not isinstance(data, bytes):
        data = Path(data).read_bytes()
    h = hashlib.sha1(b"blob %d\x00" % len(data))
    h.update(data)
    return h.hexdigest()


def mdp_hash(mdp) -> str:
    """Hash of the canonical serialization, equal to ``content_hash`` of a written file."""
    return content_hash(mdp_to_json(mdp).encode("utf-8"))


def geometric_bound(mdp) -> float:
    """``max |r| / (1 - gamma)``, the sup-norm bound of any unregularized value."""
    return float(np.max(np.abs(mdp.reward))) / (1.0 - mdp.gamma) if mdp.reward.size else 0.0


__all__ = [
    "TabularMdp",
    "bellman_expectation",
    "bellman_optimality",
    "regularized_backup",
    "exact_policy_value",
    "policy_state_values",
    "initial_value",
    "mdp_to_dict",
    "mdp_to_json",
    "mdp_to_file",
    "mdp_from_dict",
    "mdp_from_json",
    "mdp_from_file",
    "content_hash",
    "mdp_hash",
    "atomic_write_text",
    "geometric_bound",
]
