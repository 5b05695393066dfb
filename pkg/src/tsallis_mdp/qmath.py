"""Deformed logarithm calculus.

The q-logarithm ``ln_q x = (x**(q-1) - 1) / (q-1)`` and its inverse, the
q-exponential ``exp_q x = [1 + (q-1) x]_+ ** (1/(q-1))``, with ``q = 1``
mapped to ``ln``/``exp`` exactly. On top of them sit the Tsallis entropy
``S_q(p) = -<p, ln_q p>`` and the Tsallis KL divergence
``D_q(p || m) = <p, ln_q(p/m)>``.

Entropic indices are plain floats (``math.inf`` for the unregularized
limit); :class:`EntropicIndex` parses and classifies them.

All functions are pure and operate elementwise or along the last axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError, UnsupportedIndexError

PROB_ATOL = 1e-12


@dataclass(frozen=True)
class EntropicIndex:
    """Deformation parameter ``q`` in ``(0, inf]``."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v <= 0:
            raise DomainError(f"entropic index must satisfy q > 0, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, text) -> "EntropicIndex":
        if isinstance(text, EntropicIndex):
            return text
        if isinstance(text, str):
            t = text.strip().lower()
            if t in ("inf", "infinity", "+inf", "∞"):
                return cls(math.inf)
            try:
                return cls(float(t))
            except ValueError:
                raise DomainError(f"cannot parse entropic index {text!r}") from None
        return cls(float(text))

    @property
    def kind(self) -> str:
        """Most specific class: ``'one'``, ``'two'``, ``'infinity'`` or ``'finite'``."""
        if self.value == 1.0:
            return "one"
        if self.value == 2.0:
            return "two"
        if math.isinf(self.value):
            return "infinity"
        return "finite"

    @property
    def is_finite(self) -> bool:
        return not math.isinf(self.value)

    def __float__(self):
        return self.value

    def __str__(self):
        return format_q(self.value)


def as_q(q) -> float:
    """Validate an entropic index and return it as a float."""
    return EntropicIndex.parse(q).value


def format_q(q) -> str:
    """Canonical text form: ``1``, ``2.5``, ``inf``."""
    q = float(q)
    if math.isinf(q):
        return "inf"
    if q == int(q):
        return str(int(q))
    return repr(q)


def _finite_q(q) -> float:
    q = as_q(q)
    if math.isinf(q):
        raise UnsupportedIndexError("q = inf has no q-logarithm; it only denotes the greedy limit")
    return q


def q_log(x, q):
    """q-logarithm of ``x > 0``."""
    q = _finite_q(q)
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("q_log requires x > 0")
    if q == 1.0:
        out = np.log(x)
    elif q == 2.0:
        out = x - 1.0
    else:
        # expm1 keeps accuracy for q near 1
        out = np.expm1((q - 1.0) * np.log(x)) / (q - 1.0)
    return out[()] if out.ndim == 0 else out


def q_exp(x, q):
    """q-exponential; returns 0 where ``1 + (q-1) x <= 0``."""
    q = _finite_q(q)
    x = np.asarray(x, dtype=float)
    if q == 1.0:
        out = np.exp(x)
    elif q == 2.0:
        out = np.maximum(1.0 + x, 0.0)
    else:
        base = 1.0 + (q - 1.0) * x
        pos = base > 0
        out = np.zeros_like(base)
        out[pos] = np.exp(np.log(base[pos]) / (q - 1.0))
    return out[()] if out.ndim == 0 else out


def check_prob(p, name="p", atol=PROB_ATOL):
    """Return ``p`` as a float array after checking every last-axis row is a distribution."""
    p = np.asarray(p, dtype=float)
    if p.ndim == 0 or p.shape[-1] == 0:
        raise DomainError(f"{name} must be a nonempty probability vector")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise DomainError(f"{name} must have finite nonnegative entries")
    err = np.max(np.abs(p.sum(axis=-1) - 1.0))
    if err > atol:
        raise DomainError(f"{name} must sum to 1 (off by {err:.3e})")
    return p


def _xlogq(p, q):
    """``p * ln_q p`` with ``0 * ln_q 0 = 0``."""
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * q_log(p[pos], q)
    return out


def tsallis_entropy(p, q, *, validate=True):
    """Tsallis entropy ``-sum_a p(a) ln_q p(a)`` along the last axis."""
    q = _finite_q(q)
    p = check_prob(p) if validate else np.asarray(p, dtype=float)
    out = -_xlogq(p, q).sum(axis=-1)
    return out[()] if np.ndim(out) == 0 else out


def tsallis_kl(p, m, q, *, validate=True):
    """Tsallis KL divergence ``sum_a p(a) ln_q(p(a)/m(a))`` along the last axis.

    ``0 ln_q(0/m) = 0`` and ``p ln_q(p/0) = inf`` for ``p > 0``.
    """
    q = _finite_q(q)
    if validate:
        p, m = check_prob(p, "p"), check_prob(m, "m")
    else:
        p, m = np.asarray(p, dtype=float), np.asarray(m, dtype=float)
    p, m = np.broadcast_arrays(p, m)
    terms = np.zeros(p.shape)
    pos = p > 0
    live = pos & (m > 0)
    terms[live] = p[live] * q_log(p[live] / m[live], q)
    terms[pos & ~(m > 0)] = np.inf
    out = terms.sum(axis=-1)
    return out[()] if np.ndim(out) == 0 else out


def max_tsallis_entropy(n_actions, q):
    """Upper bound ``-ln_q(1/n)`` attained by the uniform distribution."""
    return float(-q_log(1.0 / n_actions, q))


def pseudo_additivity_defect(a, b, q):
    """``ln_q(ab) - [ln_q a + ln_q b + (q-1) ln_q a ln_q b]``; zero up to rounding."""
    q = _finite_q(q)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(~(a > 0)) or np.any(~(b > 0)):
        raise DomainError("pseudo-additivity needs a > 0 and b > 0")
    la, lb = q_log(a, q), q_log(b, q)
    return q_log(a * b, q) - (la + lb + (q - 1.0) * la * lb)


def two_point_identity_defect(x, y, q):
    """``(exp_q x exp_q y)^(q-1) - [exp_q(x+y)^(q-1) + (q-1)^2 x y]`` on the unclipped branch."""
    q = _finite_q(q)
    if q == 1.0:
        raise UnsupportedIndexError("the two-point identity is stated for q != 1")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for arg in (x, y, x + y):
        if np.any(1.0 + (q - 1.0) * arg <= 0):
            raise PreconditionError("q-exponential argument is on the clipped branch")
    lhs = (q_exp(x, q) * q_exp(y, q)) ** (q - 1.0)
    rhs = q_exp(x + y, q) ** (q - 1.0) + (q - 1.0) ** 2 * x * y
    return lhs - rhs
