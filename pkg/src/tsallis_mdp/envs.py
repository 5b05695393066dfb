"""Seeded generators for small benchmark MDPs.

All randomness comes from numpy's PCG64 bit generator through
``Generator.random()``, which maps each 64-bit output ``x`` to
``(x >> 11) * 2**-53``. Successor sets and Dirichlet weights are built here
from those uniforms (partial Fisher-Yates shuffle, normalized ``-log u``),
so the byte stream of a generated MDP depends only on PCG64 itself.

Grid layouts use row 0 at the top; state ``y * width + x``; actions
0 = up, 1 = right, 2 = down, 3 = left.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .mdp import TabularMdp

MOVES = ((0, -1), (1, 0), (0, 1), (-1, 0))
LATERAL = {0: (1, 3), 1: (0, 2), 2: (1, 3), 3: (0, 2)}
CLIFF_PENALTY = -100.0
GOAL_REWARD = 1.0


class EnvKind(str, Enum):
    CHAIN = "chain"
    GRIDWORLD = "gridworld"
    CLIFF = "cliff"
    RANDOM = "random"


@dataclass(frozen=True)
class EnvSpec:
    """Everything a generator needs; unused size fields are ignored."""

    kind: EnvKind = EnvKind.CHAIN
    length: int = 5
    width: int = 4
    height: int = 3
    n_states: int = 10
    n_actions: int = 4
    branching: int = 3
    noise: float = 0.0
    gamma: float = 0.9
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", EnvKind(self.kind))
        for name in ("length", "width", "height", "n_states", "n_actions", "branching"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if not (0.0 <= self.noise <= 1.0):
            raise DomainError(f"noise must lie in [0, 1], got {self.noise}")
        if not (0.0 < self.gamma < 1.0):
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not (0 <= int(self.seed) < 2**64):
            raise DomainError("seed must be a 64-bit unsigned integer")

    def to_meta(self):
        out = asdict(self)
        out["kind"] = self.kind.value
        return out


def rng_for(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def _meta(spec, name):
    return {"generator": name, "seed": int(spec.seed), "spec": spec.to_meta()}


def make_chain(spec: EnvSpec) -> TabularMdp:
    """Chain of ``length`` states; start left, absorbing goal at the right end.

    Actions: 0 = left, 1 = right. With probability ``noise`` the opposite
    move happens. Every step spent in the goal pays 1.
    """
    n = spec.length
    if n < 2:
        raise DomainError("chain length must be at least 2")
    goal = n - 1
    P = np.zeros((n, 2, n))
    for s in range(n):
        for a in range(2):
            if s == goal:
                P[s, a, s] = 1.0
                continue
            for move, prob in ((a, 1.0 - spec.noise), (1 - a, spec.noise)):
                t = min(max(s + (1 if move == 1 else -1), 0), n - 1)
                P[s, a, t] += prob
    r = np.zeros((n, 2))
    r[goal, :] = 1.0
    d = np.zeros(n)
    d[0] = 1.0
    return TabularMdp(P, r, spec.gamma, d, _meta(spec, "chain"))


def _grid(spec, cliff: bool) -> TabularMdp:
    W, H = spec.width, spec.height
    if W < 2 or H < 2:
        raise DomainError("grid width and height must be at least 2")
    if cliff and W < 3:
        raise DomainError("the cliff layout needs width >= 3")
    S = W * H
    idx = lambda x, y: y * W + x  # noqa: E731
    if cliff:
        start, goal = idx(0, H - 1), idx(W - 1, H - 1)
        pit = {idx(x, H - 1) for x in range(1, W - 1)}
    else:
        start, goal = idx(0, 0), idx(W - 1, H - 1)
        pit = set()
    P = np.zeros((S, 4, S))
    r = np.zeros((S, 4))
    for y in range(H):
        for x in range(W):
            s = idx(x, y)
            for a in range(4):
                if s == goal:
                    P[s, a, s] = 1.0
                    continue
                if s in pit:
                    # unreachable in practice; sends the agent home
                    P[s, a, start] = 1.0
                    continue
                outcomes = [(a, 1.0 - spec.noise)] + [(b, spec.noise / 2.0) for b in LATERAL[a]]
                for move, prob in outcomes:
                    if prob == 0.0:
                        continue
                    dx, dy = MOVES[move]
                    nx, ny = min(max(x + dx, 0), W - 1), min(max(y + dy, 0), H - 1)
                    t = idx(nx, ny)
                    if t in pit:
                        P[s, a, start] += prob
                        r[s, a] += prob * CLIFF_PENALTY
                    else:
                        P[s, a, t] += prob
                        if t == goal:
                            r[s, a] += prob * GOAL_REWARD
    d = np.zeros(S)
    d[start] = 1.0
    return TabularMdp(P, r, spec.gamma, d, _meta(spec, "cliff" if cliff else "gridworld"))


def make_gridworld(spec: EnvSpec) -> TabularMdp:
    """Open grid from the top-left corner to an absorbing bottom-right goal (+1 on entry)."""
    return _grid(spec, cliff=False)


def make_cliff(spec: EnvSpec) -> TabularMdp:
    """Classic cliff walk along the bottom row.

    Start bottom-left, goal bottom-right (+1 on entry, then absorbing), and
    the cells in between are a cliff: stepping into one costs 100 and sends
    the agent back to the start. Slips go to a uniformly chosen lateral move.
    """
    return _grid(spec, cliff=True)


def _sample_successors(rng, n, k):
    """First ``k`` entries of a Fisher-Yates shuffle of ``range(n)``."""
    perm = list(range(n))
    u = rng.random(k)
    for i in range(k):
        j = i + min(int(u[i] * (n - i)), n - i - 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm[:k]


def _dirichlet_ones(rng, k):
    # 1 - u lies in (0, 1], so the log is finite
    e = -np.log1p(-rng.random(k))
    return e / e.sum()


def make_random_mdp(spec: EnvSpec) -> TabularMdp:
    """Garnet-style MDP.

    Draw order: all ``S * A`` rewards (row-major, uniform on [0, 1)), then
    for each ``(s, a)`` in row-major order ``branching`` uniforms for the
    successor shuffle followed by ``branching`` uniforms for the weights.
    The initial distribution is uniform.
    """
    S, A, b = spec.n_states, spec.n_actions, spec.branching
    if b > S:
        raise DomainError(f"branching ({b}) cannot exceed n_states ({S})")
    rng = rng_for(spec.seed)
    r = rng.random((S, A))
    P = np.zeros((S, A, S))
    for s in range(S):
        for a in range(A):
            succ = _sample_successors(rng, S, b)
            w = _dirichlet_ones(rng, b)
            P[s, a, succ] = w
    d = np.full(S, 1.0 / S)
    return TabularMdp(P, r, spec.gamma, d, _meta(spec, "random"))


GENERATORS = {
    EnvKind.CHAIN: make_chain,
    EnvKind.GRIDWORLD: make_gridworld,
    EnvKind.CLIFF: make_cliff,
    EnvKind.RANDOM: make_random_mdp,
}


def make_env(spec: EnvSpec) -> TabularMdp:
    return GENERATORS[spec.kind](spec)


def random_mdp(seed, n_states=10, n_actions=4, branching=3, gamma=0.9) -> TabularMdp:
    """Shorthand for ``make_random_mdp`` with keyword sizes."""
    return make_random_mdp(
        EnvSpec(EnvKind.RANDOM, n_states=n_states, n_actions=n_actions, branching=branching, gamma=gamma, seed=seed)
    )


__all__ = [
    "EnvKind",
    "EnvSpec",
    "make_chain",
    "make_gridworld",
    "make_cliff",
    "make_random_mdp",
    "make_env",
    "random_mdp",
    "rng_for",
]
