"""MVI(q) across entropic indices on the seeded cliff walk.

Solves the 6x3 cliff (slip 0.1) for each q and reports the exact
unregularized return of the final policy, then contrasts MVI(q=2) with the
baseline that swaps ln for ln_q inside the Munchausen recursion.

    python3 demos/cliff_sweep.py
"""
import math

from tsallis_mdp import EnvKind, EnvSpec, SolverConfig, make_cliff, run_mvi_q, run_naive_lnq
from tsallis_mdp.mdp import initial_value

mdp = make_cliff(EnvSpec(EnvKind.CLIFF, width=6, height=3, noise=0.1, gamma=0.9, seed=0))
print(f"cliff: {mdp.n_states} states, {mdp.n_actions} actions")

for q in (1.0, 2.0, 3.0, 5.0, math.inf):
    Q, pi, trace = run_mvi_q(mdp, SolverConfig(q=q, tau=0.1, alpha=0.9))
    print(f"q = {q:<4} iterations {len(trace):4d}  return {initial_value(mdp, pi):.5f}")

cfg = SolverConfig(q=2.0, tau=0.1, alpha=0.9, max_iters=500, early_stop=False)
v_m = initial_value(mdp, run_mvi_q(mdp, cfg)[1])
v_n = initial_value(mdp, run_naive_lnq(mdp, cfg)[1])
print(f"\nq = 2 after 500 iterations: MVI(q) {v_m:.5f}, naive ln_q {v_n:.5f}, margin {v_m - v_n:+.5f}")
