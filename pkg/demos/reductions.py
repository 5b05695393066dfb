"""Special cases of MVI(q) that collapse onto older algorithms.

Each line prints the largest entrywise gap between two solvers that should
agree on a seeded random MDP.

    python3 demos/reductions.py
"""
import math

import numpy as np

from tsallis_mdp import Algorithm, SolverConfig, run_cvi, run_mvi, run_mvi_q, run_tsallis_vi
from tsallis_mdp.envs import random_mdp
from tsallis_mdp.solvers import cvi_parameters
from tsallis_mdp.verify import advantage_learning

mdp = random_mdp(seed=0)


def gap(a, b):
    return float(np.max(np.abs(a - b)))


q1 = run_mvi_q(mdp, SolverConfig(q=1.0, tau=0.1, alpha=0.9))[0]
mvi = run_mvi(mdp, SolverConfig(algorithm=Algorithm.MVI, tau=0.1, alpha=0.9))[0]
print(f"MVI(q=1) vs MVI:                 {gap(q1, mvi):.2e}")

a0 = run_mvi_q(mdp, SolverConfig(q=2.0, tau=0.1, alpha=0.0))[0]
tvi = run_tsallis_vi(mdp, SolverConfig(algorithm=Algorithm.TSALLIS_VI, q=2.0, tau=0.1))[0]
print(f"MVI(q=2, alpha=0) vs Tsallis-VI: {gap(a0, tvi):.2e}")

inf = run_mvi_q(mdp, SolverConfig(q=math.inf, tau=0.1, alpha=0.9, residual_tol=1e-12, max_iters=5000))[0]
print(f"MVI(q=inf) vs advantage learning: {gap(inf, advantage_learning(mdp, 0.9, tol=1e-12)):.2e}")

par = cvi_parameters(0.5, 0.1)
cvi = run_cvi(mdp, SolverConfig(algorithm=Algorithm.CVI, tau=0.1, alpha=0.5))[0]
mvi_m = run_mvi(mdp, SolverConfig(algorithm=Algorithm.MVI, tau=par["tau_mvi"], alpha=0.5))[0]
print(f"CVI vs MVI (matched):            {gap(cvi, mvi_m):.2e}   sigma={par['sigma']:.3f} zeta={par['zeta']:.3f}")
