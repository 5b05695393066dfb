"""How the entropic index shapes a greedy policy.

Prints the policy over four actions for several q and tau. Small q spreads
mass like softmax; q = 2 truncates low-valued actions; q = inf is argmax.

    python3 demos/policies.py
"""
import math

import numpy as np

from tsallis_mdp.policy import tsallis_policy

row = np.array([1.0, 0.8, 0.2, -0.5])
print("Q =", row)
for tau in (0.05, 0.3, 1.0):
    print(f"\ntau = {tau}")
    for q in (1.0, 1.5, 2.0, 3.0, math.inf):
        pi = tsallis_policy(row, q, tau)
        kept = int(np.count_nonzero(pi))
        print(f"  q = {q:<4}  pi = {np.array2string(pi, precision=3, floatmode='fixed')}  support {kept}")
