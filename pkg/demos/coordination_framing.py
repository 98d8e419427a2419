"""Coordination with an outside option, shown two ways.

The column player can leave for a safe payoff of 40.  Copying that outside
column changes nothing strategically, yet it moves both the logit branch and
the weak-selection assessment.
"""
import numpy as np

from qreframe import gen_coordination, get_assessor, frame_sensitivity, limit_equilibrium, trace_branch

np.set_printoptions(precision=4, suppress=True)

# Logit branch from the centroid at lambda = 0 until one pure profile dominates.
for k in (1, 2):
    g = gen_coordination(160, k)
    tr = trace_branch(g)
    lim = limit_equilibrium(tr)
    print(f"{k} outside column(s): {len(tr)} samples, stop at lambda={tr.terminal_lambda:.4f}")
    print("  row profile", tr.terminal_profile.p_row, "->", lim.label)

# A few points along the two branches, to see where they part ways.
t1, t2 = trace_branch(gen_coordination(160, 1), 0.03, stop_at_pure=False), trace_branch(gen_coordination(160, 2), 0.03, stop_at_pure=False)
print("\nlambda    p(H) one copy   p(H) two copies")
for lam in (0.0, 0.005, 0.01, 0.02, 0.03):
    i1 = int(np.argmin(np.abs(np.array(t1.lambdas) - lam)))
    i2 = int(np.argmin(np.abs(np.array(t2.lambdas) - lam)))
    print(f"{t1.lambdas[i1]:.4f}   {t1.profiles[i1].p_row[1]:.4f}          {t2.profiles[i2].p_row[1]:.4f}")

# Every way of repeating each distinct column at most once.
print()
for name, x in (("phi", 60), ("qre-terminal", 160), ("nash-argmax", 60)):
    rep = frame_sensitivity(get_assessor(name), gen_coordination(x, 1), 1)
    print(f"{name:13s} x={x}: {len(rep.representations)} representations, flips {rep.named_flips()}, "
          f"max discrepancy {rep.max_discrepancy:.4g}")

print("\n" + frame_sensitivity(get_assessor("phi"), gen_coordination(60, 1), 1).table())
