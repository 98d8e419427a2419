"""Weak-selection assessment against a simulated Moran process.

phi says which row strategy selection favors when payoffs barely matter.
At the default strength of selection the coordination payoffs are large
enough that the column population settles on L or H almost at once, and the
prediction for two outside columns is no longer borne out.  Sweeping delta
shows where the sign changes.

Run with a smaller step budget for a quick look:  python phi_vs_moran.py 2000000
"""
import sys
import warnings

from qreframe import MoranConfig, Side, gen_coordination, moran_simulate, phi_assessment, phi_vs_moran_report
from qreframe.evolution import WeakSelectionWarning

steps = int(sys.argv[1]) if len(sys.argv) > 1 else 10_000_000
warnings.simplefilter("ignore", WeakSelectionWarning)

for k in (1, 2):
    g = gen_coordination(60, k)
    rep = phi_vs_moran_report(g, MoranConfig(steps=steps))
    print(f"{k} outside column(s): phi {phi_assessment(g).tolist()}")
    print(f"  abundance - 1/2 {rep.deviation.round(4).tolist()} +- {rep.std_error.round(4).tolist()}  -> {rep.status}")

print("\ndelta     L abundance   se       outside mass (two copies)")
g = gen_coordination(60, 2)
for delta in (1e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2):
    est = moran_simulate(g, MoranConfig(delta=delta, steps=steps))
    mass, _ = est.combined(Side.COL, [2, 3])
    print(f"{delta:<9g} {est.abundance_row[0]:.4f}        {est.se_row[0]:.4f}   {mass:.4f}")
