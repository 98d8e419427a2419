"""Traveler's dilemma: claims 180..300 with reward 5.

The lowest claim is the only pure equilibrium, although no claim is strictly
dominated (undercutting by one only weakly beats a claim).  A logit player
with modest rationality claims far more.

The maximum claim is strictly dominated by a mixture, though: weights
decaying like 0.8 ** (300 - claim) over the lower claims beat it against every
opposing claim, by a margin of order 1e-12.
"""
import numpy as np

from qreframe import Side, gen_travelers, pure_nash, solve_fixed_point, strictly_dominated

g = gen_travelers(180, 300, 5)
print("shape", g.shape, " pure equilibria", [(g.row_names[i], g.col_names[j]) for i, j in pure_nash(g)])
for mode in ("pure", "mixed"):
    print(f"strictly dominated claims ({mode}):", [g.row_names[i] for i in strictly_dominated(g, Side.ROW, mode)])

claims = np.arange(180, 301)
prof = None
for lam in (0.0, 0.05, 0.1, 0.2, 0.5):
    res = solve_fixed_point(g, lam, prof)
    prof = res.profile
    mean = float(claims @ prof.p_row)
    print(f"lambda {lam:4}: mean claim {mean:6.1f}, P(claim >= 290) {prof.p_row[claims >= 290].sum():.3f}, "
          f"residual {res.residual:.1e}")
