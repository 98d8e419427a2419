"""Why a smooth assessment cannot ignore duplicated columns.

Start from a 2x2 game and move one payoff.  The first two games differ only
by two extra copies of the moved column, the last two only by where the
moved copy sits.  A framing-proof assessment has to agree on each pair, and the chain
rule then pins its derivative to zero.
"""
import numpy as np

from qreframe import Game, constant_assessor, get_assessor, theorem_enactment, theorem_matrices

np.set_printoptions(precision=5, suppress=True)
g = Game([[90, 0], [0, 180]], [[90, 0], [0, 180]])

for k, mk in enumerate(theorem_matrices(g, 1.0), 1):
    print(f"game {k}, shift 1, row payoffs\n{mk.a}")

for name, f in (("phi", get_assessor("phi")),
                ("qre-at-lambda 0.01", get_assessor("qre-at-lambda", lam=0.01)),
                ("constant", constant_assessor(1.0))):
    rec = theorem_enactment(f, g, h=1e-4, n_grid=5)
    print(f"\n{name}")
    print("  games 1, 2 agree:", rec.u12_equal, "  games 3, 4 agree:", rec.u34_equal)
    print("  slopes at zero shift, row 1:", rec.slopes[:, 0])
    print("  partials on unshifted game 2:", rec.partials_m2[:, 0])
    print(f"  chain rule residual {rec.chain_rule_residual:.2e}")
