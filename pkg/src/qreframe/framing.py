"""Framing effects of game assessments under column duplication.

An assessor maps a game to one real number per strategy of a chosen player.
Two games are equivalent when they only differ by duplicated columns, so a
framing-proof assessor must give equivalent games identical values.  This
module enumerates equivalent representations, measures how far an assessor
moves across them, and evaluates the four-matrix construction showing why a
differentiable assessor cannot be framing-proof.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import qre
from .evolution import phi_assessment
from .games import Game, Side, game_to_dict, pure_nash, reduce, select_columns, strictly_dominated

MAX_COLUMNS = 12
CONSISTENCY_TOL = 1e-9


class AssessorError(RuntimeError):
    """An assessor failed on one of the enumerated representations."""

    def __init__(self, message, representation: Game):
        super().__init__(message)
        self.representation = representation


@dataclass(frozen=True)
class Assessor:
    name: str
    func: Callable[[Game, Side], np.ndarray]

    def __call__(self, g: Game, side: Side = Side.ROW) -> np.ndarray:
        return np.asarray(self.func(g, Side.parse(side)), dtype=float)


def _qre_terminal(lambda_max: Optional[float]):
    def f(g, side):
        tr = qre.trace_branch(g, lambda_max)
        if not tr.ok:
            raise RuntimeError(tr.message)
        return qre.limit_equilibrium(tr).profile.side(side)

    return f


def _qre_at_lambda(lam: float, tol: float):
    def f(g, side):
        tr = qre.trace_branch(g, lam, tol=tol, stop_at_pure=False)
        if not tr.ok:
            raise RuntimeError(tr.message)
        return tr.terminal_profile.side(side)

    return f


def _nash_support(g, side):
    eq = pure_nash(g)
    k = g.m if side is Side.ROW else g.n
    out = np.zeros(k)
    for i, j in eq:
        out[i if side is Side.ROW else j] = 1.0
    return out


def get_assessor(name: str, *, lambda_max: Optional[float] = None, lam: float = 0.02,
                 tol: float = 1e-12) -> Assessor:
    """Look up a shipped assessor.

    ``phi``
        weak-selection assessment (row mean minus grand mean).
    ``qre-terminal``
        end point of the principal logit branch (up to `lambda_max`, default
        ``50 / payoff range``).
    ``qre-at-lambda``
        principal-branch logit equilibrium at rationality `lam`.
    ``nash-argmax``
        1 for strategies used in some pure Nash equilibrium, else 0.
    """
    if name == "phi":
        return Assessor(name, phi_assessment)
    if name == "qre-terminal":
        return Assessor(name, _qre_terminal(lambda_max))
    if name == "qre-at-lambda":
        return Assessor(name, _qre_at_lambda(lam, tol))
    if name == "nash-argmax":
        return Assessor(name, _nash_support)
    raise KeyError(f"unknown assessor {name!r}")


ASSESSORS = ("phi", "qre-terminal", "qre-at-lambda", "nash-argmax")


def constant_assessor(value: float = 0.0) -> Assessor:
    return Assessor("constant", lambda g, side: np.full(g.m if side is Side.ROW else g.n, value))


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------

def representations(g: Game, max_dups: int, max_columns: int = MAX_COLUMNS):
    """Yield ``(dups, game)`` for every way of repeating each column of
    ``reduce(g)`` up to `max_dups` extra times, within `max_columns`.

    The unduplicated reduced game always comes first.
    """
    if max_dups < 0:
        raise ValueError("max_dups must be >= 0")
    base = reduce(g)
    for dups in itertools.product(range(max_dups + 1), repeat=base.n):
        if any(dups) and base.n + sum(dups) > max_columns:
            continue
        idx = [j for j in range(base.n) for _ in range(1 + dups[j])]
        yield dups, select_columns(base, idx)


def order_flips(values: list) -> list:
    """Pairs ``(i, k)``, ``i < k``, ranked ``i > k`` somewhere and ``i < k``
    somewhere else."""
    v = np.asarray(values)
    out = []
    for i, k in itertools.combinations(range(v.shape[1]), 2):
        if np.any(v[:, i] > v[:, k]) and np.any(v[:, i] < v[:, k]):
            out.append((i, k))
    return out


@dataclass
class FramingReport:
    assessor: str
    side: Side
    base_game: Game
    representations: list  # (Game, assessment)
    duplications: list
    max_discrepancy: float
    order_flips: list
    tol: float = CONSISTENCY_TOL

    @property
    def inconsistent(self) -> bool:
        return bool(self.order_flips) or self.max_discrepancy > self.tol

    def named_flips(self) -> list:
        names = self.base_game.names(self.side)
        return [(names[i], names[k]) for i, k in self.order_flips]

    def to_dict(self) -> dict:
        return {
            "assessor": self.assessor,
            "side": self.side.value,
            "base_game": game_to_dict(self.base_game),
            "representations": [
                {"duplications": list(d), "game": game_to_dict(rg), "assessment": [float(x) for x in f]}
                for d, (rg, f) in zip(self.duplications, self.representations)
            ],
            "max_discrepancy": self.max_discrepancy,
            "order_flips": [list(p) for p in self.order_flips],
            "inconsistent": self.inconsistent,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def table(self) -> str:
        names = self.base_game.names(self.side)
        lines = ["dups".ljust(16) + "".join(s.rjust(14) for s in names)]
        for d, (_, f) in zip(self.duplications, self.representations):
            lines.append(str(tuple(d)).ljust(16) + "".join(f"{x:14.6g}" for x in f))
        lines.append(f"max discrepancy: {self.max_discrepancy:.6g}")
        lines.append(f"order flips: {self.named_flips() or 'none'}")
        lines.append(f"inconsistent: {str(self.inconsistent).lower()}")
        return "\n".join(lines) + "\n"


def frame_sensitivity(assessor: Assessor, g: Game, max_dups: int = 1,
                      max_columns: int = MAX_COLUMNS) -> FramingReport:
    """Evaluate `assessor` on the row player across equivalent representations.

    Representations come from :func:`representations`; row strategies are
    unchanged by column duplication, so assessments are compared entrywise.
    """
    reps, dups = [], []
    for d, rg in representations(g, max_dups, max_columns):
        try:
            f = assessor(rg, Side.ROW)
        except Exception as exc:
            raise AssessorError(f"assessor {assessor.name!r} failed on duplications {d}: {exc}", rg) from exc
        reps.append((rg, f))
        dups.append(d)
    v = np.asarray([f for _, f in reps])
    disc = float(np.max(np.abs(v[:, None, :] - v[None, :, :])))
    return FramingReport(assessor.name, Side.ROW, g, reps, dups, disc, order_flips(v))


def nash_sets_consistent(g: Game, max_dups: int = 1, max_columns: int = MAX_COLUMNS) -> bool:
    """Whether pure Nash equilibria, with columns identified by content, are the
    same set for every enumerated representation."""
    seen = None
    for _, rg in representations(g, max_dups, max_columns):
        eq = {(i, rg.column(j)) for i, j in pure_nash(rg)}
        if seen is None:
            seen = eq
        elif eq != seen:
            return False
    return True


def validity_holds(assessment, g: Game) -> bool:
    """No strictly dominated row strategy attains the maximal assessment."""
    f = np.asarray(assessment, dtype=float)
    return all(f[i] < f.max() for i in strictly_dominated(g, Side.ROW, "mixed"))


# ---------------------------------------------------------------------------
# Derivatives and the four-matrix construction
# ---------------------------------------------------------------------------

def directional_probe(assessor: Assessor, g: Game, direction, h: float, side: Side = Side.ROW) -> np.ndarray:
    """Central difference of the assessor along a perturbation of the row
    player's payoffs."""
    if h <= 0:
        raise ValueError("h must be positive")
    d = np.asarray(direction, dtype=float)
    up = assessor(g.with_row_payoffs(g.a + h * d), side)
    down = assessor(g.with_row_payoffs(g.a - h * d), side)
    return (up - down) / (2 * h)


def derivative_probe(assessor: Assessor, g: Game, i: int, j: int, h: Optional[float] = None,
                     side: Side = Side.ROW) -> np.ndarray:
    """Estimate ``d f / d a_ij`` by central differences.

    `h` defaults to ``1e-5 * max(1, |a_ij|)``.
    """
    if h is None:
        h = 1e-5 * max(1.0, abs(g.a[i, j]))
    e = np.zeros(g.shape)
    e[i, j] = 1.0
    return directional_probe(assessor, g, e, h, side)


def theorem_matrices(g: Game, t: float) -> tuple:
    """Four games built from a 2x2 game `g` with a_11 moved by `t`.

    The first is `g` with the shift.  The second repeats the shifted first
    column three times.  The third and fourth both carry three copies of the
    first column, shifted in the last copy only (third) or in the last two
    (fourth).  First and second are equivalent, and so are third and fourth.
    """
    if g.shape != (2, 2):
        raise ValueError("the construction needs a 2x2 game")

    def build(shifts):
        # shifts[k] is the a_11 shift for the k-th copy of column 1
        a = np.column_stack([g.a[:, 0] + [s, 0.0] for s in shifts] + [g.a[:, 1]])
        b = np.column_stack([g.b[:, 0]] * len(shifts) + [g.b[:, 1]])
        return Game(a, b, g.row_names)

    return build([t]), build([t, t, t]), build([0.0, 0.0, t]), build([0.0, t, t])


@dataclass
class TheoremRecord:
    t: np.ndarray
    u: list  # u[k][s]: assessment of game k at shift t[s]
    u12_equal: bool
    u34_equal: bool
    equal_at_zero: bool
    slopes: np.ndarray  # slope at zero shift, one row per game
    partials_m2: np.ndarray  # d f / d a_1j on the unshifted second game, j = 1..3

    @property
    def chain_rule_residual(self) -> float:
        """How far the slopes of games 2, 3 and 4 are from the sums of partials
        the chain rule predicts for them."""
        d = self.partials_m2
        return float(
            np.max(np.abs(self.slopes[1] - d.sum(axis=0)))
            + np.max(np.abs(self.slopes[2] - d[2]))
            + np.max(np.abs(self.slopes[3] - d[1] - d[2]))
        )


def theorem_enactment(assessor: Assessor, g: Game, t_range: float = 1.0, h: Optional[float] = None,
                      n_grid: int = 21, atol: float = CONSISTENCY_TOL) -> TheoremRecord:
    """Evaluate the assessor on the four games of :func:`theorem_matrices`
    over a grid of shifts in ``[-t_range, t_range]``.

    A framing-proof assessor gives the first two games equal values at every
    shift, and likewise the last two.  The record also holds the slope of each
    curve at zero shift and the partials at the unshifted second game with
    respect to its first three row-1 payoffs, which the chain rule ties to
    the slopes of the second, third and fourth curves.
    """
    if h is None:
        h = 1e-5 * max(1.0, abs(g.a[0, 0]))
    ts = np.linspace(-t_range, t_range, n_grid)
    u = [np.array([assessor(mk) for mk in theorem_matrices(g, t)]) for t in ts]
    u = [np.array([row[k] for row in u]) for k in range(4)]
    slopes = []
    for k in range(4):
        plus = assessor(theorem_matrices(g, h)[k])
        minus = assessor(theorem_matrices(g, -h)[k])
        slopes.append((plus - minus) / (2 * h))
    m2 = theorem_matrices(g, 0.0)[1]
    partials = np.array([derivative_probe(assessor, m2, 0, j, h) for j in range(3)])
    at0 = theorem_matrices(g, 0.0)
    return TheoremRecord(
        t=ts,
        u=u,
        u12_equal=bool(np.allclose(u[0], u[1], rtol=0, atol=atol)),
        u34_equal=bool(np.allclose(u[2], u[3], rtol=0, atol=atol)),
        equal_at_zero=bool(np.array_equal(assessor(at0[0]), assessor(at0[1]))),
        slopes=np.array(slopes),
        partials_m2=partials,
    )
