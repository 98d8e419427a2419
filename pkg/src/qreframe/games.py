"""Two-player normal-form games: representation, I/O, generators and the
column-duplication equivalence.

A :class:`Game` holds the row player's payoffs ``a`` and the column player's
payoffs ``b`` as two ``m x n`` float arrays.  Games are treated as immutable
values; every operation here returns a new game.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

DOMINANCE_MARGIN = 1e-9


class GameError(ValueError):
    """Malformed or inconsistent game data."""


class Side(enum.Enum):
    ROW = "row"
    COL = "col"

    @classmethod
    def parse(cls, value) -> "Side":
        if isinstance(value, Side):
            return value
        v = str(value).lower()
        if v in ("row", "r"):
            return cls.ROW
        if v in ("col", "column", "c"):
            return cls.COL
        raise ValueError(f"unknown side {value!r}")

    @property
    def other(self) -> "Side":
        return Side.COL if self is Side.ROW else Side.ROW


def _freeze(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Game:
    """Bimatrix game with optional strategy names.

    Names are cosmetic: equality, hashing and equivalence look at payoffs only.
    """

    a: np.ndarray
    b: np.ndarray
    row_names: tuple = field(default=())
    col_names: tuple = field(default=())

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 2 or b.ndim != 2:
            raise GameError("payoff matrices must be two-dimensional")
        if a.shape != b.shape:
            raise GameError(f"dimension mismatch: {a.shape} vs {b.shape}")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise GameError("a game needs at least one row and one column")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise GameError("payoffs must be finite")
        m, n = a.shape
        rn = tuple(self.row_names) or tuple(f"R{i + 1}" for i in range(m))
        cn = tuple(self.col_names) or tuple(f"C{j + 1}" for j in range(n))
        if len(rn) != m or len(cn) != n:
            raise GameError("strategy name count does not match payoff shape")
        object.__setattr__(self, "a", _freeze(a))
        object.__setattr__(self, "b", _freeze(b))
        object.__setattr__(self, "row_names", tuple(str(s) for s in rn))
        object.__setattr__(self, "col_names", tuple(str(s) for s in cn))

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def payoffs(self, side: Side) -> np.ndarray:
        """Payoffs of `side`, oriented so that its own strategies index rows."""
        return self.a if Side.parse(side) is Side.ROW else self.b.T

    def names(self, side: Side) -> tuple:
        return self.row_names if Side.parse(side) is Side.ROW else self.col_names

    def column(self, j: int) -> tuple:
        """Column ``j`` as a hashable tuple ``(a_0j, b_0j, a_1j, b_1j, ...)``."""
        return tuple(np.column_stack([self.a[:, j], self.b[:, j]]).ravel().tolist())

    def with_row_payoffs(self, a) -> "Game":
        return Game(a, self.b, self.row_names, self.col_names)

    def __eq__(self, other):
        if not isinstance(other, Game):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
        )

    def __hash__(self):
        return hash((self.shape, self.a.tobytes(), self.b.tobytes()))

    def __repr__(self):
        return f"Game(m={self.m}, n={self.n}, rows={list(self.row_names)}, cols={list(self.col_names)})"


@dataclass(frozen=True, eq=False)
class MixedProfile:
    """A pair of mixed strategies ``(p_row, p_col)``."""

    p_row: np.ndarray
    p_col: np.ndarray

    def __post_init__(self):
        for name in ("p_row", "p_col"):
            p = np.asarray(getattr(self, name), dtype=float)
            if p.ndim != 1 or p.size == 0:
                raise ValueError(f"{name} must be a non-empty vector")
            if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
                raise ValueError(f"{name} is not a probability vector: {p}")
            object.__setattr__(self, name, _freeze(p))

    @classmethod
    def centroid(cls, m: int, n: int) -> "MixedProfile":
        return cls(np.full(m, 1.0 / m), np.full(n, 1.0 / n))

    def side(self, side: Side) -> np.ndarray:
        return self.p_row if Side.parse(side) is Side.ROW else self.p_col

    def __eq__(self, other):
        if not isinstance(other, MixedProfile):
            return NotImplemented
        return np.array_equal(self.p_row, other.p_row) and np.array_equal(self.p_col, other.p_col)


# ---------------------------------------------------------------------------
# I/O
# ---------------------------------------------------------------------------

def game_to_dict(g: Game) -> dict:
    return {
        "rows": g.m,
        "cols": g.n,
        "row_payoffs": g.a.tolist(),
        "col_payoffs": g.b.tolist(),
        "row_names": list(g.row_names),
        "col_names": list(g.col_names),
    }


def game_from_dict(d: dict) -> Game:
    try:
        m, n = int(d["rows"]), int(d["cols"])
        a, b = d["row_payoffs"], d["col_payoffs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise GameError(f"missing or invalid game field: {exc}") from exc
    for label, mat in (("row_payoffs", a), ("col_payoffs", b)):
        if not isinstance(mat, list) or len(mat) != m:
            raise GameError(f"{label}: expected {m} rows")
        for i, row in enumerate(mat):
            if not isinstance(row, list) or len(row) != n:
                got = len(row) if isinstance(row, list) else type(row).__name__
                raise GameError(f"{label}: row {i} has {got} entries, expected {n}")
            for x in row:
                if isinstance(x, bool) or not isinstance(x, (int, float)):
                    raise GameError(f"{label}: non-numeric entry {x!r}")
    try:
        return Game(a, b, tuple(d.get("row_names", ())), tuple(d.get("col_names", ())))
    except (TypeError, ValueError) as exc:
        raise GameError(str(exc)) from exc


def load_game(text: str) -> Game:
    """Parse game-file text (JSON) into a validated :class:`Game`."""
    try:
        d = json.loads(text, parse_constant=lambda c: float(c))
    except json.JSONDecodeError as exc:
        raise GameError(f"parse error: {exc}") from exc
    if not isinstance(d, dict):
        raise GameError("game file must hold a JSON object")
    return game_from_dict(d)


def _dump_float(x: float) -> str:
    s = format(float(x), ".17g")
    # "-0" would read back as the integer 0
    return "-0.0" if s == "-0" else s


def save_game(g: Game) -> str:
    """Serialize `g` to game-file text; doubles survive the round trip exactly."""

    def mat(x):
        return "[" + ", ".join("[" + ", ".join(_dump_float(v) for v in row) + "]" for row in x) + "]"

    return (
        "{\n"
        f'  "rows": {g.m},\n'
        f'  "cols": {g.n},\n'
        f'  "row_payoffs": {mat(g.a)},\n'
        f'  "col_payoffs": {mat(g.b)},\n'
        f'  "row_names": {json.dumps(list(g.row_names))},\n'
        f'  "col_names": {json.dumps(list(g.col_names))}\n'
        "}\n"
    )


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def expected_payoffs(g: Game, opponent, side: Side) -> np.ndarray:
    """Expected payoff of each pure strategy of `side` against `opponent`.

    For the row player ``u_i = sum_j a_ij q_j``; for the column player
    ``u_j = sum_i b_ij p_i``.
    """
    side = Side.parse(side)
    q = np.asarray(opponent, dtype=float)
    own = g.payoffs(side)
    if q.shape != (own.shape[1],):
        raise ValueError(f"opponent vector has length {q.size}, expected {own.shape[1]}")
    return own @ q


def _dominated_by_mixture(u: np.ndarray, i: int) -> bool:
    # maximize eps s.t. sum_k s_k u[k, j] - u[i, j] >= eps for all j, s in simplex
    k, n = u.shape
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-u.T, np.ones((n, 1))])
    b_ub = -u[i]
    A_eq = np.zeros((1, k + 1))
    A_eq[0, :k] = 1.0
    bounds = [(0, None)] * k + [(None, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"dominance LP failed: {res.message}")
    return -res.fun > DOMINANCE_MARGIN


def strictly_dominated(g: Game, side: Side, mode: str = "pure") -> set[int]:
    """Indices of `side`'s strictly dominated strategies.

    ``mode="pure"`` only considers domination by another pure strategy;
    ``mode="mixed"`` allows any mixture and is decided by a linear program.
    """
    u = g.payoffs(side)
    k = u.shape[0]
    if mode == "pure":
        return {i for i in range(k) if any(np.all(u[r] > u[i]) for r in range(k) if r != i)}
    if mode == "mixed":
        if k == 1:
            return set()
        return {i for i in range(k) if _dominated_by_mixture(u, i)}
    raise ValueError(f"unknown dominance mode {mode!r}")


def pure_nash(g: Game) -> list[tuple[int, int]]:
    """All pure-strategy Nash equilibria, by exhaustive search."""
    best_row = g.a >= g.a.max(axis=0, keepdims=True)
    best_col = g.b >= g.b.max(axis=1, keepdims=True)
    return [tuple(int(v) for v in ij) for ij in np.argwhere(best_row & best_col)]


def payoff_range(g: Game) -> float:
    return float(max(np.ptp(g.a), np.ptp(g.b)))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def gen_coordination(x: float, n_outside: int = 1) -> Game:
    """Coordination game (L, H) where the column player has outside options.

    Coordinating pays 90 on L and 180 on H; each outside column pays the
    column player 40 and the row player ``x`` on L, 0 on H.
    """
    if n_outside < 0:
        raise ValueError("n_outside must be >= 0")
    a = [[90.0, 0.0] + [float(x)] * n_outside, [0.0, 180.0] + [0.0] * n_outside]
    b = [[90.0, 0.0] + [40.0] * n_outside, [0.0, 180.0] + [40.0] * n_outside]
    if n_outside == 1:
        outside = ("S",)
    else:
        outside = tuple(f"S{k + 1}" for k in range(n_outside))
    return Game(a, b, ("L", "H"), ("L", "H") + outside)


def gen_coordination_eps(x: float, eps: float) -> Game:
    """Two-outside-option coordination game with the second option's row-L
    payoff shifted to ``x + eps``."""
    g = gen_coordination(x, 2)
    a = g.a.copy()
    a[0, 3] = x + eps
    return g.with_row_payoffs(a)


def gen_travelers(lo: int, hi: int, reward: float) -> Game:
    """Traveler's dilemma on claims ``lo..hi``.

    Both are paid the lower claim; the lower claimant gets ``+reward`` and
    the higher one ``-reward``.
    """
    if lo > hi:
        raise ValueError(f"lo={lo} exceeds hi={hi}")
    if reward <= 0:
        raise ValueError("reward must be positive")
    claims = np.arange(lo, hi + 1, dtype=float)
    c1, c2 = np.meshgrid(claims, claims, indexing="ij")
    a = np.minimum(c1, c2) + reward * np.sign(c2 - c1)
    names = tuple(str(int(c)) for c in claims)
    return Game(a, a.T, names, names)


# ---------------------------------------------------------------------------
# Column-duplication equivalence
# ---------------------------------------------------------------------------

def duplicate_column(g: Game, j: int, count: int = 1) -> Game:
    """Insert `count` copies of column `j` right after it."""
    if not 0 <= j < g.n:
        raise IndexError(f"column {j} out of range for n={g.n}")
    if count < 1:
        raise ValueError("count must be >= 1")
    idx = list(range(j + 1)) + [j] * count + list(range(j + 1, g.n))
    return select_columns(g, idx)


def select_columns(g: Game, idx: Sequence[int]) -> Game:
    idx = list(idx)
    return Game(g.a[:, idx], g.b[:, idx], g.row_names, tuple(g.col_names[j] for j in idx))


def distinct_column_index(g: Game) -> list[int]:
    """Indices of the first occurrence of each distinct column."""
    seen = set()
    keep = []
    for j in range(g.n):
        col = g.column(j)
        if col not in seen:
            seen.add(col)
            keep.append(j)
    return keep


def reduce(g: Game) -> Game:
    """Delete every column that is an exact copy of an earlier column."""
    return select_columns(g, distinct_column_index(g))


def canonical_form(g: Game) -> Game:
    """Reduced game with columns sorted lexicographically by
    ``(a_1j, b_1j, a_2j, b_2j, ...)``."""
    keep = distinct_column_index(g)
    keep.sort(key=g.column)
    return select_columns(g, keep)


def equivalent(g1: Game, g2: Game) -> bool:
    """True when both games have the same set of distinct columns."""
    if g1.m != g2.m:
        raise GameError(f"row counts differ: {g1.m} vs {g2.m}")
    return canonical_form(g1) == canonical_form(g2)


def near_duplicate_columns(g: Game, threshold: float = 1e-9) -> list[tuple[int, int, float]]:
    """Diagnostic: pairs of distinct columns closer than `threshold` (sup norm).

    Equivalence itself never uses this; it is exact.
    """
    out = []
    cols = [np.array(g.column(j)) for j in range(g.n)]
    for j in range(g.n):
        for k in range(j + 1, g.n):
            d = float(np.max(np.abs(cols[j] - cols[k])))
            if 0.0 < d < threshold:
                out.append((j, k, d))
    return out

