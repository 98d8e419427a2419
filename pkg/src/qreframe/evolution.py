"""Weak-selection assessment and a two-population Moran imitation process.

``phi_assessment`` gives ``phi_i = mean_j a_ij - mean_ij a_ij``: under weak
selection a row strategy with positive phi is played more than ``1/m`` of the
time.  ``moran_simulate`` runs the underlying stochastic process so that
prediction can be checked against long-run abundances.
"""
from __future__ import annotations

import io
import json
import warnings
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numba
import numpy as np

from .games import Game, Side, payoff_range

WEAK_SELECTION_LIMIT = 0.5
CHUNK = 1 << 18


class WeakSelectionWarning(UserWarning):
    pass


def phi_assessment(g: Game, side: Side = Side.ROW) -> np.ndarray:
    """Row mean minus grand mean of `side`'s payoffs, per own strategy.

    Evaluated in exact rational arithmetic, so duplicating a column whose
    entries are already at the row means leaves the result bit-identical.
    """
    u = g.payoffs(side).tolist()
    n = len(u[0])
    means = [sum(map(Fraction, row)) / n for row in u]
    grand = sum(means) / len(means)
    return np.array([float(v - grand) for v in means])


def phi_gradient(g: Game) -> np.ndarray:
    """Closed-form ``d phi_k / d a_ij`` for the row player, shape (m, m, n)."""
    m, n = g.shape
    grad = np.full((m, m, n), -1.0 / (m * n))
    for k in range(m):
        grad[k, k, :] += 1.0 / n
    return grad


def selection_favors(values) -> np.ndarray:
    return np.asarray(values, dtype=float) > 0


class Ranking(NamedTuple):
    order: list
    ties: list


def abundance_order(values) -> Ranking:
    """Indices by descending value; equal values keep index order and are
    grouped in ``ties``."""
    v = np.asarray(values, dtype=float)
    order = sorted(range(v.size), key=lambda i: -v[i])
    ties, group = [], [order[0]] if order else []
    for i in order[1:]:
        if v[i] == v[group[-1]]:
            group.append(i)
        else:
            if len(group) > 1:
                ties.append(tuple(group))
            group = [i]
    if len(group) > 1:
        ties.append(tuple(group))
    return Ranking(order, ties)


# ---------------------------------------------------------------------------
# Moran process
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MoranConfig:
    n_row: int = 40
    n_col: int = 40
    delta: float = 0.01
    mutation: float = 0.05
    steps: int = 10_000_000
    burn_in: int = 100_000
    seed: int = 0
    batches: int = 100

    def validate(self):
        if self.n_row < 2 or self.n_col < 2:
            raise ValueError("population sizes must be >= 2")
        if not 0.0 <= self.mutation <= 1.0:
            raise ValueError("mutation must lie in [0, 1]")
        if self.delta < 0 or not np.isfinite(self.delta):
            raise ValueError("delta must be finite and >= 0")
        if self.burn_in < 0 or self.steps <= self.burn_in:
            raise ValueError("need 0 <= burn_in < steps")
        if self.batches < 2 or self.steps - self.burn_in < self.batches:
            raise ValueError("need at least 2 batches and one step per batch")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass
class MoranEstimate:
    abundance_row: np.ndarray
    abundance_col: np.ndarray
    se_row: np.ndarray
    se_col: np.ndarray
    config: MoranConfig
    row_names: tuple = ()
    col_names: tuple = ()
    trajectory: Optional[np.ndarray] = None  # columns: step, row counts..., col counts...
    batch_means: Optional[np.ndarray] = None  # (batches, m + n) frequencies

    def abundance(self, side: Side) -> np.ndarray:
        return self.abundance_row if Side.parse(side) is Side.ROW else self.abundance_col

    def std_error(self, side: Side) -> np.ndarray:
        return self.se_row if Side.parse(side) is Side.ROW else self.se_col

    def combined(self, side: Side, strategies) -> tuple[float, float]:
        """Total abundance of several strategies of `side` and its batch-means
        standard error."""
        m = len(self.abundance_row)
        idx = [i if Side.parse(side) is Side.ROW else m + i for i in strategies]
        ab = np.r_[self.abundance_row, self.abundance_col][idx].sum()
        per_batch = self.batch_means[:, idx].sum(axis=1)
        return float(ab), float(per_batch.std(ddof=1) / np.sqrt(per_batch.size))

    def summary(self) -> dict:
        def pop(names, ab, se):
            return [
                {"strategy": s, "abundance": float(x), "std_error": float(e)}
                for s, x, e in zip(names, ab, se)
            ]

        return {
            "config": asdict(self.config),
            "row": pop(self.row_names, self.abundance_row, self.se_row),
            "col": pop(self.col_names, self.abundance_col, self.se_col),
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2) + "\n"

    def trajectory_csv(self) -> str:
        """Thinned trajectory as ``step,strategy,population,count`` rows."""
        if self.trajectory is None:
            raise ValueError("simulation was run without a trajectory")
        m = len(self.abundance_row)
        buf = io.StringIO()
        buf.write("step,strategy,population,count\n")
        for rec in self.trajectory:
            step = int(rec[0])
            for i, c in enumerate(rec[1:1 + m]):
                buf.write(f"{step},{i + 1},row,{int(c)}\n")
            for j, c in enumerate(rec[1 + m:]):
                buf.write(f"{step},{j + 1},col,{int(c)}\n")
        return buf.getvalue()


@numba.njit(cache=True)
def _pick(weights, total, r):
    x = r * total
    acc = 0.0
    for i in range(weights.size - 1):
        acc += weights[i]
        if x < acc:
            return i
    return weights.size - 1


@numba.njit(cache=True)
def _update(own, other, pay, delta, mutation, u, fit):
    # pay[i, j]: payoff of own strategy i against other strategy j
    k = own.size
    n_own = own.sum()
    n_other = other.sum()
    who = _pick(own, float(n_own), u[1])
    if u[2] < mutation:
        new = min(int(u[3] * k), k - 1)
    else:
        best = -np.inf
        for i in range(k):
            s = 0.0
            for j in range(other.size):
                s += pay[i, j] * other[j]
            fit[i] = delta * s / n_other
            if fit[i] > best:
                best = fit[i]
        total = 0.0
        for i in range(k):
            fit[i] = own[i] * np.exp(fit[i] - best)
            total += fit[i]
        new = _pick(fit, total, u[3])
    own[who] -= 1
    own[new] += 1


@numba.njit(cache=True)
def _run_chunk(A, Bt, nr, nc, delta, mutation, U, step0, burn_in, batch_len, n_batches,
               sums, counts, thin, traj, traj_pos):
    m = nr.size
    p_row = nr.sum() / (nr.sum() + nc.sum())
    fit_r = np.empty(m)
    fit_c = np.empty(nc.size)
    for t in range(U.shape[0]):
        step = step0 + t
        if thin > 0 and step % thin == 0:
            traj[traj_pos, 0] = step
            traj[traj_pos, 1:1 + m] = nr
            traj[traj_pos, 1 + m:] = nc
            traj_pos += 1
        if U[t, 0] < p_row:
            _update(nr, nc, A, delta, mutation, U[t], fit_r)
        else:
            _update(nc, nr, Bt, delta, mutation, U[t], fit_c)
        if step >= burn_in:
            b = min((step - burn_in) // batch_len, n_batches - 1)
            counts[b] += 1
            for i in range(m):
                sums[b, i] += nr[i]
            for j in range(nc.size):
                sums[b, m + j] += nc[j]
    return traj_pos


def _initial_counts(size, k):
    c = np.full(k, size // k, dtype=np.int64)
    c[: size - c.sum()] += 1
    return c


def moran_simulate(g: Game, cfg: MoranConfig = MoranConfig(), thin: Optional[int] = None) -> MoranEstimate:
    """Run the two-population imitation-mutation chain and time-average it.

    Each step one individual is drawn uniformly from the union of both
    populations.  With probability ``cfg.mutation`` it adopts a uniformly
    random strategy (its current one included); otherwise it imitates a
    member of its own population chosen with probability proportional to
    ``count_i * exp(delta * u_i)``, where ``u_i`` is strategy i's expected
    payoff against the other population's current mix.  Both populations
    start as close to uniform as the sizes allow.

    Abundances average the post-burn-in states; standard errors come from
    ``cfg.batches`` batch means.  Random numbers come from numpy's Philox
    counter-based generator seeded with ``cfg.seed``, so identical inputs
    give bit-identical estimates.  Pass `thin` to record the counts every
    `thin` steps.
    """
    cfg.validate()
    m, n = g.shape
    A = np.ascontiguousarray(g.a, dtype=np.float64)
    Bt = np.ascontiguousarray(g.b.T, dtype=np.float64)
    nr = _initial_counts(cfg.n_row, m)
    nc = _initial_counts(cfg.n_col, n)
    n_post = cfg.steps - cfg.burn_in
    batch_len = n_post // cfg.batches
    sums = np.zeros((cfg.batches, m + n))
    counts = np.zeros(cfg.batches, dtype=np.int64)
    if thin:
        traj = np.zeros(((cfg.steps + thin - 1) // thin, 1 + m + n), dtype=np.int64)
    else:
        thin, traj = 0, np.zeros((0, 1 + m + n), dtype=np.int64)
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    pos = 0
    for step0 in range(0, cfg.steps, CHUNK):
        U = rng.random((min(CHUNK, cfg.steps - step0), 4))
        pos = _run_chunk(A, Bt, nr, nc, float(cfg.delta), float(cfg.mutation), U, step0,
                         cfg.burn_in, batch_len, cfg.batches, sums, counts, thin, traj, pos)
    sizes = np.r_[np.full(m, cfg.n_row), np.full(n, cfg.n_col)]
    freq = sums / counts[:, None] / sizes
    overall = sums.sum(axis=0) / counts.sum() / sizes
    se = freq.std(axis=0, ddof=1) / np.sqrt(cfg.batches)
    return MoranEstimate(
        overall[:m], overall[m:], se[:m], se[m:], cfg, g.row_names, g.col_names,
        traj[:pos] if thin else None, freq,
    )


@dataclass
class PhiMoranComparison:
    phi: np.ndarray
    deviation: np.ndarray  # abundance - 1/m
    std_error: np.ndarray
    sign_agree: np.ndarray
    separated: np.ndarray  # |deviation| >= 3 standard errors
    status: list
    ordering_agree: bool


def phi_vs_moran_report(g: Game, cfg: MoranConfig = MoranConfig(), side: Side = Side.ROW,
                        estimate: Optional[MoranEstimate] = None) -> PhiMoranComparison:
    """Compare the sign and order of phi with simulated abundances.

    A strategy's status is ``agree`` (signs match, 3-sigma separated),
    ``neutral`` (phi is 0 and the deviation is within noise), ``unresolved``
    (within noise although phi is not 0) or ``disagree``.
    """
    if cfg.delta * payoff_range(g) > WEAK_SELECTION_LIMIT:
        warnings.warn(
            f"delta * payoff range = {cfg.delta * payoff_range(g):.3g} exceeds "
            f"{WEAK_SELECTION_LIMIT}; phi is a weak-selection prediction",
            WeakSelectionWarning,
            stacklevel=2,
        )
    if cfg.n_row != cfg.n_col:
        warnings.warn("phi assumes equal population sizes", WeakSelectionWarning, stacklevel=2)
    est = estimate if estimate is not None else moran_simulate(g, cfg)
    phi = phi_assessment(g, side)
    ab = est.abundance(side)
    se = est.std_error(side)
    dev = ab - 1.0 / ab.size
    separated = np.abs(dev) >= 3 * se
    sign_agree = np.sign(dev) == np.sign(phi)
    status = []
    for f, s, ok in zip(phi, separated, sign_agree):
        if f == 0:
            status.append("disagree" if s else "neutral")
        elif not s:
            status.append("unresolved")
        else:
            status.append("agree" if ok else "disagree")
    ordering = abundance_order(dev).order == abundance_order(phi).order
    return PhiMoranComparison(phi, dev, se, sign_agree, separated, status, ordering)
