"""Logit quantal response equilibria.

The logit map sends expected payoffs ``u`` to choice probabilities
``softmax(lam * u)``.  A logit equilibrium at rationality ``lam`` is a fixed
point of the joint map ``(p, q) -> (sigma(lam A q), sigma(lam B^T p))``.
:func:`trace_branch` follows the branch of such fixed points that starts at
the centroid for ``lam = 0``.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .games import Game, MixedProfile, payoff_range

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000
DEFAULT_DAMPING = 0.5
NEWTON_SWITCH = 1e-4
DEFAULT_PURITY = 0.99
UNDECIDED = "mixed/undecided at lambda_max"

ResponseMap = Callable[[np.ndarray, float], np.ndarray]


def logit_response(u, lam: float) -> np.ndarray:
    """Softmax of ``lam * u`` in max-shifted form."""
    z = lam * np.asarray(u, dtype=float)
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def logit_jacobian(u, lam: float) -> np.ndarray:
    """Derivative of :func:`logit_response` with respect to ``u``."""
    s = logit_response(u, lam)
    return lam * (np.diag(s) - np.outer(s, s))


def default_lambda_max(g: Game) -> float:
    """Rationality at which ``lam * payoff_range`` is about 50."""
    r = payoff_range(g)
    return 50.0 / r if r > 0 else 50.0


@dataclass(frozen=True)
class FixedPointResult:
    profile: MixedProfile
    residual: float
    iterations: int
    converged: bool = True


def _split(z, m):
    return z[:m], z[m:]


def joint_response(g: Game, lam: float, z: np.ndarray, response: ResponseMap = logit_response) -> np.ndarray:
    p, q = _split(z, g.m)
    return np.concatenate([response(g.a @ q, lam), response(g.b.T @ p, lam)])


def fixed_point_residual(g: Game, lam: float, profile: MixedProfile, response: ResponseMap = logit_response) -> float:
    """Sup-norm of ``p - sigma(u(p))`` over both players."""
    z = np.concatenate([profile.p_row, profile.p_col])
    return float(np.max(np.abs(joint_response(g, lam, z, response) - z)))


def _newton_step(g: Game, lam: float, z: np.ndarray, r: np.ndarray) -> np.ndarray:
    m, n = g.shape
    p, q = _split(z, m)
    jac = np.zeros((m + n, m + n))
    jac[:m, m:] = logit_jacobian(g.a @ q, lam) @ g.a
    jac[m:, :m] = logit_jacobian(g.b.T @ p, lam) @ g.b.T
    return np.linalg.solve(np.eye(m + n) - jac, r)


def solve_fixed_point(
    g: Game,
    lam: float,
    init: Optional[MixedProfile] = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    damping: float = DEFAULT_DAMPING,
    newton: bool = True,
    response: ResponseMap = logit_response,
) -> FixedPointResult:
    """Find a logit equilibrium at rationality `lam`.

    Runs the damped iteration ``z <- (1 - damping) z + damping * sigma(u(z))``
    from `init` (default: centroid) and switches to Newton steps on
    ``z - sigma(u(z))`` once the residual drops below 1e-4.  A Newton step is
    only accepted if it keeps every probability positive and lowers the
    residual.  Newton needs the logit Jacobian, so it is disabled for custom
    response maps.

    On non-convergence the best iterate is returned with ``converged=False``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if lam < 0 or not np.isfinite(lam):
        raise ValueError("lam must be finite and >= 0")
    init = init or MixedProfile.centroid(g.m, g.n)
    use_newton = newton and response is logit_response
    z = np.concatenate([init.p_row, init.p_col])
    best_z, best_res = z, np.inf
    it = 0
    while True:
        r = joint_response(g, lam, z, response) - z
        res = float(np.max(np.abs(r)))
        if res < best_res:
            best_z, best_res = z, res
        if res <= tol or it >= max_iter:
            break
        it += 1
        if use_newton and res < NEWTON_SWITCH:
            try:
                z_new = z + _newton_step(g, lam, z, r)
            except np.linalg.LinAlgError:
                z_new = None
            if z_new is not None and np.all(z_new > 0):
                res_new = float(np.max(np.abs(joint_response(g, lam, z_new, response) - z_new)))
                if res_new < res:
                    z = z_new
                    continue
        z = z + damping * r
    p, q = _split(best_z, g.m)
    return FixedPointResult(MixedProfile(p, q), best_res, it, best_res <= tol)


@dataclass
class BranchTrace:
    """Accepted samples along the principal branch, in increasing lambda."""

    lambdas: list = field(default_factory=list)
    profiles: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    row_names: tuple = ()
    col_names: tuple = ()
    ok: bool = True
    message: str = ""

    def append(self, lam, profile, residual):
        self.lambdas.append(float(lam))
        self.profiles.append(profile)
        self.residuals.append(float(residual))

    @property
    def samples(self):
        return list(zip(self.lambdas, self.profiles, self.residuals))

    @property
    def terminal_profile(self) -> MixedProfile:
        return self.profiles[-1]

    @property
    def terminal_lambda(self) -> float:
        return self.lambdas[-1]

    def __len__(self):
        return len(self.lambdas)

    def to_csv(self) -> str:
        """CSV with header ``lambda,pR_1..pR_m,pC_1..pC_n,residual``."""
        m = len(self.profiles[0].p_row)
        n = len(self.profiles[0].p_col)
        header = ["lambda"] + [f"pR_{i + 1}" for i in range(m)] + [f"pC_{j + 1}" for j in range(n)] + ["residual"]
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for lam, prof, res in self.samples:
            vals = [lam, *prof.p_row, *prof.p_col, res]
            buf.write(",".join(format(float(v), ".17g") for v in vals) + "\n")
        return buf.getvalue()


def _is_near_vertex(profile: MixedProfile, purity: float) -> bool:
    return profile.p_row.max() >= purity and profile.p_col.max() >= purity


def trace_branch(
    g: Game,
    lambda_max: Optional[float] = None,
    *,
    tol: float = DEFAULT_TOL,
    purity: float = DEFAULT_PURITY,
    stop_at_pure: bool = True,
    initial_step: Optional[float] = None,
    max_step: Optional[float] = None,
    jump: float = 0.2,
    easy_iters: int = 10,
    hard_iters: int = 50,
    max_halvings: int = 40,
    max_iter: int = DEFAULT_MAX_ITER,
) -> BranchTrace:
    """Follow the logit equilibrium branch from the centroid at ``lam = 0``.

    Natural-parameter continuation in lambda: each corrector solve is warm
    started from the previous accepted profile.  Steps double after easy
    solves (fewer than `easy_iters` iterations) and halve after hard ones.
    A step is rejected and retried at half size when the corrector fails or
    the profile moves more than `jump` in sup norm.  Tracing stops at
    `lambda_max` or, if `stop_at_pure`, once both players put at least
    `purity` on a single strategy.  If a step cannot be completed after
    `max_halvings` refinements the trace is returned with ``ok=False``.
    """
    if lambda_max is None:
        lambda_max = default_lambda_max(g)
    if lambda_max < 0:
        raise ValueError("lambda_max must be >= 0")
    trace = BranchTrace(row_names=g.row_names, col_names=g.col_names)
    start = MixedProfile.centroid(g.m, g.n)
    trace.append(0.0, start, fixed_point_residual(g, 0.0, start))
    if lambda_max == 0:
        return trace

    step = initial_step if initial_step is not None else 1e-3 * lambda_max
    max_step = max_step if max_step is not None else lambda_max / 20
    min_step = step * 2.0 ** -max_halvings
    lam, prof = 0.0, start
    while lam < lambda_max:
        if stop_at_pure and _is_near_vertex(prof, purity):
            break
        h = min(step, lambda_max - lam)
        target = lambda_max if h == lambda_max - lam else lam + h
        res = solve_fixed_point(g, target, prof, tol=tol, max_iter=max_iter)
        moved = max(np.max(np.abs(res.profile.p_row - prof.p_row)), np.max(np.abs(res.profile.p_col - prof.p_col)))
        if not res.converged or moved > jump:
            step = h / 2
            if step < min_step:
                trace.ok = False
                trace.message = f"corrector failed near lambda={lam:.6g} (residual {res.residual:.3g})"
                break
            continue
        lam, prof = target, res.profile
        trace.append(lam, prof, res.residual)
        if res.iterations < easy_iters:
            step = min(2 * h, max_step)
        elif res.iterations > hard_iters:
            step = h / 2
        else:
            step = h
    return trace


class LimitEquilibrium(NamedTuple):
    profile: MixedProfile
    label: str
    pure: Optional[tuple]


def limit_equilibrium(trace: BranchTrace, purity: float = DEFAULT_PURITY) -> LimitEquilibrium:
    """Terminal profile of `trace` and, if it is near a vertex, its pure label."""
    if len(trace) == 0:
        raise ValueError("empty trace")
    prof = trace.terminal_profile
    if not _is_near_vertex(prof, purity):
        return LimitEquilibrium(prof, UNDECIDED, None)
    i, j = int(np.argmax(prof.p_row)), int(np.argmax(prof.p_col))
    rn = trace.row_names or tuple(f"R{k + 1}" for k in range(len(prof.p_row)))
    cn = trace.col_names or tuple(f"C{k + 1}" for k in range(len(prof.p_col)))
    return LimitEquilibrium(prof, f"({rn[i]},{cn[j]})", (i, j))
