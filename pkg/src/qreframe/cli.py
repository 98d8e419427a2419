"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import functools
import hashlib
import json
import secrets
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .evolution import MoranConfig, abundance_order, moran_simulate, phi_assessment, selection_favors
from .framing import ASSESSORS, AssessorError, frame_sensitivity, get_assessor
from .games import GameError, Side, gen_coordination, gen_coordination_eps, gen_travelers, load_game, save_game
from .qre import limit_equilibrium, trace_branch

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(Exception):
    pass


class NumericalFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_game(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return load_game(text), hashlib.sha256(text.encode("utf-8")).hexdigest()
    except GameError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _pop(value: str):
    try:
        parts = [int(x) for x in value.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N_R,N_C, got {value!r}")
    if len(parts) == 1:
        parts *= 2
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected N_R,N_C, got {value!r}")
    return tuple(parts)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def trace_summary(trace) -> dict:
    lim = limit_equilibrium(trace)
    return {
        "terminal_lambda": trace.terminal_lambda,
        "p_row": lim.profile.p_row.tolist(),
        "p_col": lim.profile.p_col.tolist(),
        "label": lim.label,
        "samples": len(trace),
        "ok": trace.ok,
    }


def cmd_qre_trace(args) -> int:
    g, _ = _read_game(args.game)
    trace = trace_branch(g, args.lambda_max)
    if args.out:
        Path(args.out).write_text(trace.to_csv(), encoding="utf-8")
    sys.stdout.write(_dumps(trace_summary(trace)))
    if not trace.ok:
        raise NumericalFailure(trace.message)
    return EXIT_OK


def assessment_summary(g, method: str, side: Side, lam: float, lambda_max) -> dict:
    if method == "phi":
        values = phi_assessment(g, side)
    else:
        values = get_assessor(method, lam=lam, lambda_max=lambda_max)(g, side)
    names = g.names(side)
    rank = abundance_order(values)
    return {
        "method": method,
        "side": side.value,
        "strategies": list(names),
        "assessment": values.tolist(),
        "favored": [names[i] for i in np.flatnonzero(selection_favors(values))],
        "order": [names[i] for i in rank.order],
        "ties": [[names[i] for i in t] for t in rank.ties],
    }


def cmd_assess(args) -> int:
    g, _ = _read_game(args.game)
    try:
        out = assessment_summary(g, args.method, Side.parse(args.side), args.lam, args.lambda_max)
    except RuntimeError as exc:
        raise NumericalFailure(str(exc)) from exc
    _emit(_dumps(out), args.out)
    return EXIT_OK


def cmd_moran(args) -> int:
    g, digest = _read_game(args.game)
    seed = args.seed
    if seed is None:
        seed = secrets.randbits(63)
        print(f"seed: {seed}", file=sys.stderr)
    cfg = MoranConfig(
        n_row=args.pop[0], n_col=args.pop[1], delta=args.delta, mutation=args.mutation,
        steps=args.steps, burn_in=args.burn_in, seed=seed, batches=args.batches,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    est = moran_simulate(g, cfg, thin=args.thin if args.trajectory else None)
    manifest = {
        "command": "moran",
        "parameters": {"game": str(args.game), "thin": args.thin, "trajectory": args.trajectory},
        "config": est.summary()["config"],
        "seed": seed,
        "version": __version__,
        "input_sha256": {str(args.game): digest},
    }
    if args.trajectory:
        Path(args.trajectory).write_text(est.trajectory_csv(), encoding="utf-8")
    _emit(_dumps({"manifest": manifest, "estimate": est.summary()}), args.out)
    return EXIT_OK


def cmd_frame(args) -> int:
    g, _ = _read_game(args.game)
    assessor = get_assessor(args.method, lam=args.lam, lambda_max=args.lambda_max)
    try:
        report = frame_sensitivity(assessor, g, args.max_dups)
    except AssessorError as exc:
        raise NumericalFailure(str(exc)) from exc
    _emit(report.to_json(), args.out)
    if args.table:
        sys.stderr.write(report.table())
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        if args.kind == "coordination":
            g = gen_coordination(args.x, args.n_outside)
        elif args.kind == "coordination-eps":
            g = gen_coordination_eps(args.x, args.eps)
        else:
            g = gen_travelers(args.lo, args.hi, args.reward)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(save_game(g), args.out)
    return EXIT_OK


@functools.lru_cache(maxsize=None)
def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qreframe", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("qre-trace", help="trace the principal logit branch")
    s.add_argument("--game", required=True)
    s.add_argument("--lambda-max", type=float, default=None)
    s.add_argument("--out", help="branch CSV path")
    s.set_defaults(func=cmd_qre_trace)

    s = sub.add_parser("assess", help="evaluate an assessment")
    s.add_argument("--game", required=True)
    s.add_argument("--method", choices=("phi", "qre-at-lambda", "qre-terminal", "nash-argmax"), default="phi")
    s.add_argument("--side", choices=("row", "col"), default="row")
    s.add_argument("--lambda", dest="lam", type=float, default=0.02)
    s.add_argument("--lambda-max", type=float, default=None)
    s.add_argument("--out")
    s.set_defaults(func=cmd_assess)

    s = sub.add_parser("moran", help="simulate the two-population Moran process")
    s.add_argument("--game", required=True)
    d = MoranConfig()
    s.add_argument("--pop", type=_pop, default=(d.n_row, d.n_col))
    s.add_argument("--delta", type=float, default=d.delta)
    s.add_argument("--mutation", type=float, default=d.mutation)
    s.add_argument("--steps", type=int, default=d.steps)
    s.add_argument("--burn-in", type=int, default=d.burn_in)
    s.add_argument("--batches", type=int, default=d.batches)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--thin", type=int, default=1000)
    s.add_argument("--trajectory", help="thinned trajectory CSV path")
    s.add_argument("--out", help="summary JSON path")
    s.set_defaults(func=cmd_moran)

    s = sub.add_parser("frame", help="measure framing sensitivity")
    s.add_argument("--game", required=True)
    s.add_argument("--method", choices=ASSESSORS, default="phi")
    s.add_argument("--max-dups", type=int, default=1)
    s.add_argument("--lambda", dest="lam", type=float, default=0.02)
    s.add_argument("--lambda-max", type=float, default=None)
    s.add_argument("--table", action="store_true", help="also print a table to stderr")
    s.add_argument("--out")
    s.set_defaults(func=cmd_frame)

    s = sub.add_parser("gen", help="write a generated game file")
    s.add_argument("kind", choices=("coordination", "coordination-eps", "travelers"))
    s.add_argument("--x", type=float, default=160.0)
    s.add_argument("--n-outside", type=int, default=1)
    s.add_argument("--eps", type=float, default=1.0)
    s.add_argument("--lo", type=int, default=180)
    s.add_argument("--hi", type=int, default=300)
    s.add_argument("--reward", type=float, default=5.0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
