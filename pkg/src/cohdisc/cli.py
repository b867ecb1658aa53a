"""Command-line front end.

State files are JSON::

    {"dims": [2, 2], "matrix": [[[re, im], ...], ...]}

Basis files hold ``{"locals": [matrix, ...]}`` with one matrix per subsystem,
columns being basis vectors.  Unitary files hold ``{"matrix": ...}`` and
phase files ``{"phases": [...]}`` (radians).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .measures import (
    OptimizerConfig, asym_discord, coherence, global_discord, rel_entropy_discord,
)
from .protocols import (
    DQC1Config, StatePrepConfig, dqc1_report, stateprep_bound_series, summarize,
    verify_result, werner_demo,
)
from .qcore import InvariantError, ProductBasis, QState

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2
SEED_ENV = "COHERENCE_LEDGER_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- file formats -----------------------------------------------------------

def matrix_to_pairs(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]


def pairs_to_matrix(rows, what: str = "matrix") -> np.ndarray:
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{what}: entries must be [real, imaginary] pairs ({exc})")
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise UsageError(f"{what}: expected a square list of [real, imaginary] pairs, "
                         f"got array of shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})")


def load_state(path: str) -> QState:
    data = _read_json(path)
    if not isinstance(data, dict) or "dims" not in data or "matrix" not in data:
        raise UsageError(f"{path}: state file needs 'dims' and 'matrix'")
    mat = pairs_to_matrix(data["matrix"], path)
    dims = tuple(int(d) for d in data["dims"])
    if math.prod(dims) != mat.shape[0]:
        raise UsageError(f"{path}: dims {list(dims)} do not match matrix side {mat.shape[0]}")
    try:
        return QState(dims, mat)
    except InvariantError as exc:
        raise InvariantError(f"{path}: {exc}") from None


def save_state(s: QState, path: str) -> None:
    with open(path, "w") as fh:
        json.dump({"dims": list(s.dims), "matrix": matrix_to_pairs(s.mat)}, fh)


def load_basis(path: str) -> ProductBasis:
    data = _read_json(path)
    if not isinstance(data, dict) or "locals" not in data:
        raise UsageError(f"{path}: basis file needs 'locals'")
    try:
        return ProductBasis(tuple(pairs_to_matrix(m, path) for m in data["locals"]))
    except InvariantError as exc:
        raise InvariantError(f"{path}: {exc}") from None


def load_unitary(path: str) -> np.ndarray:
    data = _read_json(path)
    if not isinstance(data, dict) or "matrix" not in data:
        raise UsageError(f"{path}: unitary file needs 'matrix'")
    return pairs_to_matrix(data["matrix"], path)


def load_phases(path: str) -> np.ndarray:
    data = _read_json(path)
    phases = data.get("phases") if isinstance(data, dict) else data
    try:
        return np.asarray(phases, dtype=float).ravel()
    except (TypeError, ValueError):
        raise UsageError(f"{path}: phases must be a list of numbers")


def named_unitary(name: str, n: int) -> np.ndarray:
    if name == "identity":
        return np.eye(2 ** n)
    if name == "sigmaz":
        # Z on the first register qubit
        return np.kron(np.diag([1.0, -1.0]), np.eye(2 ** (n - 1)))
    raise UsageError(f"unknown named unitary {name!r}")


def fmt(x: float) -> str:
    return format(float(x), ".12g")


# --- commands ---------------------------------------------------------------

def _opt(args) -> OptimizerConfig:
    kw = {"seed": args.seed}
    if getattr(args, "grid", None) is not None:
        kw["grid_points_per_angle"] = args.grid
    if getattr(args, "starts", None) is not None:
        kw["multistarts"] = args.starts
    try:
        return OptimizerConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_coh(args, out):
    s = load_state(args.state)
    b = load_basis(args.basis) if args.basis else None
    value = coherence(s, b)
    print(float(fmt(value)), file=out)
    return {"coherence": value, "basis": "supplied" if b else "computational"}, EXIT_OK


def cmd_discord(args, out):
    s = load_state(args.state)
    cfg = _opt(args)
    if args.mode == "global":
        res = global_discord(s, cfg)
    elif args.mode == "relent":
        res = rel_entropy_discord(s, cfg)
    else:
        if not args.a_indices:
            raise UsageError("--mode asym needs --a-indices")
        try:
            a = [int(x) for x in args.a_indices.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"--a-indices must be comma-separated integers, got {args.a_indices!r}")
        res = asym_discord(s, a, cfg)
    print(f"discord ({args.mode}): {fmt(res.value)}", file=out)
    print(f"evaluations: {res.evaluations}", file=out)
    payload = {"mode": args.mode, "value": res.value, "evaluations": res.evaluations,
               "heuristic": res.heuristic,
               "argmin_basis": [matrix_to_pairs(u) for u in res.argmin_basis.locals]}
    return payload, EXIT_OK


STATEPREP_COLUMNS = ("l", "global_discord", "bound_rhs", "deltaC_control")


def stateprep_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(STATEPREP_COLUMNS)
    for r in reports:
        w.writerow([r.detail["l"], fmt(r.lhs), fmt(r.rhs), fmt(r.detail["deltaC_control"])])
    return buf.getvalue()


def cmd_stateprep(args, out):
    try:
        cfg = StatePrepConfig(args.n, args.p, args.theta)
        reports = stateprep_bound_series(cfg, _opt(args), upto=args.upto)
    except ValueError as exc:
        raise UsageError(str(exc))
    payload = {"series": [r.to_dict() for r in reports]}
    if args.format == "csv":
        text = stateprep_csv(reports)
    else:
        text = json.dumps(_report("stateprep", args, payload), indent=2, sort_keys=True)
    with open(args.out, "w") as fh:
        fh.write(text)
    bad = [r for r in reports if r.violated]
    print(f"wrote {len(reports)} rows to {args.out}; violations: {len(bad)}", file=out)
    return payload, EXIT_VIOLATION if bad else EXIT_OK


def cmd_werner(args, out):
    if not 0 <= args.p <= 1:
        raise UsageError(f"--p must lie in [0, 1], got {args.p}")
    rep = werner_demo(args.p, _opt(args))
    print(f"discord: {fmt(rep.lhs)}", file=out)
    print(f"coherence of |+>: {fmt(rep.rhs)}", file=out)
    print(f"slack: {fmt(rep.slack)}", file=out)
    print(f"negativity: {fmt(rep.detail['negativity'])}", file=out)
    return rep.to_dict(), EXIT_VIOLATION if rep.violated else EXIT_OK


def cmd_dqc1(args, out):
    n = args.n
    if n < 1:
        raise UsageError("--n must be >= 1")
    if args.unitary:
        u = load_unitary(args.unitary)
    elif args.diag_phases:
        ph = load_phases(args.diag_phases)
        if ph.size != 2 ** n:
            raise UsageError(f"expected {2 ** n} phases, got {ph.size}")
        u = np.diag(np.exp(1j * ph))
    else:
        u = named_unitary(args.named, n)
    try:
        cfg = DQC1Config(n, u, args.seed)
    except ValueError as exc:
        if isinstance(exc, InvariantError):
            raise
        raise UsageError(str(exc))
    rep = dqc1_report(cfg, _opt(args))
    t = rep.trace_estimate
    print(f"trace estimate: {fmt(t.real)} {'+' if t.imag >= 0 else '-'} {fmt(abs(t.imag))}i",
          file=out)
    print(f"deltaC (simulated): {fmt(rep.delta_c)}", file=out)
    print(f"deltaC (closed form): {fmt(rep.delta_c_closed_form)}", file=out)
    label = "" if rep.global_optimized else " (reference-basis upper bound)"
    print(f"global discord{label}: {fmt(rep.global_bound.lhs)}", file=out)
    print(f"asymmetric discord: {fmt(rep.asym_bound.lhs)}", file=out)
    bad = rep.global_bound.violated or rep.asym_bound.violated
    return rep.to_dict(), EXIT_VIOLATION if bad else EXIT_OK


def cmd_verify(args, out):
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    opt = None
    if args.grid is not None or args.starts is not None:
        opt = _opt(args)
    reports = verify_result(args.result, args.trials, args.seed, opt)
    summary = summarize(reports)
    print(f"trials: {summary['trials']}", file=out)
    print(f"min slack: {fmt(summary['min_slack'])}", file=out)
    print(f"violations: {summary['violations']}", file=out)
    payload = {"summary": summary, "reports": [r.to_dict() for r in reports]}
    return payload, EXIT_VIOLATION if summary["violations"] else EXIT_OK


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _report(command: str, args, payload) -> dict:
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "report", "command", "_argv")}
    return {"command": command, "argv": args._argv, "seed": args.seed, "config": config,
            "result": payload, "version": __version__}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cohdisc", description="Coherence and discord toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, optimizer=False):
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--report", metavar="PATH", help="write a JSON report here")
        if optimizer:
            sp.add_argument("--grid", type=int, default=None, help="grid points per angle")
            sp.add_argument("--starts", type=int, default=None, help="multistart count")

    sp = sub.add_parser("coh", help="relative entropy of coherence")
    sp.add_argument("--state", required=True)
    sp.add_argument("--basis")
    common(sp)
    sp.set_defaults(func=cmd_coh)

    sp = sub.add_parser("discord", help="minimized discord")
    sp.add_argument("--state", required=True)
    sp.add_argument("--mode", choices=("global", "asym", "relent"), required=True)
    sp.add_argument("--a-indices", default=None, help="comma-separated, e.g. 0 or 0,2")
    common(sp, optimizer=True)
    sp.set_defaults(func=cmd_discord)

    sp = sub.add_parser("stateprep", help="controlled-Z preparation bound series")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--theta", type=float, required=True, help="radians")
    sp.add_argument("--upto", type=int, default=None)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    common(sp, optimizer=True)
    sp.set_defaults(func=cmd_stateprep)

    sp = sub.add_parser("werner", help="discord without entanglement from a noisy CNOT")
    sp.add_argument("--p", type=float, required=True)
    common(sp, optimizer=True)
    sp.set_defaults(func=cmd_werner)

    sp = sub.add_parser("dqc1", help="one-clean-qubit trace estimation")
    sp.add_argument("--n", type=int, required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--unitary")
    g.add_argument("--diag-phases")
    g.add_argument("--named", choices=("identity", "sigmaz"))
    common(sp, optimizer=True)
    sp.set_defaults(func=cmd_dqc1)

    sp = sub.add_parser("verify", help="randomized bound checks")
    sp.add_argument("--result", type=int, choices=(1, 2, 3), required=True)
    sp.add_argument("--trials", type=int, required=True)
    common(sp, optimizer=True)
    sp.set_defaults(func=cmd_verify)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        args._argv = argv
        if args.seed is None:
            args.seed = _default_seed()
        payload, code = args.func(args, out)
        if args.report:
            with open(args.report, "w") as fh:
                json.dump(_report(args.command, args, payload), fh, indent=2, sort_keys=True)
        return code
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=err)
        return EXIT_VIOLATION
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
