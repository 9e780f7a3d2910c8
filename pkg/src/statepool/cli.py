"""Command-line entry point.

Subcommands: compat-classical, compat-quantum, pool-classical,
pool-quantum, suffstat, scenario-run, scenario-batch, randgen.

Exit codes: 0 success, 1 domain error (incompatible states, non-Hermitian
pooling product, ...) with a machine-readable {"error": ...} payload,
2 malformed input.  All numeric output uses 17 significant digits and
carries no timestamps, so identical invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io
from .compatibility import (
    ConditionalDistribution,
    classical_compatible,
    quantum_compatible,
)
from .errors import StatePoolError
from .io import MalformedInputError
from .linalg import DEFAULT_HERM_TOL, DEFAULT_RANK_TOL, Subspace
from .pooling import classical_pool, minimal_sufficient_statistic, quantum_pool
from .scenario import batch_report, random_instance, run_scenario


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInputError(f"{path}: {exc}") from exc


def _write(payload, path: str) -> None:
    text = io.dumps(payload)
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _verdict_payload(verdict) -> dict:
    out = {"compatible": verdict.compatible,
           "intersection_rank": verdict.intersection_rank(),
           "diagnostics": verdict.diagnostics}
    if not isinstance(verdict.intersection, Subspace):
        out["shared_outcomes"] = list(verdict.intersection)
    return out


def _cmd_compat_classical(args) -> int:
    q1 = io.distribution_from_json(_read_json(args.q1))
    q2 = io.distribution_from_json(_read_json(args.q2))
    verdict = classical_compatible(q1, q2)
    _write(_verdict_payload(verdict), args.output)
    return 0 if verdict.compatible else 1


def _cmd_compat_quantum(args) -> int:
    s1 = io.matrix_from_json(_read_json(args.s1))
    s2 = io.matrix_from_json(_read_json(args.s2))
    verdict = quantum_compatible(s1, s2, rank_tol=args.rank_tol)
    _write(_verdict_payload(verdict), args.output)
    return 0 if verdict.compatible else 1


def _cmd_pool_classical(args) -> int:
    prior = io.distribution_from_json(_read_json(args.prior))
    q1 = io.distribution_from_json(_read_json(args.q1))
    q2 = io.distribution_from_json(_read_json(args.q2))
    report = classical_pool(prior, q1, q2)
    _write(io.pooling_report_to_json(report), args.output)
    return 0


def _cmd_pool_quantum(args) -> int:
    prior = io.matrix_from_json(_read_json(args.prior))
    s1 = io.matrix_from_json(_read_json(args.s1))
    s2 = io.matrix_from_json(_read_json(args.s2))
    report = quantum_pool(prior, s1, s2, rank_tol=args.rank_tol, herm_tol=args.herm_tol)
    _write(io.pooling_report_to_json(report), args.output)
    return 0


def _cmd_suffstat(args) -> int:
    obj = _read_json(args.table)
    try:
        cond = ConditionalDistribution(
            tuple(obj["given_outcomes"]),
            tuple(obj["out_outcomes"]),
            np.asarray(obj["table"], dtype=float),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(f"bad conditional table: {exc}") from exc
    stat = minimal_sufficient_statistic(cond)
    _write({"classes": [sorted(c) for c in stat.classes]}, args.output)
    return 0


def _cmd_scenario_run(args) -> int:
    cfg = io.scenario_config_from_json(_read_json(args.config))
    if args.rank_tol is not None or args.herm_tol is not None:
        from dataclasses import replace

        cfg = replace(
            cfg,
            rank_tol=args.rank_tol if args.rank_tol is not None else cfg.rank_tol,
            herm_tol=args.herm_tol if args.herm_tol is not None else cfg.herm_tol,
        )
    res = run_scenario(cfg)
    _write(io.scenario_result_to_json(res), args.output)
    return 0


def _cmd_scenario_batch(args) -> int:
    rows = batch_report(
        dims=args.dim,
        count=args.count,
        noise_grid=args.noise,
        seed=args.seed,
        generator=args.generator,
    )
    _write({"seed": args.seed, "generator": args.generator, "rows": rows}, args.output)
    return 0


def _cmd_randgen(args) -> int:
    cfg = random_instance(args.dim, args.seed, args.noise)
    _write(io.scenario_config_to_json(cfg), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statepool",
        description="Compatibility and pooling of quantum state assignments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        p.add_argument("--output", default="-", help="output path, - for stdout")
        return p

    p = add("compat-classical", _cmd_compat_classical,
            "decide compatibility of two classical distributions")
    p.add_argument("q1")
    p.add_argument("q2")

    p = add("compat-quantum", _cmd_compat_quantum,
            "decide compatibility of two density matrices")
    p.add_argument("s1")
    p.add_argument("s2")
    p.add_argument("--rank-tol", dest="rank_tol", type=float, default=DEFAULT_RANK_TOL)

    p = add("pool-classical", _cmd_pool_classical, "pool two classical posteriors")
    p.add_argument("prior")
    p.add_argument("q1")
    p.add_argument("q2")

    p = add("pool-quantum", _cmd_pool_quantum, "pool two quantum posteriors")
    p.add_argument("prior")
    p.add_argument("s1")
    p.add_argument("s2")
    p.add_argument("--rank-tol", dest="rank_tol", type=float, default=DEFAULT_RANK_TOL)
    p.add_argument("--herm-tol", dest="herm_tol", type=float, default=DEFAULT_HERM_TOL)

    p = add("suffstat", _cmd_suffstat,
            "minimal sufficient statistic of a conditional table P(X|Y)")
    p.add_argument("table")

    p = add("scenario-run", _cmd_scenario_run, "run a two-agent scenario config")
    p.add_argument("config")
    p.add_argument("--rank-tol", dest="rank_tol", type=float, default=None)
    p.add_argument("--herm-tol", dest="herm_tol", type=float, default=None)

    p = add("scenario-batch", _cmd_scenario_batch,
            "batch compatibility/pooling statistics over random instances")
    p.add_argument("--dim", type=int, nargs="+", default=[2])
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--noise", type=float, nargs="+", default=[0.5])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--generator", choices=["random", "adversarial"], default="random")

    p = add("randgen", _cmd_randgen, "generate a random scenario config")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.5)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, which matches our malformed-input code
        return int(exc.code) if exc.code else 0
    try:
        return args.fn(args)
    except MalformedInputError as exc:
        sys.stdout.write(io.dumps({"error": "malformed_input", "message": str(exc)}))
        return 2
    except StatePoolError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if hasattr(exc, "residual"):
            payload["residual"] = exc.residual
        if "Incompatible" in type(exc).__name__:
            payload["compatible"] = False
        sys.stdout.write(io.dumps(payload))
        return 1


if __name__ == "__main__":
    sys.exit(main())
