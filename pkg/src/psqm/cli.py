"""Deterministic command-line harness.

Four subcommands: ``run`` executes a protocol on given or enumerated
inputs, ``verify`` runs the full check suite, ``bound`` evaluates the
combinatorial quantities on a function table, ``stats`` samples random
small tables.  Every command writes one canonical JSON report (sorted
keys, floats rounded to 12 significant digits) to --out or stdout, so
re-runs with the same seed are byte-identical; wall-clock time and a
human summary go to stderr.  Exit codes: 0 all checks passed, 1 a check
failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__, bounds, verify
from .protocols import PROMISE_VIOLATION, dj_protocol, geq_protocol, sum2_protocol


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psqm",
        description="simulate, verify and bound small private simultaneous-message protocols",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--protocol", choices=["sum2", "geq", "dj"])
        p.add_argument("--k", type=int, help="number of parties (sum2, geq)")
        p.add_argument("--l", type=int, help="number of blocks (geq)")
        p.add_argument("--n", type=int, help="input length (dj) or table size (stats)")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--seed", type=int)
        p.add_argument("--budget", type=int, default=verify.DEFAULT_BUDGET)
        p.add_argument("--out", help="write the JSON report here instead of stdout")

    p_run = sub.add_parser("run", help="execute one protocol")
    common(p_run)
    p_run.add_argument("--inputs", help="comma-separated per-party bit strings")

    p_verify = sub.add_parser("verify", help="run the full check suite")
    common(p_verify)

    p_bound = sub.add_parser("bound", help="combinatorial quantities of a table")
    common(p_bound)
    p_bound.add_argument("--table", help="path to a function-table JSON file")

    p_stats = sub.add_parser("stats", help="random small-table statistics")
    common(p_stats)
    p_stats.add_argument("--trials", type=int)
    p_stats.add_argument("--exhaustive", action="store_true")
    return parser


def _canon(value):
    """JSON-safe copy with floats rounded to 12 significant digits."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isfinite(value):
            return float(f"{value:.12g}")
        return "inf" if value > 0 else "-inf"
    if isinstance(value, (np.floating, np.integer)):
        return _canon(value.item())
    if isinstance(value, dict):
        return {str(k): _canon(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canon(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_json(report: dict) -> str:
    return json.dumps(_canon(report), sort_keys=True, separators=(",", ":"))


def _emit(report: dict, out_path, checks, elapsed_ms: float):
    text = canonical_json(report)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    for check in checks:
        status = "PASS" if check["pass"] else "FAIL"
        if isinstance(check.get("witnesses"), dict) and "skipped" in check["witnesses"]:
            status = "SKIP"
        sys.stderr.write(f"{check['name']}: {status}\n")
    sys.stderr.write(f"elapsed_ms={elapsed_ms:.1f}\n")


def _build_protocol(args):
    if not args.protocol:
        raise ValueError("--protocol is required")
    if args.protocol == "sum2":
        if args.k is None:
            raise ValueError("sum2 needs --k")
        return sum2_protocol(args.k)
    if args.protocol == "geq":
        if args.k is None or args.l is None:
            raise ValueError("geq needs --k and --l")
        return geq_protocol(args.k, args.l)
    if args.n is None:
        raise ValueError("dj needs --n")
    return dj_protocol(args.n)


def _config_echo(args, keys) -> dict:
    return {key: getattr(args, key, None) for key in keys}


_PROTO_KEYS = ("protocol", "k", "l", "n", "tol", "seed", "budget")


def _record(name, passed, witnesses, coverage=None) -> dict:
    return {"name": name, "pass": passed, "witnesses": witnesses, "coverage": coverage}


def cmd_run(args) -> tuple[dict, list, tuple | None]:
    protocol = _build_protocol(args)
    if args.inputs is not None:
        requested = [tuple(args.inputs.split(","))]
        detailed = True
    else:
        if protocol.domain_size() > args.budget:
            raise ValueError(
                "input domain exceeds --budget; pass --inputs to pick runs"
            )
        requested = list(protocol.input_domain())
        detailed = False
    checks = []
    domain = protocol.resource.randomness_domain
    for inputs in requested:
        reference = protocol.reference(inputs)
        averaged: dict = {}
        min_mass = float("inf")
        per_randomness = []
        for r in domain:
            record = protocol.run(inputs, r)
            for out, prob in record.output_distribution.items():
                averaged[out] = averaged.get(out, 0.0) + prob / len(domain)
            if reference is not PROMISE_VIOLATION:
                min_mass = min(
                    min_mass, record.output_distribution.get(reference, 0.0)
                )
            if detailed:
                entry = {
                    "randomness": protocol.format_randomness(r),
                    "outcomes": record.outcome_distribution,
                    "outputs": {
                        protocol.format_output(o): p
                        for o, p in record.output_distribution.items()
                    },
                }
                if record.message_state is not None and record.message_state.dim <= 64:
                    entry["message_amplitudes"] = [
                        [amp.real, amp.imag] for amp in record.message_state.amplitudes
                    ]
                if record.message_distribution is not None:
                    entry["message_distribution"] = {
                        f"{a},{b}": p
                        for (a, b), p in record.message_distribution.items()
                    }
                per_randomness.append(entry)
        witnesses = {
            "reference": "promise-violation"
            if reference is PROMISE_VIOLATION
            else protocol.format_output(reference),
            "output_distribution": {
                protocol.format_output(o): p for o, p in averaged.items()
            },
            "randomness_values": len(domain),
        }
        if detailed:
            witnesses["per_randomness"] = per_randomness
        passed = (
            True
            if reference is PROMISE_VIOLATION
            else bool(min_mass >= 1.0 - args.tol)
        )
        checks.append(
            _record(
                f"run[{','.join(inputs)}]",
                passed,
                witnesses,
                f"randomness-exhaustive:{len(domain)}",
            )
        )
    config = _config_echo(args, _PROTO_KEYS) | {"inputs": args.inputs}
    return config, checks, protocol.cost()


def cmd_verify(args) -> tuple[dict, list, tuple | None]:
    protocol = _build_protocol(args)
    kwargs = dict(budget=args.budget, seed=args.seed)
    checks = []

    rep = verify.check_correctness(protocol, tol=args.tol, **kwargs)
    checks.append(
        _record("correctness", rep.passed, rep.witnesses(protocol), rep.coverage)
    )
    rep = verify.check_privacy(protocol, tol=args.tol, **kwargs)
    checks.append(
        _record("privacy", rep.passed, rep.witnesses(protocol), rep.coverage)
    )
    for party in range(protocol.party_count):
        rep = verify.check_weight_sums(protocol, party, tol=args.tol)
        checks.append(
            _record(
                f"weight_sums_party{party}",
                rep.passed,
                rep.witnesses(protocol),
                f"randomness-pairs:{rep.pair_count}",
            )
        )
    rep = verify.check_purity_bounds(protocol, **kwargs)
    checks.append(
        _record("purity_bounds", rep.passed, rep.witnesses(protocol), rep.coverage)
    )
    rep = verify.check_collision_bound(protocol, tol=args.tol, **kwargs)
    checks.append(
        _record("collision_bound", rep.passed, rep.witnesses(protocol), rep.coverage)
    )
    return _config_echo(args, _PROTO_KEYS), checks, verify.communication_cost(protocol)


def _load_table(args) -> bounds.FunctionTable:
    if args.table:
        with open(args.table, encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"malformed table file: {exc}") from exc
        return bounds.FunctionTable.from_json(payload)
    if args.protocol == "dj":
        if args.n is None:
            raise ValueError("dj table synthesis needs --n")
        return bounds.dj_table(args.n)
    raise ValueError("bound needs --table FILE or --protocol dj --n N")


def cmd_bound(args) -> tuple[dict, list, tuple | None]:
    table = _load_table(args)
    mu = bounds.InputDistribution.uniform_defined(table)
    checks = []

    try:
        nondeg = bounds.is_non_degenerate(table, mu)
        checks.append(_record("non_degenerate", True, {"value": nondeg}))
    except ValueError as exc:
        nondeg = None
        checks.append(
            _record("non_degenerate", True, {"value": None, "skipped": str(exc)})
        )

    alpha_result = None
    try:
        alpha_result = bounds.alpha(table, mu)
        witness = None
        if alpha_result.witness:
            first, second = alpha_result.witness
            witness = {
                "first": {"rows": list(first.rows), "cols": list(first.cols)},
                "second": {"rows": list(second.rows), "cols": list(second.cols)},
            }
        checks.append(
            _record(
                "alpha",
                True,
                {
                    "value": alpha_result.value,
                    "witness": witness,
                    "max_cells": alpha_result.max_cells,
                },
            )
        )
    except ValueError as exc:
        checks.append(_record("alpha", True, {"value": None, "skipped": str(exc)}))

    beta_value = bounds.beta(table, mu)
    checks.append(_record("beta", True, {"value": beta_value}))
    checks.append(_record("min_entropy", True, {"value": bounds.min_entropy(mu)}))

    if nondeg and alpha_result is not None and beta_value > 0:
        result = bounds.psqm_lower_bound(table, mu)
        checks.append(_record("lower_bound", True, {"value": result.value}))
    else:
        reason = (
            "table is degenerate or partial under mu"
            if not nondeg
            else "alpha enumeration refused"
            if alpha_result is None
            else "beta is zero"
        )
        checks.append(
            _record("lower_bound", True, {"value": None, "skipped": reason})
        )

    try:
        cliques = bounds.exact_smp_clique_sizes(table)
        checks.append(
            _record(
                "cliques",
                True,
                {
                    "row_clique_size": cliques.row_clique_size,
                    "col_clique_size": cliques.col_clique_size,
                    "row_clique": list(cliques.row_clique),
                    "col_clique": list(cliques.col_clique),
                },
            )
        )
    except ValueError as exc:
        checks.append(_record("cliques", True, {"value": None, "skipped": str(exc)}))

    config = _config_echo(args, _PROTO_KEYS) | {
        "table": args.table,
        "mu": "uniform-defined",
    }
    return config, checks, None


def cmd_stats(args) -> tuple[dict, list, tuple | None]:
    if args.n is None:
        raise ValueError("stats needs --n")
    if not args.exhaustive and args.trials is None:
        raise ValueError("stats needs --trials (or --exhaustive for n=1)")
    summary = bounds.random_function_stats(
        args.n, args.trials or 0, args.seed, exhaustive=args.exhaustive
    )
    checks = [
        _record("random_function_stats", True, summary, summary["coverage"])
    ]
    config = _config_echo(args, _PROTO_KEYS) | {
        "trials": args.trials,
        "exhaustive": args.exhaustive,
    }
    return config, checks, None


_COMMANDS = {
    "run": cmd_run,
    "verify": cmd_verify,
    "bound": cmd_bound,
    "stats": cmd_stats,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = time.perf_counter()
    try:
        config, checks, cost = _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    report = {
        "version": __version__,
        "config": {"command": args.command} | config,
        "checks": checks,
        "cost": {"value": cost[0], "unit": cost[1]} if cost else None,
    }
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    _emit(report, args.out, checks, elapsed_ms)
    return 0 if all(c["pass"] for c in checks) else 1


if __name__ == "__main__":
    sys.exit(main())
