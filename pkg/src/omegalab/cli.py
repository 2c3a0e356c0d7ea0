"""Batch experiment driver: omega-lab <subcommand> [flags].

Every subcommand is deterministic: all randomness flows from an explicit
seed, reports carry no timestamps, and rationals are rendered exactly, so
identical configurations produce byte-identical outputs.  Exit codes:
0 success, 1 an invariant violation was found, 2 usage or file errors,
3 unsupported parameter domain.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from . import diagonal, machines, randomness, reduction, series
from .dyadic import BitPrefix, prefix_of

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


def _emit_json(obj: dict, path: Optional[str]) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_text(path: Optional[str], text: str) -> None:
    if path:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def _apply_config(args: argparse.Namespace) -> None:
    """Apply key=value overrides from --config; config wins over flags."""
    if not getattr(args, "config", None):
        return
    with open(args.config, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{args.config}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            dest = key.replace("-", "_")
            if not hasattr(args, dest):
                raise ValueError(f"{args.config}:{lineno}: unknown key {key!r}")
            current = getattr(args, dest)
            if isinstance(current, bool):
                setattr(args, dest, value.lower() in ("1", "true", "yes"))
            elif isinstance(current, int):
                setattr(args, dest, int(value))
            else:
                setattr(args, dest, value)


def _make_g(args: argparse.Namespace) -> series.RedundancyFunction:
    eps = Fraction(args.eps) if getattr(args, "eps", None) else None
    if eps is not None and eps < 1:
        raise _DomainError("epsilon below 1 unsupported")
    return series.make_redundancy(args.g, eps)


class _DomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_reduce(args: argparse.Namespace) -> int:
    u = machines.MachineTable.load(args.u)
    v = machines.MachineTable.load(args.v)
    g = _make_g(args)
    oracle_ce = machines.as_left_ce(u)
    target_ce = machines.as_left_ce(v)
    max_stage = args.max_stage or (
        max(oracle_ce.stabilization_stage, target_ce.stabilization_stage) + 1
    )
    oracle = prefix_of(oracle_ce.limit, g.floor_eval(args.n_max))
    traces = [
        reduction.reduce(oracle, target_ce, oracle_ce, g, n, max_stage)
        for n in range(1, args.n_max + 1)
    ]
    violations = [
        tr.target_index
        for tr in traces
        if tr.oracle_bits_used != g.floor_eval(tr.target_index)
    ]
    n0 = reduction.eventual_correctness_threshold(
        target_ce, oracle_ce, g, args.n_max, max_stage
    )
    test = reduction.build_solovay_test(target_ce, oracle_ce, g, max_stage)
    _write_text(args.csv, reduction.traces_to_csv(traces, target_ce.limit))
    _emit_json(
        {
            "g": g.describe(),
            "n_max": args.n_max,
            "max_stage": max_stage,
            "threshold": n0,
            "settled": sum(tr.settled for tr in traces),
            "test_weight": series.format_rational(reduction.solovay_weight(test)),
            "use_bound_violations": violations,
        },
        args.json,
    )
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_partition(args: argparse.Namespace) -> int:
    g = _make_g(args)
    t = series.loglog_partition(args.kmax)
    upper = args.upper or (len(t) - 1)
    report = series.verify_partition(t, g, upper)
    if args.csv:
        lines = ["i,t_i,g_t_i,floor_shift,gap"]
        for i in range(1, upper + 1):
            ti = t.t(i)
            exact = g.exact_value(ti)
            if exact is not None:
                gcol = series.format_rational(exact)
            else:
                lo, hi = g.bounds(ti)
                gcol = f"[{series.format_rational(lo)};{series.format_rational(hi)}]"
            lines.append(
                f"{i},{ti},{gcol},{g.floor_eval(ti)},{t.t(i + 1) - ti}"
            )
        _write_text(args.csv, "\n".join(lines) + "\n")
    _emit_json({"g": g.describe(), **report.to_json_dict()}, args.json)
    return EXIT_OK


def cmd_adversary(args: argparse.Namespace) -> int:
    t = series.make_adversary_partition(args.t, args.jmax, args.seed)
    report = series.adversary_analyze(t, args.jmax)
    _emit_json(
        {"t": args.t, "jmax": args.jmax, "seed": args.seed, **report.to_json_dict()},
        args.json,
    )
    return EXIT_VIOLATION if report.counterexamples else EXIT_OK


def cmd_markers(args: argparse.Namespace) -> int:
    if args.m_max > series.BRUTE_FORCE_SPAN_CAP:
        raise _DomainError(
            f"brute force is capped at m <= {series.BRUTE_FORCE_SPAN_CAP}"
        )
    lines = ["m,k,closed_form,brute_force,bound1,bound2_lo,bound2_hi"]
    bad: list[list[int]] = []
    for m in range(1, args.m_max + 1):
        for k in range(1, m + 1):
            closed = series.min_marker_sum(m, k)
            brute = series.brute_force_min(m, k)
            first, (lo, hi) = series.marker_lower_bounds(m, k)
            ok = closed == brute and series.marker_chain_holds(m, k)
            if not ok:
                bad.append([m, k])
            lines.append(
                ",".join(
                    [
                        str(m),
                        str(k),
                        series.format_rational(closed),
                        series.format_rational(brute),
                        series.format_rational(first),
                        series.format_rational(lo),
                        series.format_rational(hi),
                    ]
                )
            )
    _write_text(args.csv, "\n".join(lines) + "\n")
    _emit_json({"m_max": args.m_max, "violations": bad}, args.json)
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_measure(args: argparse.Namespace) -> int:
    if args.max_pos > randomness.BRUTE_FORCE_POSITION_CAP:
        raise _DomainError(
            f"brute force is capped at max position "
            f"{randomness.BRUTE_FORCE_POSITION_CAP}"
        )
    mismatches = []
    rows = []
    for i in range(args.families):
        fam = randomness.random_block_family(args.seed + i, args.max_pos)
        exact = randomness.exact_miss_measure(fam)
        brute = randomness.brute_force_miss_measure(fam)
        if exact != brute:
            mismatches.append(i)
        if args.csv:
            rows.append(
                f"{i},{series.format_rational(exact)},{series.format_rational(brute)}"
            )
    if args.csv:
        _write_text(
            args.csv, "family,exact,brute_force\n" + "\n".join(rows) + "\n"
        )
    _emit_json(
        {
            "families": args.families,
            "max_pos": args.max_pos,
            "seed": args.seed,
            "mismatches": mismatches,
        },
        args.json,
    )
    return EXIT_VIOLATION if mismatches else EXIT_OK


def _loglog_partition_past(length: int, g: series.RedundancyFunction):
    kmax = 8
    while True:
        t = series.loglog_partition(kmax)
        if any(
            t.t(k) + g.floor_g(t.t(k)) + 1 > length
            for k in range(1, len(t) + 1)
        ):
            return t
        kmax *= 2


def cmd_beta(args: argparse.Namespace) -> int:
    g = _make_g(args)
    if args.t != "loglog":
        raise _DomainError(f"unknown partition kind {args.t!r}")
    markers = _loglog_partition_past(args.length, g)
    if args.exhaustive:
        report = diagonal.exhaustive_equivalence(markers, g, args.c, args.length)
        n = 0 if report.counterexample is None else 1
        sys.stdout.write(f"counterexamples: {n}\n")
        _emit_json(report.to_json_dict(), args.json)
        return EXIT_VIOLATION if report.counterexample else EXIT_OK
    if not args.omega:
        raise ValueError("either --exhaustive or --omega BITS is required")
    omega = BitPrefix.from_string(args.omega)
    if len(omega) != args.length:
        raise ValueError("--length must match the omega prefix length")
    cutoff = (
        diagonal.scan_cutoff(omega, markers, g)
        if args.c_auto
        else args.c
    )
    inst = diagonal.build_diagonal(omega, markers, g, cutoff)
    _emit_json(inst.to_json_dict(), args.json)
    return EXIT_OK


def cmd_series(args: argparse.Namespace) -> int:
    if args.op == "partial-sum":
        g = _make_g(args)
        lo, hi = series.partial_sum(g, args.upper)
        payload = {
            "op": "partial-sum",
            "g": g.describe(),
            "upper": args.upper,
            "sum": series.format_interval((lo, hi)),
        }
        try:
            payload["sum_exact"] = series.format_rational(
                series.partial_sum_exact(g, min(args.upper, 1024))
            )
            payload["sum_exact_upper"] = min(args.upper, 1024)
        except ValueError:
            pass
        _emit_json(payload, args.json)
        return EXIT_OK
    table = series.make_decay_table(args.f)
    report = series.condensation_compare(table, args.upper)
    _emit_json({"op": "condense", "f": args.f, **report.to_json_dict()}, args.json)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(sp: argparse.ArgumentParser, csv: bool = True) -> None:
    sp.add_argument("--config", help="key=value file overriding flags")
    sp.add_argument("--json", help="write the JSON report here (default stdout)")
    if csv:
        sp.add_argument("--csv", help="write the CSV table here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omega-lab", description=__doc__.splitlines()[0]
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("reduce", help="run the oracle reduction on a machine pair")
    sp.add_argument("--u", required=True, help="oracle machine table file")
    sp.add_argument("--v", required=True, help="target machine table file")
    sp.add_argument("--g", default="h_eps", help="redundancy kind")
    sp.add_argument("--eps", default="2", help="epsilon (rational, >= 1)")
    sp.add_argument("--n-max", type=int, default=64)
    sp.add_argument("--max-stage", type=int, default=0, help="0 = auto")
    _add_common(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("partition", help="build and verify the loglog partition")
    sp.add_argument("--kmax", type=int, default=1000)
    sp.add_argument("--upper", type=int, default=0, help="0 = kmax - 1")
    sp.add_argument("--g", default="log")
    sp.add_argument("--eps", default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_partition)

    sp = sub.add_parser("adversary", help="marker density against the staircase")
    sp.add_argument("--t", default="unit-gaps", choices=["unit-gaps", "even", "random"])
    sp.add_argument("--jmax", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    _add_common(sp, csv=False)
    sp.set_defaults(func=cmd_adversary)

    sp = sub.add_parser("markers", help="marker minimization: closed form vs brute force")
    sp.add_argument("--m-max", type=int, default=24)
    _add_common(sp)
    sp.set_defaults(func=cmd_markers)

    sp = sub.add_parser("measure", help="block-family miss measures, exact vs brute")
    sp.add_argument("--families", type=int, default=1000)
    sp.add_argument("--max-pos", type=int, default=16)
    sp.add_argument("--seed", type=int, default=0)
    _add_common(sp)
    sp.set_defaults(func=cmd_measure)

    sp = sub.add_parser("beta", help="diagonal perturbation and its equivalence")
    sp.add_argument("--exhaustive", action="store_true")
    sp.add_argument("--length", type=int, default=16)
    sp.add_argument("--t", default="loglog")
    sp.add_argument("--g", default="log")
    sp.add_argument("--eps", default=None)
    sp.add_argument("--c", type=int, default=1)
    sp.add_argument("--c-auto", action="store_true", help="scan the cutoff")
    sp.add_argument("--omega", help="base prefix bits for instance export")
    _add_common(sp, csv=False)
    sp.set_defaults(func=cmd_beta)

    sp = sub.add_parser("series", help="partial sums and the condensation test")
    sp.add_argument("--op", default="partial-sum", choices=["partial-sum", "condense"])
    sp.add_argument("--g", default="h_eps")
    sp.add_argument("--eps", default="2")
    sp.add_argument("--f", default="inverse", choices=["inverse", "geometric", "one"])
    sp.add_argument("--upper", type=int, default=1 << 16)
    _add_common(sp, csv=False)
    sp.set_defaults(func=cmd_series)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    threads = os.environ.get("OMEGA_LAB_THREADS")
    if threads is not None:
        try:
            if int(threads) < 1:
                raise ValueError
        except ValueError:
            sys.stderr.write("OMEGA_LAB_THREADS must be a positive integer\n")
            return EXIT_USAGE
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config(args)
        return args.func(args)
    except _DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
