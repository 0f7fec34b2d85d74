"""``conclab`` command line.

Exit codes: 0 all checks pass, 1 verification or routing failure,
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bench, calibration, oracle
from .classical import route_classical
from .grover import CostModelEngine, StatevectorEngine
from .quantum import route_quantum
from .routing import Request, RequestParseError, RoutingError, complete_request, parse_request, validate_assignment
from .topology import (
    Concentrator,
    Kind,
    TopologyError,
    TopologyParseError,
    build_bounded_fat_slim,
    build_full_fat_slim,
    build_regular_fat_slim,
    crosspoint_count,
    parse_topology,
    serialize_topology,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load(path: Optional[str]) -> Concentrator:
    if path is None:
        raise UsageError("a topology file is required for this command")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_topology(text)
    except TopologyParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _degree_span(values) -> str:
    lo, hi = min(values), max(values)
    return str(lo) if lo == hi else f"{lo}-{hi}"


def summary_lines(conc: Concentrator) -> list[str]:
    lines = [f"kind: {conc.kind.value}", f"n: {conc.n}", f"m: {conc.m}"]
    lines += [f"{k}: {v}" for k, v in conc.params.items()]
    lines.append(f"crosspoints: {crosspoint_count(conc)}")
    lines.append(f"degrees: outputs: {_degree_span(conc.output_degrees())}, inputs: {_degree_span(conc.input_degrees())}")
    lines.append(f"designated capacity: {conc.capacity}")
    return lines


_BUILDERS = {
    "full": (build_full_fat_slim, "N M"),
    "bounded": (build_bounded_fat_slim, "N M Q"),
    "regular": (build_regular_fat_slim, "P M"),
}


def cmd_build(args) -> int:
    builder, names = _BUILDERS[args.kind]
    if len(args.params) != len(names.split()):
        raise UsageError(f"build {args.kind} takes {names}")
    try:
        conc = builder(*args.params)
    except TopologyError as exc:
        raise UsageError(str(exc)) from None
    text = serialize_topology(conc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print("\n".join(summary_lines(conc)), file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def _engine(name: str):
    return StatevectorEngine() if name == "statevector" else CostModelEngine()


def cmd_route(args) -> int:
    conc = _load(args.topology)
    try:
        req = parse_request(args.request, conc.n)
    except RequestParseError as exc:
        raise UsageError(str(exc)) from None
    if req.k > conc.capacity:
        print(f"warning: {req.k} active inputs exceed designated capacity {conc.capacity}; best effort")
        if conc.kind is not Kind.BOUNDED:
            return EXIT_FAIL
    req = complete_request(conc, req)
    try:
        if args.router == "classical":
            asg, ledger = route_classical(conc, req)
            queries, failed = 0, False
        else:
            if args.engine == "statevector" and conc.n > bench.MAX_STATEVECTOR_N:
                raise UsageError("statevector engine infeasible above 2^20 inputs; use --engine cost-model")
            res = route_quantum(conc, req, np.random.default_rng(args.seed), args.delta, engine=_engine(args.engine))
            asg, ledger, queries, failed = res.assignment, res.classical_steps, res.quantum_queries, res.failed
    except RoutingError as exc:
        print(f"routing error: {exc}")
        return EXIT_FAIL
    for i, z in sorted(asg.pairs):
        print(f"{i} -> {z}")
    for i in asg.unrouted:
        print(f"{i} -> unrouted")
    report = validate_assignment(conc, req, asg)
    print(f"classical steps: {ledger.total} (reads {ledger.array_reads}, writes {ledger.array_writes}, "
          f"pairings {ledger.pairings}, list ops {ledger.list_ops})")
    if args.router == "quantum":
        print(f"quantum queries: {queries} (engine {args.engine}, seed {args.seed}, delta {args.delta})")
    print(f"valid: {report.valid}" + ("" if report.valid else " " + "; ".join(v.detail for v in report.violations)))
    if failed:
        print("failed: amplification missed an active input")
    return EXIT_OK if report.valid and not failed else EXIT_FAIL


def _base_requests(conc: Concentrator, size: int):
    for subset in itertools.combinations(range(1, conc.n + 1), size):
        yield Request.from_indices(conc.n, subset)


def cmd_verify(args) -> int:
    suite = args.suite
    if suite == "grover-calibration":
        return _verify_calibration(args)
    conc = _load(args.topology)
    if suite == "crosspoints":
        rep = oracle.check_crosspoint_bounds(conc)
        target = f"expected {rep.expected}" if rep.expected is not None else f"bound {rep.bound}"
        status = "pass" if rep.passed else "FAIL"
        print(f"crosspoints: {rep.count} ({target}) {status}" + (f" [{rep.note}]" if rep.note else ""))
        return EXIT_OK if rep.passed else EXIT_FAIL
    if suite == "capacity":
        claim = conc.capacity
        total = math.comb(conc.n, claim)
        mode = "auto"
        if total > args.budget:
            print(f"notice: C({conc.n},{claim})={total} exceeds budget {args.budget}; downgrading to sampled")
            mode = "sampled"
        cert = oracle.certify_capacity(conc, claim, mode=mode, budget=args.budget, rng=np.random.default_rng(args.seed))
        print(cert.describe())
        return EXIT_OK if cert.holds else EXIT_FAIL
    # router-equivalence
    size = conc.capacity
    total = math.comb(conc.n, size)
    if total <= args.budget:
        reqs = _base_requests(conc, size)
        label = "exhaustive"
    else:
        rng = np.random.default_rng(args.seed)
        reqs = (
            Request.from_indices(conc.n, (rng.choice(conc.n, size=size, replace=False) + 1).tolist())
            for _ in range(args.budget)
        )
        label = "sampled"
        print(f"notice: C({conc.n},{size})={total} exceeds budget {args.budget}; downgrading to sampled")
    count = bad = 0
    for req in reqs:
        count += 1
        rep = oracle.router_equivalence(conc, req, route_classical)
        if not rep.ok:
            bad += 1
            if bad <= 5:
                print(f"mismatch on {req.active}: router {rep.router_size}, oracle {rep.oracle_size}, valid {rep.valid}")
    print(f"router-equivalence: {'pass' if not bad else 'FAIL'}, {count} requests ({label}), {bad} mismatches")
    return EXIT_OK if not bad else EXIT_FAIL


def _verify_calibration(args) -> int:
    table = calibration.CalibrationTable.load(args.table) if args.table else calibration.load_default_table()
    points = [(16, 1), (64, 4), (256, 16)]
    fresh = calibration.calibrate(points, trials=args.trials, seed=args.seed)
    ok = True
    for row in fresh.rows:
        mean, _ = table.lookup(row.N, row.k)
        rel = abs(mean - row.mean_queries) / row.mean_queries
        good = rel <= 0.10
        ok &= good
        print(f"N={row.N} k={row.k}: table {mean:.2f}, statevector {row.mean_queries:.2f}, "
              f"rel err {rel:.3f} {'pass' if good else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sweep(args) -> int:
    spec = bench.ExperimentSpec(
        kind=args.kind,
        n_values=tuple(args.n_values),
        c=args.c,
        k=args.k,
        routers=tuple(args.routers.split(",")),
        engine=args.engine,
        trials=args.trials,
        delta=args.delta,
        seed=args.seed,
    )
    try:
        rows = bench.run_sweep(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = bench.rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    summary = bench.summarize(rows)
    if args.summary:
        stream = sys.stdout if args.out else sys.stderr
        print("\n".join(summary.lines()), file=stream)
    return EXIT_OK if not summary.invalid else EXIT_FAIL


def cmd_calibrate(args) -> int:
    grid = calibration.DEFAULT_GRID
    if args.max_n:
        grid = tuple((N, k) for N, k in grid if N <= args.max_n)
    table = calibration.calibrate(grid, trials=args.trials, seed=args.seed)
    if args.out:
        table.save(args.out)
    else:
        sys.stdout.write(table.to_csv())
    return EXIT_OK


def _n_list(text: str) -> list[int]:
    """``64,256,1024`` or ``2^6..2^14`` (powers of two, step one exponent) or ``4^3..4^7``."""
    if ".." in text:
        lo, hi = text.split("..")
        b1, e1 = lo.split("^")
        b2, e2 = hi.split("^")
        if b1 != b2:
            raise argparse.ArgumentTypeError("range endpoints need the same base")
        return [int(b1) ** e for e in range(int(e1), int(e2) + 1)]
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conclab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True, delta=False, engine=False, budget=False, out=True):
        if seed:
            p.add_argument("--seed", type=int, default=0)
        if delta:
            p.add_argument("--delta", type=float, default=0.01)
        if engine:
            p.add_argument("--engine", choices=("statevector", "cost-model"), default="statevector")
        if budget:
            p.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET)
        if out:
            p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("build", help="construct a topology and write it out")
    p.add_argument("kind", choices=("full", "bounded", "regular"))
    p.add_argument("params", type=int, nargs="+", help="full: N M | bounded: N M Q | regular: P M")
    common(p, seed=False)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("route", help="route one request")
    p.add_argument("topology")
    p.add_argument("request", help="bit string of length n or index list like [1,3,7]")
    p.add_argument("--router", choices=("classical", "quantum"), default="classical")
    common(p, delta=True, engine=True, out=False)
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("topology", nargs="?")
    p.add_argument("--suite", required=True, choices=("capacity", "crosspoints", "router-equivalence", "grover-calibration"))
    p.add_argument("--table", help="calibration CSV (grover-calibration suite)")
    p.add_argument("--trials", type=int, default=2000)
    common(p, budget=True, out=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="benchmark sweep, CSV of result rows")
    p.add_argument("--kind", choices=("full", "bounded", "regular"), default="full")
    p.add_argument("--n-values", type=_n_list, default=[64, 256, 1024, 4096])
    p.add_argument("--c", type=int, help="bounded: fixed capacity")
    p.add_argument("--k", type=int, help="active inputs per request (default: capacity)")
    p.add_argument("--routers", default="classical,quantum")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--summary", action="store_true", help="print fitted slopes and crossover")
    common(p, delta=True, engine=True)
    p.set_defaults(func=cmd_sweep, engine="cost-model")

    p = sub.add_parser("calibrate", help="regenerate the cost-model calibration table")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--max-n", type=int)
    common(p)
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"conclab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except calibration.ConfigurationError as exc:
        print(f"conclab: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
