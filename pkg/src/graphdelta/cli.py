"""Command-line entry point: gen, ingest, query, bench.

Exit codes: 2 bad arguments or input, 3 precondition violation during
ingest, 4 plan not applicable, 5 node absent (or empty graph) at a queried tick.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bench, graphgen
from .catalog import SelectionPolicy
from .deltalog import DeltaLog, iter_log_file, read_log_header, write_log
from .errors import (
    AllTicksAbsent,
    EmptyGraph,
    GraphDeltaError,
    InapplicablePlan,
    InvalidParams,
    NodeAbsentAtTick,
    NonMonotonicTime,
    ParseError,
    PreconditionViolated,
)
from .query import Measure, Mode, PlanKind, Query, applicable, execute, plan
from .store import SnapshotStore, parse_policy

EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_INAPPLICABLE = 4
EXIT_ABSENT = 5


def _fail(code: int, msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_gen(args) -> int:
    params = graphgen.GenParams(args.nodes, args.attach, args.premove, args.seed)
    try:
        stream = graphgen.generate(params)
    except InvalidParams as exc:
        return _fail(EXIT_USAGE, str(exc))
    log = DeltaLog(t0=0, records=stream)
    write_log(args.out, log)
    print(graphgen.stats(stream).line())
    return 0


def cmd_ingest(args) -> int:
    try:
        policy = parse_policy(args.materialize) if args.materialize else None
        t0, t_end = read_log_header(args.log)
        store = SnapshotStore(args.store, policy, t0=t0)
    except (ValueError, ParseError, FileExistsError) as exc:
        return _fail(EXIT_USAGE, str(exc))
    lineno = 1
    try:
        for lineno, t, op in iter_log_file(args.log):
            store.record_at(op, t)
        store.ingest((), t_end)
    except (PreconditionViolated, NonMonotonicTime) as exc:
        return _fail(EXIT_PRECONDITION, f"{args.log}:{lineno}: {exc}")
    except ParseError as exc:
        return _fail(EXIT_USAGE, f"{args.log}: {exc}")
    store.save()
    cur = store.current
    print(
        f"t_cur={store.t_cur} records={len(store.log)} nodes={len(cur.nodes)} "
        f"edges={len(cur.edges)} materialized={len(store.materialized)}"
    )
    return 0


def _build_query(args) -> Query:
    measure = Measure(args.measure)
    node = args.node
    if args.at is not None:
        if args.mode not in (None, "value"):
            raise ValueError("--at takes --mode value")
        return Query.point(measure, args.at, node)
    mode = Mode(args.mode or "mean")
    if mode is Mode.VALUE:
        raise ValueError("--range needs --mode diff or mean")
    t_k, t_l = args.range
    return Query(measure, t_k, t_l, mode, node)


def cmd_query(args) -> int:
    try:
        q = _build_query(args)
        store = SnapshotStore.open(args.store, selection=SelectionPolicy(args.select))
    except (ValueError, GraphDeltaError, FileNotFoundError) as exc:
        return _fail(EXIT_USAGE, str(exc))
    try:
        if args.plan == "all":
            kinds = applicable(q)
        elif args.plan == "auto":
            kinds = [None]
        else:
            kinds = [PlanKind(args.plan)]
        for kind in kinds:
            p = plan(q, kind, args.node_index, args.partial)
            res = execute(q, store, p)
            if args.plan == "all":
                print(f"{p.kind.value} {res.format()}")
            else:
                print(res.format())
    except InapplicablePlan as exc:
        return _fail(EXIT_INAPPLICABLE, str(exc))
    except (NodeAbsentAtTick, AllTicksAbsent, EmptyGraph) as exc:
        return _fail(EXIT_ABSENT, str(exc))
    except GraphDeltaError as exc:
        return _fail(EXIT_USAGE, str(exc))
    return 0


def cmd_bench(args) -> int:
    try:
        store = SnapshotStore.open(args.store)
    except (GraphDeltaError, FileNotFoundError) as exc:
        return _fail(EXIT_USAGE, str(exc))
    if not store.log.records:
        return _fail(EXIT_USAGE, "store is empty")
    plans = [p.strip() for p in args.plans.split(",") if p.strip()]
    try:
        rows = bench.run_bench(
            store, args.points, plans, args.repeats, args.seed,
            current_only=not args.with_materialized,
        )
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))
    if args.out == "-":
        bench.write_csv(rows, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            bench.write_csv(rows, fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphdelta", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic scale-free op stream")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--attach", type=int, default=1)
    g.add_argument("--premove", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, required=True)
    g.set_defaults(func=cmd_gen)

    i = sub.add_parser("ingest", help="replay a delta file into a new store directory")
    i.add_argument("--log", type=Path, required=True)
    i.add_argument("--store", type=Path, required=True)
    i.add_argument("--materialize", metavar="{periodic:P|ops:K|sim:T}")
    i.set_defaults(func=cmd_ingest)

    q = sub.add_parser("query", help="run a historical query")
    q.add_argument("--store", type=Path, required=True)
    q.add_argument("--measure", choices=[m.value for m in Measure], required=True)
    q.add_argument("--node", type=int)
    when = q.add_mutually_exclusive_group(required=True)
    when.add_argument("--at", type=int, metavar="T")
    when.add_argument("--range", type=int, nargs=2, metavar=("TK", "TL"))
    q.add_argument("--mode", choices=[m.value for m in Mode])
    q.add_argument("--plan", default="auto", choices=["auto", "all"] + [k.value for k in PlanKind])
    q.add_argument("--node-index", action="store_true")
    q.add_argument("--partial", action="store_true")
    q.add_argument("--select", default="ops", choices=[s.value for s in SelectionPolicy])
    q.set_defaults(func=cmd_query)

    b = sub.add_parser("bench", help="degree-query latency sweep over lookback depths")
    b.add_argument("--store", type=Path, required=True)
    b.add_argument("--points", type=int, default=6)
    b.add_argument("--plans", default=",".join(bench.BENCH_PLANS))
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", default="-")
    b.add_argument("--with-materialized", action="store_true",
                   help="let plans start from materialized snapshots, not just the current one")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
