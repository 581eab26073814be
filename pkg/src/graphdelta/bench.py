"""Degree-query latency at increasing lookback depths, per plan.

Lookback is measured in log operations between the queried tick and the
current snapshot. Only plan execution is timed; the store is already open.
"""

from __future__ import annotations

import csv
import random
import statistics
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TextIO

from .query import Measure, Plan, PlanKind, Query, execute, format_value, node_exists_at
from .store import SnapshotStore

# two-phase runs with partial reconstruction, as in the reference experiment
BENCH_PLANS = {
    "two-phase": Plan(PlanKind.TWO_PHASE, use_node_index=False, use_partial=True),
    "hybrid": Plan(PlanKind.HYBRID, use_node_index=False),
    "two-phase-index": Plan(PlanKind.TWO_PHASE, use_node_index=True, use_partial=True),
    "hybrid-index": Plan(PlanKind.HYBRID, use_node_index=True),
}

CSV_FIELDS = ["plan", "lookback_ops", "runtime_ms", "result"]


@dataclass(frozen=True)
class BenchRow:
    plan: str
    lookback_ops: int
    runtime_ms: float
    result: str


def lookback_targets(store: SnapshotStore, points: int, depth: float = 0.9) -> list[tuple[int, int]]:
    """``points`` evenly spaced ``(lookback_ops, tick)`` pairs, shallowest first.

    The deepest point reaches back ``depth`` of the log, so early ticks with
    almost no nodes are never queried.
    """
    recs = store.log.records
    n = len(recs)
    out: list[tuple[int, int]] = []
    seen = set()
    for i in range(1, points + 1):
        want = max(1, round(n * depth * i / points))
        tick = recs[n - want].t - 1
        if tick in seen:
            continue
        seen.add(tick)
        out.append((store.log.count_ops(tick, store.t_cur), tick))
    return out


def pick_node(store: SnapshotStore, tick: int, seed: int) -> int:
    """Seeded random node present both at ``tick`` and now."""
    nodes = sorted(store.current.nodes)
    random.Random(seed).shuffle(nodes)
    for v in nodes:
        if node_exists_at(store, v, tick, use_node_index=True):
            return v
    raise ValueError(f"no node exists at tick {tick} and at the current tick")


def run_bench(
    store: SnapshotStore,
    points: int = 6,
    plans: Sequence[str] = tuple(BENCH_PLANS),
    repeats: int = 5,
    seed: int = 0,
    node: Optional[int] = None,
    current_only: bool = True,
) -> list[BenchRow]:
    """Time every plan at every lookback; raises if plans disagree on a result.

    With ``current_only`` the plans start from the current snapshot even when
    the store has materialized snapshots.
    """
    if not store.log.records:
        raise ValueError("store has an empty log")
    unknown = [p for p in plans if p not in BENCH_PLANS]
    if unknown:
        raise ValueError(f"unknown plans: {', '.join(unknown)}")
    targets = lookback_targets(store, points)
    if node is None:
        node = pick_node(store, targets[-1][1], seed)
    store.current  # freeze outside the timed region
    saved = store.use_materialized
    store.use_materialized = not current_only
    try:
        return _sweep(store, targets, node, plans, repeats)
    finally:
        store.use_materialized = saved


def _sweep(store, targets, node, plans, repeats) -> list[BenchRow]:
    rows: list[BenchRow] = []
    for lookback, tick in targets:
        q = Query.point(Measure.DEGREE, tick, node)
        results = set()
        for name in plans:
            times = []
            for _ in range(repeats):
                start = time.perf_counter()
                res = execute(q, store, BENCH_PLANS[name])
                times.append((time.perf_counter() - start) * 1e3)
            value = format_value(res.value)
            results.add(value)
            rows.append(BenchRow(name, lookback, statistics.median(times), value))
        if len(results) > 1:
            raise AssertionError(f"plans disagree at lookback {lookback}: {sorted(results)}")
    return rows


def write_csv(rows: Iterable[BenchRow], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([r.plan, r.lookback_ops, f"{r.runtime_ms:.4f}", r.result])
