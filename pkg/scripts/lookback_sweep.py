"""Degree-query latency against lookback depth for the four benchmark plans.

Writes the CSV and prints the ordering checks. Expects a store built by
scripts/reference_run.py (or `graphdelta ingest`).

    python scripts/lookback_sweep.py --store runs/ref/store --out runs/ref/sweep.csv
"""

import argparse
from pathlib import Path

from graphdelta import bench
from graphdelta.store import SnapshotStore


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--store", type=Path, required=True)
    ap.add_argument("--out", type=Path, required=True)
    ap.add_argument("--points", type=int, default=6)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    store = SnapshotStore.open(args.store)
    rows = bench.run_bench(store, args.points, repeats=args.repeats, seed=args.seed)
    with open(args.out, "w", newline="") as fh:
        bench.write_csv(rows, fh)

    ms = {(r.plan, r.lookback_ops): r.runtime_ms for r in rows}
    depths = sorted({r.lookback_ops for r in rows})
    plans = list(bench.BENCH_PLANS)
    print("lookback  " + "".join(f"{p:>17}" for p in plans))
    for x in depths:
        print(f"{x:>8}  " + "".join(f"{ms[p, x]:>14.3f} ms" for p in plans))

    deep, shallow = depths[-1], depths[0]
    two_phase_slower = all(ms["two-phase", x] >= ms["hybrid", x] for x in depths if x >= 10_000)
    print(f"two-phase >= hybrid at every lookback >= 10k: {two_phase_slower}")
    for p in ("two-phase", "hybrid"):
        print(f"{p}-index <= {p} at deepest lookback: {ms[p + '-index', deep] <= ms[p, deep]}")
    print(f"two-phase deepest / shallowest: {ms['two-phase', deep] / ms['two-phase', shallow]:.1f}x")


if __name__ == "__main__":
    main()
