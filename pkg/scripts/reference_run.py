"""Generate the reference synthetic workload and ingest it into a store.

    python scripts/reference_run.py --out runs/ref --materialize periodic:1000
"""

import argparse
import dataclasses
import time
from pathlib import Path

from graphdelta.deltalog import DeltaLog, write_log
from graphdelta.graphgen import REFERENCE_PARAMS, GenParams, generate, stats
from graphdelta.store import SnapshotStore, parse_policy

# counts reported for the original dataset
REFERENCE_COUNTS = {"inserted_nodes": 5063, "inserted_edges": 41067, "removed_edges": 18280, "total_ops": 64410}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, required=True, help="directory for delta.log and the store")
    ap.add_argument("--nodes", type=int, default=REFERENCE_PARAMS.n_nodes)
    ap.add_argument("--attach", type=int, default=REFERENCE_PARAMS.m_attach)
    ap.add_argument("--premove", type=float, default=REFERENCE_PARAMS.p_remove)
    ap.add_argument("--seed", type=int, default=REFERENCE_PARAMS.seed)
    ap.add_argument("--materialize", default="periodic:1000")
    args = ap.parse_args()

    params = GenParams(args.nodes, args.attach, args.premove, args.seed)
    args.out.mkdir(parents=True, exist_ok=True)

    t = time.perf_counter()
    stream = generate(params)
    st = stats(stream)
    write_log(args.out / "stream.log", DeltaLog(records=stream))
    t_gen = time.perf_counter() - t

    t = time.perf_counter()
    store = SnapshotStore(args.out / "store", parse_policy(args.materialize))
    store.ingest(((r.t, r.op) for r in stream), stream[-1].t if stream else 0)
    store.save()
    t_ingest = time.perf_counter() - t

    print(f"params: {dataclasses.asdict(params)}")
    print(f"{'':16}{'ours':>10}{'reference':>12}")
    for key, ref in REFERENCE_COUNTS.items():
        print(f"{key:16}{getattr(st, key):>10}{ref:>12}")
    print(f"generate {t_gen:.2f}s, ingest {t_ingest:.2f}s, materialized {len(store.materialized)}")


if __name__ == "__main__":
    main()
