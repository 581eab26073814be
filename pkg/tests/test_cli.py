import csv
import io

import pytest

from conftest import oracle_replay
from graphdelta.catalog import read_manifest
from graphdelta.cli import main
from graphdelta.deltalog import read_log
from graphdelta.store import SnapshotStore


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def small_log(tmp_path):
    p = tmp_path / "small.log"
    p.write_text("DELTA 0 7\n1 AN 1\n1 AN 2\n1 AN 3\n3 AE 1 2\n4 AE 1 3\n6 RE 1 2\n")
    return p


@pytest.fixture
def small_store(tmp_path, small_log, capsys):
    d = tmp_path / "store"
    assert run(capsys, "ingest", "--log", small_log, "--store", d)[0] == 0
    return d


def test_gen_tree(tmp_path, capsys):
    out = tmp_path / "g.log"
    code, text, _ = run(capsys, "gen", "--nodes", 10, "--attach", 1, "--premove", 0, "--out", out)
    assert code == 0
    assert len(read_log(out)) == 19
    assert text.strip() == "inserted_nodes=10 inserted_edges=9 removed_edges=0 total_ops=19"


def test_gen_same_seed_same_bytes(tmp_path, capsys):
    for name in ("a.log", "b.log"):
        run(capsys, "gen", "--nodes", 200, "--attach", 3, "--premove", 0.3, "--seed", 9, "--out", tmp_path / name)
    assert (tmp_path / "a.log").read_bytes() == (tmp_path / "b.log").read_bytes()


def test_gen_stats_consistent(tmp_path, capsys):
    _, text, _ = run(capsys, "gen", "--nodes", 300, "--attach", 4, "--premove", 0.4, "--out", tmp_path / "g.log")
    f = dict(kv.split("=") for kv in text.split())
    assert int(f["total_ops"]) == int(f["inserted_nodes"]) + int(f["inserted_edges"]) + int(f["removed_edges"])
    assert int(f["total_ops"]) == len(read_log(tmp_path / "g.log"))


def test_gen_bad_params(tmp_path, capsys):
    assert run(capsys, "gen", "--nodes", 10, "--premove", 1.5, "--out", tmp_path / "g.log")[0] == 2


def test_ingest_matches_replay(tmp_path, capsys):
    log_path = tmp_path / "g.log"
    run(capsys, "gen", "--nodes", 150, "--attach", 3, "--premove", 0.3, "--out", log_path)
    d = tmp_path / "store"
    code, text, _ = run(capsys, "ingest", "--log", log_path, "--store", d, "--materialize", "periodic:10")
    assert code == 0
    log = read_log(log_path)
    store = SnapshotStore.open(d)
    assert store.log.records == log.records
    nodes, edges = oracle_replay(log.records, store.t_cur)
    assert (set(store.current.nodes), set(store.current.edges)) == (nodes, edges)
    ticks = [t for t, _ in read_manifest(d / "manifest")]
    assert ticks[-1] == store.t_cur
    assert [t for t in ticks if t != store.t_cur] == [
        t for t in range(10, store.t_cur + 1, 10) if t != store.t_cur
    ]


def test_ingest_empty_file(tmp_path, capsys):
    p = tmp_path / "e.log"
    p.write_text("DELTA 0 0\n")
    code, text, _ = run(capsys, "ingest", "--log", p, "--store", tmp_path / "s")
    assert code == 0
    store = SnapshotStore.open(tmp_path / "s")
    assert store.current.nodes == set() and store.t_cur == 0


def test_ingest_precondition_violation(tmp_path, capsys):
    p = tmp_path / "bad.log"
    p.write_text("DELTA 0 5\n1 AN 1\n2 AE 1 2\n")
    code, _, err = run(capsys, "ingest", "--log", p, "--store", tmp_path / "s")
    assert code == 3
    assert ":3:" in err


def test_ingest_time_going_back(tmp_path, capsys):
    p = tmp_path / "bad.log"
    p.write_text("DELTA 0 5\n2 AN 1\n1 AN 2\n")
    assert run(capsys, "ingest", "--log", p, "--store", tmp_path / "s")[0] == 3


def test_ingest_parse_error(tmp_path, capsys):
    p = tmp_path / "bad.log"
    p.write_text("DELTA 0 5\n1 ZZ 1\n")
    assert run(capsys, "ingest", "--log", p, "--store", tmp_path / "s")[0] == 2


def test_query_examples(small_store, capsys):
    s = small_store
    assert run(capsys, "query", "--store", s, "--measure", "degree", "--node", 1, "--at", 4)[1] == "2\n"
    assert run(capsys, "query", "--store", s, "--measure", "degree", "--node", 1,
               "--range", 3, 6, "--mode", "diff")[1] == "0\n"
    assert run(capsys, "query", "--store", s, "--measure", "degree", "--node", 1, "--range", 3, 6)[1] == "1.5\n"
    assert run(capsys, "query", "--store", s, "--measure", "diameter", "--at", 3)[1] == "inf\n"
    assert run(capsys, "query", "--store", s, "--measure", "degree", "--node", 1,
               "--range", 5, 5, "--mode", "diff")[1] == "0\n"


def test_query_all_plans_agree(small_store, capsys):
    code, out, _ = run(capsys, "query", "--store", small_store, "--measure", "degree", "--node", 1,
                       "--range", 2, 7, "--mode", "diff", "--plan", "all", "--node-index", "--partial")
    assert code == 0
    lines = [l.split() for l in out.splitlines()]
    assert [l[0] for l in lines] == ["delta-only", "hybrid", "two-phase"]
    assert {l[1] for l in lines} == {"1"}


def test_query_inapplicable(small_store, capsys):
    code, _, _ = run(capsys, "query", "--store", small_store, "--measure", "diameter", "--at", 4,
                     "--plan", "delta-only")
    assert code == 4


def test_query_absent(small_store, capsys):
    assert run(capsys, "query", "--store", small_store, "--measure", "degree", "--node", 9, "--at", 4)[0] == 5
    assert run(capsys, "query", "--store", small_store, "--measure", "degree", "--node", 1,
               "--range", 0, 0)[0] == 5


def test_query_usage_errors(small_store, capsys):
    with pytest.raises(SystemExit) as info:
        main(["query", "--store", str(small_store), "--measure", "degree"])
    assert info.value.code == 2
    assert run(capsys, "query", "--store", small_store, "--measure", "degree", "--at", 4)[0] == 2
    assert run(capsys, "query", "--store", small_store, "--measure", "degree", "--node", 1, "--at", 99)[0] == 2


def test_query_selection_flag(tmp_path, capsys):
    p = tmp_path / "s.log"
    p.write_text("DELTA 0 10\n" + "".join(f"{1 + i // 2} AN {i}\n" for i in range(8)) + "8 AE 0 1\n")
    d = tmp_path / "store"
    run(capsys, "ingest", "--log", p, "--store", d)
    for sel in ("time", "ops"):
        out = run(capsys, "query", "--store", d, "--measure", "components", "--at", 4, "--select", sel)[1]
        assert out == "8\n"


@pytest.fixture
def gen_store(tmp_path, capsys):
    log_path = tmp_path / "g.log"
    run(capsys, "gen", "--nodes", 300, "--attach", 4, "--premove", 0.4, "--seed", 3, "--out", log_path)
    d = tmp_path / "store"
    run(capsys, "ingest", "--log", log_path, "--store", d)
    return d


def test_bench_csv(gen_store, capsys):
    code, out, _ = run(capsys, "bench", "--store", gen_store, "--points", 4, "--repeats", 2)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["plan", "lookback_ops", "runtime_ms", "result"]
    by_depth = {}
    for r in rows:
        assert float(r["runtime_ms"]) > 0
        by_depth.setdefault(int(r["lookback_ops"]), {})[r["plan"]] = r["result"]
    assert len(by_depth) == 4
    for plans in by_depth.values():
        assert set(plans) == {"two-phase", "hybrid", "two-phase-index", "hybrid-index"}
        assert len(set(plans.values())) == 1


def test_bench_unknown_plan(small_store, capsys):
    assert run(capsys, "bench", "--store", small_store, "--plans", "nope")[0] == 2


def test_bench_tiny_store(small_store, capsys):
    # the deepest lookback reaches the empty graph at tick 0
    assert run(capsys, "bench", "--store", small_store, "--points", 2)[0] == 2


def test_bench_writes_file(gen_store, tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert run(capsys, "bench", "--store", gen_store, "--points", 2, "--repeats", 1, "--out", out)[0] == 0
    assert out.read_text().startswith("plan,lookback_ops,runtime_ms,result\n")
