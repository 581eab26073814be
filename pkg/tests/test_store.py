import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import as_sets, oracle_replay, random_stream
from graphdelta.catalog import (
    SelectionPolicy,
    format_manifest,
    parse_manifest,
    select_base,
)
from graphdelta.deltalog import read_log
from graphdelta.errors import EmptyCatalog, NonMonotonicTime, ParseError, PreconditionViolated
from graphdelta.graph import GraphOp, Snapshot, diff
from graphdelta.store import OpCount, Periodic, Similarity, SnapshotStore, parse_policy, similarity

AN, RN, AE, RE = GraphOp.add_node, GraphOp.rem_node, GraphOp.add_edge, GraphOp.rem_edge


# -- record / close_tick -----------------------------------------------------


def test_record_intra_tick_dependency():
    s = SnapshotStore()
    s.record(AN(1))
    s.record(AN(9))
    s.record(AE(9, 1))
    assert s.staged == [AN(1), AN(9), AE(1, 9)]
    assert s.current.nodes == set()
    assert s.close_tick() == 1
    assert as_sets(s.current) == ({1, 9}, {(1, 9)})


def test_record_edge_before_node():
    s = SnapshotStore()
    s.record(AN(1))
    with pytest.raises(PreconditionViolated):
        s.record(AE(9, 1))


def test_record_rem_node_expands():
    s = SnapshotStore.from_stream([(1, AN(1)), (1, AN(2)), (1, AN(3)), (1, AE(1, 2)), (1, AE(2, 3))])
    assert s.record(RN(2)) == [RE(1, 2), RE(2, 3), RN(2)]
    assert len(s.staged) == 3


def test_close_empty_tick():
    s = SnapshotStore.from_stream([(1, AN(1))])
    before = s.current
    n = len(s.log)
    assert s.close_tick() == 2
    assert len(s.log) == n
    assert s.current.same_graph(before) and s.current.as_of == 2


def test_record_at_rejects_closed_tick():
    s = SnapshotStore.from_stream([(3, AN(1))])
    with pytest.raises(NonMonotonicTime):
        s.record_at(AN(2), 3)


def test_opcount_triggers():
    s = SnapshotStore(materialization=OpCount(5))
    for i in range(6):
        s.record(AN(i))
    t = s.close_tick()
    assert [e.tick for e in s.materialized] == [t]
    s.record(AN(99))
    s.close_tick()
    assert len(s.materialized) == 1


def test_periodic_ticks():
    rng = random.Random(1)
    s = SnapshotStore.from_stream(random_stream(rng, 45, 2), t_end=50, materialization=Periodic(10))
    assert [e.tick for e in s.materialized] == [10, 20, 30, 40, 50]


def test_catalog_includes_current():
    s = SnapshotStore.from_stream([(1, AN(1))], t_end=3, materialization=Periodic(2))
    assert [e.tick for e in s.catalog] == [2, 3]
    s.use_materialized = False
    assert [e.tick for e in s.catalog] == [3]


@pytest.mark.parametrize("text,policy", [
    ("periodic:10", Periodic(10)), ("ops:5", OpCount(5)), ("sim:3", Similarity(3)),
])
def test_parse_policy(text, policy):
    assert parse_policy(text) == policy


@pytest.mark.parametrize("text", ["periodic", "ops:0", "sim:-1", "foo:3", "ops:x"])
def test_parse_policy_errors(text):
    with pytest.raises(ValueError):
        parse_policy(text)


# -- similarity --------------------------------------------------------------


def test_similarity_examples():
    s = Snapshot.build({1, 2}, [(1, 2)])
    assert similarity(s, s) == 0
    assert similarity(s, Snapshot.build({1, 2, 3}, [(1, 2)])) == 1


def test_similarity_ignores_churn():
    s = SnapshotStore(materialization=Similarity(2))
    s.ingest([(1, AN(1)), (1, AN(2))])
    assert [e.tick for e in s.materialized] == [1]
    for i in range(100):
        s.record_at(AE(1, 2), 2 + 2 * i)
        s.record_at(RE(1, 2), 3 + 2 * i)
    s.close_tick()
    assert s.log.count_ops(1, s.t_cur) == 200
    assert similarity(s.materialized[-1].snapshot, s.current) == 0
    assert len(s.materialized) == 1


@pytest.mark.parametrize("seed", range(6))
def test_incremental_similarity_matches_diff(seed):
    rng = random.Random(seed)
    s = SnapshotStore()
    by_tick = {}
    for t, op in random_stream(rng, 60, 3, p_rem_node=0.15):
        by_tick.setdefault(t, []).append(op)
    for t, ops in sorted(by_tick.items()):
        for op in ops:
            s.record_at(op, t)
        s.close_tick()
        if rng.random() < 0.1:
            s.materialize()
        assert s._diff_size_since_baseline() == len(diff(s._baseline, s.current))


@pytest.mark.parametrize("seed", range(3))
def test_similarity_policy_threshold(seed):
    rng = random.Random(seed)
    s = SnapshotStore.from_stream(random_stream(rng, 80, 3), materialization=Similarity(15))
    prev = Snapshot.empty(0)
    assert s.materialized
    for e in s.materialized:
        assert similarity(prev, e.snapshot) >= 15
        prev = e.snapshot


# -- selection ---------------------------------------------------------------


def skewed_store():
    s = SnapshotStore()
    s.materialize()
    for i, t in enumerate([1, 1, 2, 2, 3, 3, 4, 4]):
        s.record_at(AN(i), t)
    s.record_at(AE(0, 1), 8)
    s.advance_to(10)
    s.materialize()
    return s


def test_select_base_examples():
    s = skewed_store()
    assert [e.tick for e in s.materialized] == [0, 10]
    assert s.select_base(4, SelectionPolicy.TIME_BASED).tick == 0
    assert s.select_base(4, SelectionPolicy.OPERATION_BASED).tick == 10
    for policy in SelectionPolicy:
        assert s.select_base(10, policy).tick == 10
        assert s.select_base(0, policy).tick == 0
    assert s.reconstruct(4, SelectionPolicy.TIME_BASED) == s.reconstruct(4, SelectionPolicy.OPERATION_BASED)


def test_select_base_uniform_agree():
    s = SnapshotStore()
    s.materialize()
    for t in range(1, 11):
        s.record_at(AN(t), t)
    s.close_tick()
    s.materialize()
    for t in range(11):
        if t != 5:
            assert (s.select_base(t, SelectionPolicy.TIME_BASED).tick
                    == s.select_base(t, SelectionPolicy.OPERATION_BASED).tick)
    # tie goes to the later entry
    assert s.select_base(5, SelectionPolicy.TIME_BASED).tick == 10


def test_select_base_empty():
    s = SnapshotStore()
    with pytest.raises(EmptyCatalog):
        select_base([], s.log, 0)


def test_backward_base():
    s = skewed_store()
    assert s.backward_base(4).as_of == 10
    assert s.backward_base(0).as_of == 0


# -- persistence -------------------------------------------------------------


def test_manifest_roundtrip():
    entries = [(0, "snap_0.snap"), (10, "snap_10.snap")]
    text = format_manifest(entries)
    assert text == "CATALOG\n0 snap_0.snap\n10 snap_10.snap\n"
    assert parse_manifest(text) == entries


@pytest.mark.parametrize("text", ["", "CATALOG", "CAT\n", "CATALOG\n3 a\n3 b\n", "CATALOG\nx a\n", "CATALOG\n01 a\n"])
def test_manifest_errors(text):
    with pytest.raises(ParseError):
        parse_manifest(text)


@pytest.mark.parametrize("seed", range(3))
def test_save_and_open(tmp_path, seed):
    rng = random.Random(seed)
    stream = random_stream(rng, 50, 3)
    d = tmp_path / "store"
    s = SnapshotStore(d, Periodic(10))
    s.ingest(stream, 55)
    s.save()
    back = SnapshotStore.open(d)
    assert back.log == s.log
    assert back.current == s.current
    assert [e.tick for e in back.materialized] == [10, 20, 30, 40, 50, 55]
    for e in back.materialized:
        assert as_sets(e.snapshot) == oracle_replay(s.log.records, e.tick)
    for t in range(0, 56, 3):
        assert back.reconstruct(t) == s.reconstruct(t)


def test_open_recovers_unsaved_tail(tmp_path):
    d = tmp_path / "store"
    s = SnapshotStore(d, Periodic(5))
    rng = random.Random(4)
    s.ingest(random_stream(rng, 12, 3), 12)
    # no save(): current is rebuilt from the newest materialized entry plus the log
    back = SnapshotStore.open(d)
    assert back.t_cur == 12
    assert back.current == s.current
    assert read_log(d / "delta.log") == s.log


def test_reopen_and_continue(tmp_path):
    d = tmp_path / "store"
    s = SnapshotStore(d)
    s.ingest([(1, AN(1)), (2, AN(2))])
    s.save()
    back = SnapshotStore.open(d)
    back.record_at(AE(1, 2), 4)
    back.close_tick()
    again = SnapshotStore.open(d)
    assert as_sets(again.current) == ({1, 2}, {(1, 2)})
    assert again.t_cur == 4


def test_create_refuses_existing(tmp_path):
    SnapshotStore(tmp_path)
    with pytest.raises(FileExistsError):
        SnapshotStore(tmp_path)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([Periodic(7), OpCount(9), Similarity(6), None]))
def test_current_equals_oracle(seed, policy):
    rng = random.Random(seed)
    stream = random_stream(rng, 30, 3)
    s = SnapshotStore.from_stream(stream, 32, materialization=policy)
    assert as_sets(s.current) == oracle_replay(s.log.records, 32)
    for t in range(0, 33, 4):
        assert as_sets(s.reconstruct(t)) == oracle_replay(s.log.records, t)
