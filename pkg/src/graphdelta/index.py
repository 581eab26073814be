"""In-memory access paths over a delta log.

Both indexes are built from a log's records and then kept current with
``on_append``. They never change an answer, only how much of the log is read.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

from .errors import InvalidRange

if TYPE_CHECKING:
    from .deltalog import TimedOp


class TemporalIndex:
    """Sparse tick -> first log position map, one entry per distinct tick."""

    def __init__(self):
        self.ticks: list[int] = []
        self.first_seq: list[int] = []
        self.size = 0

    @classmethod
    def build(cls, records: Iterable["TimedOp"]) -> "TemporalIndex":
        idx = cls()
        for rec in records:
            idx.on_append(rec)
        return idx

    def on_append(self, rec: "TimedOp") -> None:
        if not self.ticks or self.ticks[-1] != rec.t:
            self.ticks.append(rec.t)
            self.first_seq.append(rec.seq)
        self.size = rec.seq + 1

    def lookup(self, t: int) -> int:
        """First seq whose tick is >= t; ``size`` (past the end) if none."""
        i = bisect_left(self.ticks, t)
        return self.first_seq[i] if i < len(self.ticks) else self.size

    def span(self, t_a: int, t_b: int) -> tuple[int, int]:
        """Half-open seq range of the records with ``t_a < t <= t_b``."""
        if t_a > t_b:
            raise InvalidRange(f"t_a={t_a} > t_b={t_b}")
        return self.lookup(t_a + 1), self.lookup(t_b + 1)

    def __eq__(self, other):
        if not isinstance(other, TemporalIndex):
            return NotImplemented
        return (self.ticks, self.first_seq, self.size) == (other.ticks, other.first_seq, other.size)


class NodeIndex:
    """Node -> posting list of the seq positions of records that reference it."""

    def __init__(self, records: Sequence["TimedOp"]):
        # shares the log's record list; postings index into it
        self.records = records
        self.seqs: dict[int, list[int]] = {}
        self.times: dict[int, list[int]] = {}

    @classmethod
    def build(cls, records: Sequence["TimedOp"]) -> "NodeIndex":
        idx = cls(records)
        for rec in records:
            idx.on_append(rec)
        return idx

    def on_append(self, rec: "TimedOp") -> None:
        for node in rec.op.nodes:
            seqs = self.seqs.get(node)
            if seqs is None:
                self.seqs[node] = [rec.seq]
                self.times[node] = [rec.t]
            else:
                seqs.append(rec.seq)
                self.times[node].append(rec.t)

    def positions(self, v: int, t_a: int, t_b: int) -> list[int]:
        """Seq positions of records touching ``v`` with ``t_a < t <= t_b``, ascending."""
        if t_a > t_b:
            raise InvalidRange(f"t_a={t_a} > t_b={t_b}")
        times = self.times.get(v)
        if not times:
            return []
        lo = bisect_right(times, t_a)
        hi = bisect_right(times, t_b)
        return self.seqs[v][lo:hi]

    def ops_for_node(self, v: int, t_a: int, t_b: int) -> list["TimedOp"]:
        recs = self.records
        return [recs[s] for s in self.positions(v, t_a, t_b)]

    def ops_for_nodes(self, nodes: Iterable[int], t_a: int, t_b: int) -> list["TimedOp"]:
        """Union of the posting lists of ``nodes`` inside the range, in seq order, no duplicates."""
        merged: set[int] = set()
        for v in nodes:
            merged.update(self.positions(v, t_a, t_b))
        recs = self.records
        return [recs[s] for s in sorted(merged)]

    def iter_nodes(self) -> Iterator[int]:
        return iter(self.seqs)

    def __eq__(self, other):
        if not isinstance(other, NodeIndex):
            return NotImplemented
        return self.seqs == other.seqs and self.times == other.times


def build_temporal(log) -> TemporalIndex:
    return TemporalIndex.build(log.records)


def build_node(log) -> NodeIndex:
    return NodeIndex.build(log.records)
