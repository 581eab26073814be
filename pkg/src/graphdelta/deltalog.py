"""Append-only, tick-stamped operation log and its on-disk format.

Record ``seq`` is the position in the log. Ticks never decrease along seq,
several records may share a tick. The snapshot "at t" is the result of
applying every record with tick <= t, so log slices are half-open
``(t_a, t_b]``.

Removing a node is always logged as one RemEdge per incident edge followed
by the RemNode, all at the same tick. That keeps every record invertible on
its own.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Literal, Optional, Union

from .errors import InvalidRange, NonMonotonicTime, ParseError
from .graph import GraphLike, GraphOp, OpKind, check_op
from .index import TemporalIndex

Direction = Literal["forward", "backward"]


@dataclass(frozen=True)
class TimedOp:
    op: GraphOp
    t: int
    seq: int

    def __str__(self) -> str:
        return format_record(self)


def expand(op: GraphOp, live: GraphLike) -> list[GraphOp]:
    """Operations to log for ``op`` against the current graph ``live``.

    RemNode becomes RemEdge for each incident edge (ascending neighbor) and
    then the RemNode itself. Preconditions are checked against ``live``.
    """
    check_op(live, op)
    if op.kind is OpKind.REM_NODE:
        out = [GraphOp.rem_edge(op.u, x) for x in sorted(live.neighbors(op.u))]
        out.append(op)
        return out
    return [op]


@dataclass
class LogSlice:
    """Records with ``t_a < t <= t_b``, in seq order or reverse seq order."""

    log: "DeltaLog"
    t_a: int
    t_b: int
    direction: Direction = "forward"

    def bounds(self) -> tuple[int, int]:
        return self.log.tindex.span(self.t_a, self.t_b)

    def __iter__(self) -> Iterator[TimedOp]:
        lo, hi = self.bounds()
        recs = self.log.records
        if self.direction == "forward":
            for i in range(lo, hi):
                yield recs[i]
        else:
            for i in range(hi - 1, lo - 1, -1):
                yield recs[i]

    def __len__(self) -> int:
        lo, hi = self.bounds()
        return hi - lo


@dataclass
class DeltaLog:
    t0: int = 0
    t_cur: Optional[int] = None
    records: list[TimedOp] = field(default_factory=list)

    def __post_init__(self):
        if self.t_cur is None:
            self.t_cur = self.t0
        if self.t_cur < self.t0:
            raise InvalidRange(f"t_cur={self.t_cur} < t0={self.t0}")
        recs, self.records = self.records, []
        self.tindex = TemporalIndex()
        self._listeners: list[Callable[[TimedOp], None]] = []
        for rec in recs:
            self.push(rec.op, rec.t)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TimedOp]:
        return iter(self.records)

    def __eq__(self, other):
        if not isinstance(other, DeltaLog):
            return NotImplemented
        return (self.t0, self.t_cur, self.records) == (other.t0, other.t_cur, other.records)

    @property
    def last_time(self) -> int:
        return self.records[-1].t if self.records else self.t0

    def subscribe(self, fn: Callable[[TimedOp], None]) -> None:
        """Call ``fn`` with every record appended from now on."""
        self._listeners.append(fn)

    def _check_time(self, t: int) -> None:
        # records at t0 would contradict the base snapshot, which is the state at t0
        if t <= self.t0:
            raise NonMonotonicTime(f"record tick {t} must be after t0={self.t0}")
        if t < self.last_time:
            raise NonMonotonicTime(f"tick {t} precedes last record tick {self.last_time}")

    def push(self, op: GraphOp, t: int) -> TimedOp:
        """Append one record without precondition checks (replaying trusted data)."""
        self._check_time(t)
        rec = TimedOp(op, t, len(self.records))
        self.records.append(rec)
        self.tindex.on_append(rec)
        if t > self.t_cur:
            self.t_cur = t
        for fn in self._listeners:
            fn(rec)
        return rec

    def append(self, op: GraphOp, t: int, live: GraphLike) -> list[TimedOp]:
        """Log ``op`` at tick ``t`` against the current graph ``live``.

        ``live`` is not modified; the caller applies the returned records to it.
        """
        self._check_time(t)
        return [self.push(x, t) for x in expand(op, live)]

    def advance(self, t: int) -> None:
        if t < self.t_cur:
            raise NonMonotonicTime(f"cannot move t_cur back from {self.t_cur} to {t}")
        self.t_cur = t

    def slice(self, t_a: int, t_b: int, direction: Direction = "forward") -> LogSlice:
        if t_a > t_b:
            raise InvalidRange(f"t_a={t_a} > t_b={t_b}")
        if direction not in ("forward", "backward"):
            raise ValueError(f"unknown direction {direction!r}")
        return LogSlice(self, t_a, t_b, direction)

    def count_ops(self, t_a: int, t_b: int) -> int:
        lo, hi = self.tindex.span(t_a, t_b)
        return hi - lo


def slice(log: DeltaLog, t_a: int, t_b: int, direction: Direction = "forward") -> LogSlice:  # noqa: A001
    return log.slice(t_a, t_b, direction)


def count_ops(log: DeltaLog, t_a: int, t_b: int) -> int:
    return log.count_ops(t_a, t_b)


# -- file format -------------------------------------------------------------
#
#   DELTA <t0> <t_cur>
#   <t> AN <id> | <t> RN <id> | <t> AE <a> <b> | <t> RE <a> <b>
#
# Appends go straight to the end of the file; the sidecar ``<name>.cur``
# holds "<t_cur> <record_count>" and is authoritative over the header.


def format_record(rec: TimedOp) -> str:
    op = rec.op
    if op.v is None:
        return f"{rec.t} {op.kind.value} {op.u}"
    return f"{rec.t} {op.kind.value} {op.u} {op.v}"


_KINDS = {k.value: k for k in OpKind}


def _uint(token: str, lineno: int) -> int:
    if not token.isdigit() or (len(token) > 1 and token[0] == "0"):
        raise ParseError(lineno, f"expected an unsigned integer, got {token!r}")
    return int(token)


def parse_record(line: str, lineno: int) -> tuple[int, GraphOp]:
    parts = line.split(" ")
    if len(parts) < 3:
        raise ParseError(lineno, f"truncated record {line!r}")
    t = _uint(parts[0], lineno)
    kind = _KINDS.get(parts[1])
    if kind is None:
        raise ParseError(lineno, f"unknown opcode {parts[1]!r}")
    if kind.is_node_op:
        if len(parts) != 3:
            raise ParseError(lineno, f"{parts[1]} takes one node id")
        return t, GraphOp(kind, _uint(parts[2], lineno))
    if len(parts) != 4:
        raise ParseError(lineno, f"{parts[1]} takes two node ids")
    a, b = _uint(parts[2], lineno), _uint(parts[3], lineno)
    if a >= b:
        raise ParseError(lineno, "edge endpoints must satisfy a < b")
    return t, GraphOp(kind, a, b)


def format_log(log: DeltaLog) -> str:
    lines = [f"DELTA {log.t0} {log.t_cur}"]
    lines.extend(format_record(r) for r in log.records)
    return "\n".join(lines) + "\n"


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".cur")


def _read_header(line: str) -> tuple[int, int]:
    parts = line.split(" ")
    if len(parts) != 3 or parts[0] != "DELTA":
        raise ParseError(1, f"bad header {line!r}")
    return _uint(parts[1], 1), _uint(parts[2], 1)


def iter_log_file(path: Union[str, Path]) -> Iterator[tuple[int, int, GraphOp]]:
    """Yield ``(line_number, tick, op)`` for every record line; checks the header."""
    with open(path, "r", encoding="ascii", newline="\n") as fh:
        first = fh.readline()
        if not first.endswith("\n"):
            raise ParseError(1, "missing header")
        _read_header(first[:-1])
        for lineno, line in enumerate(fh, start=2):
            if not line.endswith("\n"):
                raise ParseError(lineno, "missing final newline")
            t, op = parse_record(line[:-1], lineno)
            yield lineno, t, op


def read_log_header(path: Union[str, Path]) -> tuple[int, int]:
    with open(path, "r", encoding="ascii", newline="\n") as fh:
        first = fh.readline()
    if not first.endswith("\n"):
        raise ParseError(1, "missing header")
    return _read_header(first[:-1])


def read_log(path: Union[str, Path]) -> DeltaLog:
    path = Path(path)
    t0, t_cur = read_log_header(path)
    log = DeltaLog(t0=t0)
    for lineno, t, op in iter_log_file(path):
        try:
            log.push(op, t)
        except NonMonotonicTime as exc:
            raise ParseError(lineno, str(exc)) from None
    side = _sidecar(path)
    if side.exists():
        t_side, count = _parse_sidecar(side.read_text(encoding="ascii"))
        if count != len(log.records):
            raise ParseError(0, f"sidecar expects {count} records, file has {len(log.records)}")
        t_cur = t_side
    if t_cur < log.t_cur:
        raise ParseError(1, f"t_cur={t_cur} precedes last record tick {log.t_cur}")
    log.t_cur = t_cur
    return log


def _parse_sidecar(text: str) -> tuple[int, int]:
    parts = text.rstrip("\n").split(" ")
    if len(parts) != 2:
        raise ParseError(1, f"bad sidecar {text!r}")
    return _uint(parts[0], 1), _uint(parts[1], 1)


def write_log(path: Union[str, Path], log: DeltaLog) -> None:
    path = Path(path)
    path.write_bytes(format_log(log).encode("ascii"))
    _sidecar(path).write_bytes(f"{log.t_cur} {len(log.records)}\n".encode("ascii"))


class LogAppender:
    """Keeps a delta file in step with an in-memory log by pure appends."""

    def __init__(self, path: Union[str, Path], log: DeltaLog):
        self.path = Path(path)
        self.log = log
        if not self.path.exists():
            write_log(self.path, log)
        self.flushed = len(log.records)

    def flush(self) -> None:
        pending = self.log.records[self.flushed:]
        if pending:
            with open(self.path, "a", encoding="ascii", newline="\n") as fh:
                fh.write("".join(format_record(r) + "\n" for r in pending))
            self.flushed = len(self.log.records)
        tmp = _sidecar(self.path).with_suffix(".tmp")
        tmp.write_bytes(f"{self.log.t_cur} {self.flushed}\n".encode("ascii"))
        os.replace(tmp, _sidecar(self.path))
