"""Traces of runs and the resource predicates checked against them.

A trace stores the input length, the total time and the queries (step,
query length, answer length); every other step is a plain step, and the last
step of a halted run is its halt. Events are materialized only on demand so
multi-million-step runs stay cheap.
"""
from __future__ import annotations
import os
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, NamedTuple, Sequence
from ._internal.comtypes import Filepath, Verdict
from ._internal.errors import LowerBoundError, ProgramFormatError
from ._internal.utilities import log
from .sopoly import Description, LengthFn, UniPoly, eval_description, sp_bound


__all__ = [
    "EventKind",
    "Event",
    "QueryRecord",
    "Trace",
    "Segment",
    "profile_segments",
    "revision_profile",
    "count_revisions",
    "revision_range",
    "check_step_count",
    "check_running_time",
    "check_opt",
    "fit_constant",
    "sp_time_bound",
    "dumps_trace",
    "loads_trace",
    "dump_trace",
    "load_trace",
]




class EventKind(str, Enum):
    PLAIN = "plain"
    QUERY = "query"
    HALT  = "halt"


class Event(NamedTuple):
    step         : int
    kind         : EventKind
    query_length : int = 0
    answer_length: int = 0


class QueryRecord(NamedTuple):
    step         : int
    query_length : int
    answer_length: int


@dataclass(frozen=True)
class Trace:
    """Accounting of one run.

    Args:
        * input_length (int): |a|.
        * time (int): Number of executed steps; also the number of events.
        * queries (tuple[QueryRecord, ...], optional): Query steps in order.
        * halted (bool, optional): Whether the last step was a halt.
    """
    input_length: int
    time        : int
    queries     : tuple[QueryRecord, ...] = ()
    halted      : bool = False

    def __post_init__(self):
        object.__setattr__(self, "queries", tuple(QueryRecord(*q) for q in self.queries))
        last = 0
        for q in self.queries:
            if not last < q.step <= self.time:
                raise ValueError(f"query step {q.step} out of order or past the time {self.time}")
            last = q.step
        if self.halted and self.queries and self.queries[-1].step == self.time:
            raise ValueError("the halting step cannot also be a query")

    def __len__(self) -> int:
        return self.time

    def events(self) -> Iterator[Event]:
        queries = iter(self.queries)
        nxt = next(queries, None)
        for s in range(1, self.time + 1):
            if nxt is not None and nxt.step == s:
                yield Event(s, EventKind.QUERY, nxt.query_length, nxt.answer_length)
                nxt = next(queries, None)
            elif self.halted and s == self.time:
                yield Event(s, EventKind.HALT)
            else:
                yield Event(s, EventKind.PLAIN)

    @property
    def m(self) -> int:
        """Largest of the input length and every answer length."""
        return max([self.input_length, *(q.answer_length for q in self.queries)])

    @classmethod
    def from_events(cls, input_length: int, events: Iterable[Event | Sequence]) -> Trace:
        queries = []
        time = 0
        halted = False
        for e in events:
            e = Event(*e)
            time += 1
            if e.step != time:
                raise ValueError(f"event {e.step} out of sequence (expected {time})")
            halted = EventKind(e.kind) is EventKind.HALT
            if EventKind(e.kind) is EventKind.QUERY:
                queries.append(QueryRecord(e.step, e.query_length, e.answer_length))
        return cls(input_length, time, tuple(queries), halted)




####################################################################################
#################################### Operations ####################################
####################################################################################

def _revisions(tr: Trace) -> Iterator[tuple[int, int]]:
    """(step, new value) for each strict increase of the profile."""
    o = tr.input_length
    for q in tr.queries:
        if q.answer_length > o:
            o = q.answer_length
            yield q.step, o


class Segment(NamedTuple):
    """Steps `lo..hi` (inclusive) on which the profile holds `value`."""
    lo   : int
    hi   : int
    value: int


def profile_segments(tr: Trace) -> list[Segment]:
    """The non-empty constant segments of `o(0), ..., o(time)`, in order."""
    segments = []
    o, start = tr.input_length, 0
    for s, value in _revisions(tr):
        if s - 1 >= start:
            segments.append(Segment(start, s - 1, o))
        o, start = value, s
    segments.append(Segment(start, tr.time, o))
    return segments


def revision_profile(tr: Trace) -> list[int]:
    """`o(0), ..., o(time)`: the running maximum of the input length and the
    answer lengths seen after each step.
    """
    profile = [tr.input_length] * (tr.time + 1)
    o = tr.input_length
    prev = 0
    for s, value in _revisions(tr):
        for i in range(prev, s):
            profile[i] = o
        o, prev = value, s
    for i in range(prev, tr.time + 1):
        profile[i] = o
    return profile


def count_revisions(tr: Trace) -> int:
    """Number of strict increases of the profile."""
    return sum(1 for _ in _revisions(tr))


def revision_range(tr: Trace) -> int:
    """Number of distinct profile values, `#o(ω)`; one more than
    `count_revisions`.
    """
    return count_revisions(tr) + 1


def check_step_count(tr: Trace, t: UniPoly) -> Verdict:
    """Pass iff `n <= t(o(n))` for every `n <= time`. The least violating `n`
    is the witness.
    """
    # within a constant segment of o the tightest n is its last one
    for lo, hi, value in profile_segments(tr):
        limit = t(value)
        if hi > limit:
            n = max(lo, limit + 1)
            return Verdict(False, n, f"step {n} > t(o({n})) = t({value}) = {limit}")
    return Verdict(True, None, f"time {tr.time} within t(o(n)) at every step")


def check_running_time(tr: Trace, T: Description, l: LengthFn, *, max_bits: int | None = None) -> Verdict:
    """Pass iff `time <= T(l, |a|)`. A pass is unsound when `l` is only a lower
    bound of the oracle's size function, and raises `LowerBoundError`.
    """
    bound = eval_description(T, l, tr.input_length, max_bits=max_bits)
    if tr.time <= bound:
        if not getattr(l, "exact", True):
            raise LowerBoundError(f"time {tr.time} <= {bound} at input length {tr.input_length}")
        return Verdict(True, None, f"time {tr.time} <= T(l,{tr.input_length}) = {bound}")
    return Verdict(False, tr.input_length, f"time {tr.time} > T(l,{tr.input_length}) = {bound}")


def check_opt(tr: Trace, t: UniPoly) -> Verdict:
    """Pass iff `time <= t(m)`."""
    m = tr.m
    bound = t(m)
    if tr.time <= bound:
        return Verdict(True, None, f"time {tr.time} <= t(m) = t({m}) = {bound}")
    return Verdict(False, tr.time, f"time {tr.time} > t(m) = t({m}) = {bound}")


def fit_constant(samples: Iterable[tuple[int, int]]) -> int:
    """Least natural `C` with `time <= C * bound` for every `(time, bound)`
    sample; how the frozen constants were obtained.
    """
    c = 0
    for time, bound in samples:
        if bound <= 0:
            if time > 0:
                raise ValueError(f"time {time} cannot be bounded by a multiple of {bound}")
            continue
        c = max(c, -(-time // bound))
    return c


def sp_time_bound(t: UniPoly, revisions: int) -> Description:
    """Running-time description implied by step-count `t` and at most
    `revisions` length revisions.
    """
    return sp_bound(t, revisions)




####################################################################################
#################################### Documents #####################################
####################################################################################
# `# input_length=N time=T halted=0|1` followed by one line per event:
# `step plain`, `step query QLEN ALEN` or `step halt`. Sparse dumps omit plain
# lines; the header keeps the total.

def dumps_trace(tr: Trace, *, sparse: bool = False) -> str:
    lines = [f"# input_length={tr.input_length} time={tr.time} halted={int(tr.halted)}"]
    if sparse:
        lines.extend(f"{q.step} query {q.query_length} {q.answer_length}" for q in tr.queries)
        if tr.halted:
            lines.append(f"{tr.time} halt")
    else:
        for e in tr.events():
            if e.kind is EventKind.QUERY:
                lines.append(f"{e.step} query {e.query_length} {e.answer_length}")
            else:
                lines.append(f"{e.step} {e.kind.value}")
    return "\n".join(lines) + "\n"


def loads_trace(text: str) -> Trace:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or rows[0][0] != "#":
        raise ProgramFormatError("trace header missing")
    try:
        header = dict(field.split("=", 1) for field in rows[0][1:])
        input_length = int(header["input_length"])
        time = int(header["time"])
        halted = bool(int(header.get("halted", "0")))
        queries = []
        for row in rows[1:]:
            step, kind = int(row[0]), EventKind(row[1])
            if kind is EventKind.QUERY:
                queries.append(QueryRecord(step, int(row[2]), int(row[3])))
            elif kind is EventKind.HALT and (not halted or step != time):
                raise ProgramFormatError(f"halt event at step {step} disagrees with the header")
        return Trace(input_length, time, tuple(queries), halted)
    except (KeyError, IndexError, ValueError) as e:
        if isinstance(e, ProgramFormatError):
            raise
        raise ProgramFormatError(f"bad trace ({e})") from None


def dump_trace(tr: Trace, path: Filepath, *, sparse: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_trace(tr, sparse=sparse))
    log("debug", "trace", f"wrote {tr.time} steps", os.fspath(path))


def load_trace(path: Filepath) -> Trace:
    with open(path, "r", encoding="utf-8") as f:
        return loads_trace(f.read())
