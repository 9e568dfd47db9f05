"""Set and multiset linearizability monitors.

Both checkers are online: they consume the call/return events of a
history in timestamp order and decide in a single pass.  For multisets
(add/remove only) the whole criterion is a per-value count: a prefix in
which returned removes outnumber called adds is exactly a violation.

The set checker additionally tracks membership queries and a per-value
state in {present, absent, unknown}.  Calls bank "active" credits for
adds and removes; a return that needs the opposite state first linearizes
one banked credit of the other kind (ensure_state), and failing that, the
history is unlinearizable.  Pending membership queries are satisfied by
any state flip that matches their expected answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .history import (
    ADD,
    CONTAINS,
    REMOVE,
    Event,
    History,
    HistoryError,
    Operation,
    Verdict,
    WorkCounter,
)

# A stream element: (timestamp, is_call, operation).  At call time the
# operation's outcome may still be unknown (None) when fed from a live
# recording; the checkers handle both shapes.
StreamEvent = tuple[int, bool, Operation]


@dataclass
class _OpCounters:
    active: int = 0
    linearized: int = 0


@dataclass
class SetValueState:
    """Per-value checker state: add/remove credits, pending queries, state."""

    adds: _OpCounters = field(default_factory=_OpCounters)
    removes: _OpCounters = field(default_factory=_OpCounters)
    pending: dict[int, bool | None] = field(default_factory=dict)
    state: bool | None = None  # None is the unknown initial state


def history_events(h: History) -> list[StreamEvent]:
    """Flatten a history into its call/return events in timestamp order."""
    out: list[StreamEvent] = []
    for op in h.ops:
        out.append((op.call, True, op))
        out.append((op.ret, False, op))
    out.sort(key=lambda e: e[0])
    return out


def normalize_failing_ops(h: History) -> History:
    """Replace failing adds/removes by the membership query they imply.

    A failing add means the element was already present: contains(v, true).
    A failing remove means it was absent: contains(v, false).
    """
    if h.adt != "set":
        raise HistoryError("failing-operation normalization applies to sets")
    ops = []
    for op in h.ops:
        ev = op.event
        if ev.kind == ADD and ev.outcome is False:
            ops.append(Operation(op.id, Event(CONTAINS, ev.value, True), op.call, op.ret))
        elif ev.kind == REMOVE and ev.outcome is False:
            ops.append(Operation(op.id, Event(CONTAINS, ev.value, False), op.call, op.ret))
        else:
            ops.append(op)
    return History(h.adt, tuple(ops))


def _assign_state(st: SetValueState, q: bool) -> None:
    """Flip the per-value state, releasing the pending queries this satisfies.

    A flip between the two real states satisfies every pending query (each
    expects the opposite of the state at its call, and both phases now
    exist).  Establishing the state from unknown only releases queries
    matching the established value, except that reaching present consumes
    an add and therefore passes through absent first, satisfying both.
    """
    old = st.state
    if old is q:
        return
    if old is None and q is False:
        drop = [i for i, exp in st.pending.items() if exp is False]
        for i in drop:
            del st.pending[i]
    else:
        st.pending.clear()
    st.state = q


def ensure_state(st: SetValueState, q: bool) -> bool:
    """Force the per-value state to q, consuming a banked credit if needed.

    Returns False when no active operation can justify the change; the
    caller then declares the history unlinearizable.  From the unknown
    initial state, absence is free (the set starts empty) while presence
    requires linearizing an active add.
    """
    if st.state is q:
        return True
    if st.state is None and q is False:
        _assign_state(st, False)
        return True
    counters = st.adds if q else st.removes
    counters.linearized += 1
    if counters.active < counters.linearized:
        return False
    _assign_state(st, q)
    return True


def _fail(value: int, ts: int, reason: str) -> Verdict:
    return Verdict(False, {"kind": "set-violation", "value": value,
                           "timestamp": ts, "reason": reason})


def set_linearizable_events(events: Iterable[StreamEvent],
                            counter: WorkCounter | None = None,
                            observer=None) -> Verdict:
    """Run the online set checker over an ordered event stream."""
    states: dict[int, SetValueState] = {}
    for ts, is_call, op in events:
        ev = op.event
        if ev.kind not in (ADD, REMOVE, CONTAINS):
            raise HistoryError(f"event kind {ev.kind!r} illegal for sets")
        if counter is not None:
            counter.add(1)
        st = states.get(ev.value)
        if st is None:
            st = states[ev.value] = SetValueState()
        if is_call:
            if ev.kind == ADD:
                st.adds.active += 1
            elif ev.kind == REMOVE:
                st.removes.active += 1
            else:
                # Queries whose answer already matches the state linearize
                # at the call; with the answer unknown (live stream) the
                # query is parked and resolved at its return.
                if ev.outcome is None or ev.outcome is not st.state:
                    st.pending[op.id] = ev.outcome
                    if counter is not None:
                        counter.add(1)
        else:
            if ev.kind == ADD:
                if ev.outcome is False:
                    raise HistoryError("failing add reached the set checker; "
                                       "normalize_failing_ops first")
                if st.adds.linearized == 0:
                    if not ensure_state(st, False):
                        return _fail(ev.value, ts, "ensure-state-failure")
                    _assign_state(st, True)
                else:
                    st.adds.linearized -= 1
                st.adds.active -= 1
            elif ev.kind == REMOVE:
                if ev.outcome is False:
                    raise HistoryError("failing remove reached the set checker; "
                                       "normalize_failing_ops first")
                if st.removes.linearized == 0:
                    if not ensure_state(st, True):
                        return _fail(ev.value, ts, "ensure-state-failure")
                    _assign_state(st, False)
                else:
                    st.removes.linearized -= 1
                st.removes.active -= 1
            else:
                if op.id in st.pending:
                    if ev.outcome is None:
                        raise HistoryError(f"contains id {op.id} returned no answer")
                    if not ensure_state(st, ev.outcome):
                        return _fail(ev.value, ts, "ensure-state-failure")
                    st.pending.pop(op.id, None)
                    if counter is not None:
                        counter.add(1)
        if observer is not None:
            observer(ts, ev.value, st)
    return Verdict(True)


def multiset_linearizable_events(events: Iterable[StreamEvent],
                                 counter: WorkCounter | None = None) -> Verdict:
    """Run the online multiset checker over an ordered event stream."""
    counts: dict[int, list[int]] = {}
    for ts, is_call, op in events:
        ev = op.event
        if ev.kind not in (ADD, REMOVE):
            raise HistoryError(f"event kind {ev.kind!r} illegal for multisets")
        if ev.outcome is False:
            raise HistoryError("failing operations are not defined for multisets")
        if counter is not None:
            counter.add(1)
        c = counts.get(ev.value)
        if c is None:
            c = counts[ev.value] = [0, 0]
        if ev.kind == ADD and is_call:
            c[0] += 1
        elif ev.kind == REMOVE and not is_call:
            c[1] += 1
            if c[1] > c[0]:
                return Verdict(False, {"kind": "set-violation", "value": ev.value,
                                       "timestamp": ts, "reason": "count-violation"})
    return Verdict(True)


def set_linearizable(h: History, *, counter: WorkCounter | None = None,
                     observer=None) -> Verdict:
    """Decide whether a set history (add/remove/contains) is linearizable."""
    if h.adt != "set":
        raise HistoryError(f"set monitor got adt {h.adt!r}")
    normalized = normalize_failing_ops(h)
    return set_linearizable_events(history_events(normalized), counter, observer)


def multiset_linearizable(h: History, *, counter: WorkCounter | None = None) -> Verdict:
    """Decide whether a multiset history (add/remove) is linearizable."""
    if h.adt != "multiset":
        raise HistoryError(f"multiset monitor got adt {h.adt!r}")
    return multiset_linearizable_events(history_events(h), counter)
