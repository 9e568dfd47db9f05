"""Stack linearizability monitor.

The decision procedure works on the value-centric view of a completed,
differentiated history: each value's I-segment [push-return, pop-call] is
a window where the value is certainly inside the stack.  Maximal unions
of overlapping I-segments form P-segments (the stack cannot be empty
there); the gaps between them, plus the two ends of the history, form
D-segments (the stack may be empty there).  The recursion strips extreme
values while they exist, fails when no extreme value exists and at most
two D-segments remain, and otherwise splits the history around the first
internal D-segment and decides both halves independently.  Total work is
quadratic in the number of operations.
"""

from __future__ import annotations

from typing import Callable, Iterable

from .history import (
    POP,
    POP_EMPTY,
    PUSH,
    AttributedValue,
    History,
    HistoryError,
    Interval,
    Verdict,
    WorkCounter,
    complete_history,
    differentiate,
    remove_overlapping_pairs,
)

Observer = Callable[[tuple, list, list, set], None]


def op_to_val(h: History) -> dict[int, AttributedValue]:
    """Extract the value-centric view: one attributed value per value.

    Requires a differentiated, matched history with no same-value overlap
    (the monitor's preprocessing guarantees this).
    """
    push_ops: dict[int, tuple[int, int]] = {}
    pop_ops: dict[int, tuple[int, int]] = {}
    for op in h.ops:
        if op.event.kind == PUSH:
            if op.event.value in push_ops:
                raise HistoryError(f"value {op.event.value} pushed twice")
            push_ops[op.event.value] = (op.call, op.ret)
        elif op.event.kind == POP:
            if op.event.value in pop_ops:
                raise HistoryError(f"value {op.event.value} popped twice")
            pop_ops[op.event.value] = (op.call, op.ret)
    if set(push_ops) != set(pop_ops):
        odd = (set(push_ops) ^ set(pop_ops)).pop()
        raise HistoryError(f"value {odd} is missing its push or pop")
    return {
        v: AttributedValue(v, pc, pr, pop_ops[v][0], pop_ops[v][1])
        for v, (pc, pr) in push_ops.items()
    }


def _as_vals(vals: Iterable[AttributedValue] | dict[int, AttributedValue]) -> list[AttributedValue]:
    if isinstance(vals, dict):
        return list(vals.values())
    return list(vals)


def _sweep_p(vals: list[AttributedValue], counter: WorkCounter | None) -> list[tuple[int, int]]:
    """Merge I-segments into P-segments; vals must be sorted by push-return."""
    first = vals[0]
    left, right = first.push_ret, first.pop_call
    out: list[tuple[int, int]] = []
    for v in vals[1:]:
        if v.push_ret <= right:
            if v.pop_call > right:
                right = v.pop_call
        else:
            out.append((left, right))
            left, right = v.push_ret, v.pop_call
    out.append((left, right))
    if counter is not None:
        counter.add(len(vals))
    return out


def _gaps_d(lo: int, hi: int, p: list[tuple[int, int]],
            counter: WorkCounter | None) -> list[tuple[int, int]]:
    if not p:
        return [(lo, hi)]
    out = [(lo, p[0][0])]
    for i in range(1, len(p)):
        out.append((p[i - 1][1], p[i][0]))
    out.append((p[-1][1], hi))
    if counter is not None:
        counter.add(len(p) + 1)
    return out


def _extreme_set(vals: list[AttributedValue], d_first: tuple[int, int],
                 d_last: tuple[int, int], counter: WorkCounter | None) -> set[int]:
    out = set()
    for v in vals:
        if (v.push_call <= d_first[1] and d_first[0] <= v.push_ret
                and v.pop_call <= d_last[1] and d_last[0] <= v.pop_ret):
            out.add(v.value)
    if counter is not None:
        counter.add(len(vals))
    return out


def p_segments(vals: Iterable[AttributedValue] | dict[int, AttributedValue]) -> list[Interval]:
    """Compute the P-segments of a set of attributed values.

    Values are swept in push-return order; a value joins the segment under
    construction iff its push returns no later than the segment's right
    end, extending the segment to its pop-call when that reaches further.
    """
    vs = sorted(_as_vals(vals), key=lambda v: v.push_ret)
    if not vs:
        raise HistoryError("p_segments needs at least one value")
    return [Interval(a, b) for a, b in _sweep_p(vs, None)]


def _history_span(h: History) -> tuple[int, int]:
    if not h.ops:
        raise HistoryError("empty history has no span")
    return min(op.call for op in h.ops), max(op.ret for op in h.ops)


def d_segments(h: History, p_segs: list[Interval]) -> list[Interval]:
    """Compute the D-segments: the complement of the P-segments.

    The span runs from the start to the end of the whole history, which
    for a completed overlap-free history is the earliest push-call and the
    latest pop-return; pop-empty operations extend it when they stick out.
    Always returns len(p_segs) + 1 intervals, the first and last possibly
    zero-length.
    """
    lo, hi = _history_span(h)
    p = [seg.as_pair() for seg in sorted(p_segs, key=lambda s: s.left)]
    return [Interval(a, b) for a, b in _gaps_d(lo, hi, p, None)]


def check_pop_empty(h: History, d_segs: list[Interval]) -> History | Verdict:
    """Remove pop-empty operations that can linearize inside a D-segment.

    A pop-empty is placeable iff its interval intersects some D-segment;
    an unplaceable one makes the whole history unlinearizable, returned as
    a Verdict carrying the failing interval.
    """
    kept = []
    for op in h.ops:
        if op.event.kind != POP_EMPTY:
            kept.append(op)
            continue
        iv = op.interval
        if not any(iv.intersects(d) for d in d_segs):
            return Verdict(False, {"kind": "pop-empty", "interval": iv.as_pair()})
    return History(h.adt, tuple(kept))


def extreme_values(vals: Iterable[AttributedValue] | dict[int, AttributedValue],
                   d_segs: list[Interval]) -> set[int]:
    """Values whose push meets the first D-segment and pop meets the last.

    Equivalently (for the histories reached by the monitor): values with a
    minimal push and a maximal pop, removable without affecting the
    verdict.
    """
    if not d_segs:
        raise HistoryError("extreme_values needs at least one D-segment")
    first, last = d_segs[0].as_pair(), d_segs[-1].as_pair()
    return _extreme_set(_as_vals(vals), first, last, None)


def partition(h: History, alpha: Interval) -> tuple[History, History]:
    """Split a history around an internal D-segment.

    The left part holds the values whose push returns at or before the
    left end of alpha; the right part holds the rest.  Deciding both parts
    independently is equivalent to deciding the whole history.
    """
    left_values = set()
    for op in h.ops:
        if op.event.kind == POP_EMPTY:
            raise HistoryError("partition expects a pop-empty-free history")
        if op.event.kind == PUSH and op.ret <= alpha.left:
            left_values.add(op.event.value)
    left_ops = tuple(op for op in h.ops if op.event.value in left_values)
    right_ops = tuple(op for op in h.ops if op.event.value not in left_values)
    return History(h.adt, left_ops), History(h.adt, right_ops)


def _with_original_values(values: Iterable[int], back: dict[int, int]) -> list[int]:
    return sorted(back.get(v, v) for v in values)


def stack_linearizable(h: History, *, counter: WorkCounter | None = None,
                       observer: Observer | None = None) -> Verdict:
    """Decide whether a stack history is linearizable.

    Preprocessing: value occurrences are differentiated, unmatched pushes
    completed with trailing concurrent pops, and values whose push and pop
    overlap dropped.  A value popped without a matching push, or popped
    strictly before its push, is a semantic violation and yields an
    unlinearizable verdict directly.

    The optional counter accumulates loop iterations across all recursive
    steps (the quadratic work bound); the optional observer is called with
    (values, p_segments, d_segments, extremes) at every recursion step.
    """
    if h.adt != "stack":
        raise HistoryError(f"stack monitor got adt {h.adt!r}")
    pushes: dict[int, int] = {}
    pops: dict[int, int] = {}
    for op in h.ops:
        if op.event.kind == PUSH:
            pushes[op.event.value] = pushes.get(op.event.value, 0) + 1
        elif op.event.kind == POP:
            pops[op.event.value] = pops.get(op.event.value, 0) + 1
    for v, n in sorted(pops.items()):
        if n > pushes.get(v, 0):
            return Verdict(False, {"kind": "unmatched-pop", "value": v})

    dh, back = differentiate(h)
    dh = complete_history(dh)
    dh, popped_first = remove_overlapping_pairs(dh)
    if popped_first:
        return Verdict(False, {"kind": "pop-before-push",
                               "value": back.get(popped_first[0], popped_first[0])})

    vals = sorted(op_to_val(dh).values(), key=lambda v: v.push_ret)
    pop_empties = [op.interval for op in dh.ops if op.event.kind == POP_EMPTY]

    # Pop-empty placement is a one-time check against the top-level
    # D-segments, spanning the entire history (pop-empty intervals may
    # stick out past the first push or the last pop).
    if pop_empties:
        if vals:
            spans = [v.push_call for v in vals] + [iv.left for iv in pop_empties]
            ends = [v.pop_ret for v in vals] + [iv.right for iv in pop_empties]
            p = _sweep_p(vals, counter)
            d = _gaps_d(min(spans), max(ends), p, counter)
        else:
            d = [(min(iv.left for iv in pop_empties),
                  max(iv.right for iv in pop_empties))]
        for iv in pop_empties:
            if counter is not None:
                counter.add(len(d))
            if not any(iv.left <= b and a <= iv.right for a, b in d):
                return Verdict(False, {"kind": "pop-empty", "interval": iv.as_pair()})

    pending = [vals]
    while pending:
        vs = pending.pop()
        if not vs:
            continue
        lo = min(v.push_call for v in vs)
        hi = max(v.pop_ret for v in vs)
        p = _sweep_p(vs, counter)
        d = _gaps_d(lo, hi, p, counter)
        ex = _extreme_set(vs, d[0], d[-1], counter)
        if observer is not None:
            observer(tuple(vs), [Interval(a, b) for a, b in p],
                     [Interval(a, b) for a, b in d], set(ex))
        if ex:
            pending.append([v for v in vs if v.value not in ex])
            if counter is not None:
                counter.add(len(vs))
        elif len(d) <= 2:
            return Verdict(False, {"kind": "no-separation",
                                   "values": _with_original_values(
                                       (v.value for v in vs), back)})
        else:
            cut = d[1][0]
            left = [v for v in vs if v.push_ret <= cut]
            right = [v for v in vs if v.push_ret > cut]
            if counter is not None:
                counter.add(len(vs))
            assert left and right, "internal D-segment must split nontrivially"
            pending.append(left)
            pending.append(right)
    return Verdict(True)
