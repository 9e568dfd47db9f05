"""Shared test helpers: history builders and independent reference checks."""

from __future__ import annotations

from itertools import permutations

from limon import Event, History, Interval, Operation
from limon.oracle import sequential_check
from limon.queues import BLACK, RED, QTreeNode


def value_history(adt: str, rows) -> History:
    """Build a history from (value, push_call, push_ret, pop_call, pop_ret) rows;
    a None pop_call marks an unmatched push."""
    ops = []
    op_id = 0
    for value, pc, pr, qc, qr in rows:
        ops.append(Operation(op_id, Event("push", value), pc, pr))
        op_id += 1
        if qc is not None:
            ops.append(Operation(op_id, Event("pop", value), qc, qr))
            op_id += 1
    return History(adt, tuple(ops))


# Staggered walkthrough history (values 2..8): four P-segments, no extreme
# value, first internal D-segment [12,15].  Exercises every branch of the
# stack recursion: merge, partition, and batch extreme removal.
STAGGERED_ROWS = [
    (2, 3, 6, 9, 19),
    (3, 5, 8, 12, 14),
    (4, 7, 15, 20, 24),
    (5, 10, 16, 21, 25),
    (6, 11, 17, 22, 26),
    (7, 18, 23, 27, 28),
    (8, 13, 29, 31, 35),
]

# Queue walkthrough histories: (value, enq_call, enq_ret, deq_call, deq_ret).
# The first is linearizable; the second sandwiches value 5's total window
# inside value 3's certainty window, the critical pair (3, 5).
QUEUE_OK_ROWS = [
    (1, 3, 5, 10, 12),
    (2, 4, 8, 13, 16),
    (3, 6, 14, 25, 27),
    (4, 9, 15, 19, 21),
    (5, 7, 17, 18, 22),
    (6, 11, 20, 23, 26),
    (7, 24, 28, 29, 31),
]
QUEUE_BAD_ROWS = [
    (1, 3, 5, 10, 12),
    (2, 4, 8, 13, 16),
    (3, 6, 11, 25, 27),
    (4, 9, 15, 19, 21),
    (5, 14, 17, 18, 22),
    (6, 7, 20, 23, 26),
    (7, 24, 28, 29, 31),
]


def naive_linearizable(h: History) -> bool:
    """All-permutations enumerator; exact but factorial, keep inputs tiny."""
    ops = list(h.ops)
    for perm in permutations(ops):
        ordered = True
        for i in range(len(perm)):
            for j in range(i + 1, len(perm)):
                if perm[j].ret < perm[i].call:
                    ordered = False
                    break
            if not ordered:
                break
        if ordered and sequential_check([op.event for op in perm], h.adt):
            return True
    return False


def rb_check(root: QTreeNode | None) -> dict:
    """Recompute the red-black and augmentation invariants from scratch."""
    report = {"bst": True, "red_red": True, "black_uniform": True,
              "hkey": True, "height": 0, "size": 0}

    def walk(node, lo, hi):
        if node is None:
            return 1, 0, None  # black height, height, hkey
        report["size"] += 1
        if not (lo < node.lkey < hi):
            report["bst"] = False
        if node.color == RED:
            for child in (node.left, node.right):
                if child is not None and child.color == RED:
                    report["red_red"] = False
        lb, lh, lhk = walk(node.left, lo, node.lkey)
        rb, rh, rhk = walk(node.right, node.lkey, hi)
        if lb != rb:
            report["black_uniform"] = False
        expect = max(node.rkey, lhk if lhk is not None else node.rkey,
                     rhk if rhk is not None else node.rkey)
        if node.hkey != expect:
            report["hkey"] = False
        return lb + (1 if node.color == BLACK else 0), max(lh, rh) + 1, expect

    _, height, _ = walk(root, float("-inf"), float("inf"))
    report["height"] = height
    if root is not None and root.color != BLACK:
        report["red_red"] = False
    return report


def scan_container(entries: list[tuple[Interval, int]], q: Interval) -> set[int]:
    """Linear-scan reference for interval containment queries."""
    return {v for iv, v in entries if iv.contains(q)}
