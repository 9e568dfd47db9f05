"""Command-line frontend: limon check | gen | record | oracle | bench.

Exit codes: 0 linearizable, 1 unlinearizable, 2 malformed input,
3 internal error or oracle bound exceeded.  The mapping is stable.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Iterator, TextIO

from . import check_history
from .generators import (
    GenConfig,
    gen_linearizable,
    gen_random,
    gen_small_model_family,
    record_execution,
)
from .history import (
    ADTS,
    Event,
    History,
    HistoryError,
    Operation,
    ParseError,
    WorkCounter,
    parse_history,
    serialize_history,
)
from .history import _KIND_ALIASES, _check_kind, _parse_outcome, _parse_ts, _strip
from .oracle import BoundExceeded, brute_force_linearizable, saturation_baseline
from .sets import (
    StreamEvent,
    multiset_linearizable_events,
    set_linearizable_events,
)

EXIT_LINEARIZABLE = 0
EXIT_UNLINEARIZABLE = 1
EXIT_MALFORMED = 2
EXIT_INTERNAL = 3


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_verdict(verdict, verbose: bool) -> int:
    if verbose:
        witness = verdict.witness
        print(json.dumps({"linearizable": verdict.linearizable, "witness": witness}))
    else:
        print("linearizable" if verdict.linearizable else "unlinearizable")
    return EXIT_LINEARIZABLE if verdict.linearizable else EXIT_UNLINEARIZABLE


def _stream_events(fh: TextIO, adt: str) -> Iterator[StreamEvent]:
    """Incrementally parse event-format records for live set monitoring."""
    open_calls: dict[int, tuple[str, int | None, int]] = {}
    last_ts = -1
    next_lineno = 1
    for raw in fh:
        lineno = next_lineno
        next_lineno += 1
        line = _strip(raw)
        if not line:
            continue
        toks = line.split()
        if toks[0] == "call":
            if len(toks) != 5:
                raise ParseError("expected: call <id> <kind> <value> <ts>", lineno)
            op_id = int(toks[1])
            kind = _KIND_ALIASES.get(toks[2])
            value = int(toks[3])
            ts = _parse_ts(toks[4], lineno)
            if kind is None:
                raise ParseError(f"unknown event kind {toks[2]!r}", lineno)
            _check_kind(adt, kind, None, lineno)
            if ts <= last_ts:
                raise ParseError(f"stream timestamps must increase ({ts})", lineno)
            last_ts = ts
            if op_id in open_calls:
                raise ParseError(f"duplicate call for id {op_id}", lineno)
            open_calls[op_id] = (kind, value, ts)
            yield (ts, True, Operation(op_id, Event(kind, value), ts, ts + 1))
        elif toks[0] == "ret":
            if len(toks) not in (3, 4):
                raise ParseError("expected: ret <id> <ts> [<result>]", lineno)
            op_id = int(toks[1])
            ts = _parse_ts(toks[2], lineno)
            if op_id not in open_calls:
                raise ParseError(f"return without call for id {op_id}", lineno)
            kind, value, call_ts = open_calls.pop(op_id)
            outcome = None
            if len(toks) == 4:
                outcome = _parse_outcome(kind, toks[3], lineno)
            if kind in ("add", "remove"):
                if outcome is None:
                    raise ParseError(f"{kind} return needs ok/fail", lineno)
                if outcome is False:
                    raise ParseError(
                        "failing operations need offline checking (normalization)",
                        lineno)
            elif kind == "contains" and outcome is None:
                raise ParseError("contains return needs true/false", lineno)
            if ts <= last_ts:
                raise ParseError(f"stream timestamps must increase ({ts})", lineno)
            last_ts = ts
            yield (ts, False, Operation(op_id, Event(kind, value, outcome), call_ts, ts))
        else:
            raise ParseError(f"expected call/ret record, got {toks[0]!r}", lineno)
    if open_calls:
        raise ParseError(f"stream ended with {len(open_calls)} unreturned calls")


def cmd_check(args: argparse.Namespace) -> int:
    if args.stream:
        header = sys.stdin.readline()
        parts = _strip(header).split()
        if len(parts) != 2 or parts[0] != "adt":
            raise ParseError(f"bad stream header {header!r}")
        adt = args.adt or parts[1]
        if adt not in ("set", "multiset"):
            raise ParseError("streaming mode monitors set/multiset event streams")
        runner = set_linearizable_events if adt == "set" else multiset_linearizable_events
        verdict = runner(_stream_events(sys.stdin, adt))
        return _emit_verdict(verdict, args.verbose)
    text = _read_input(args.file)
    h = parse_history(text, fmt=args.format, adt_override=args.adt)
    return _emit_verdict(check_history(h), args.verbose)


def cmd_oracle(args: argparse.Namespace) -> int:
    text = _read_input(args.file)
    h = parse_history(text, fmt=args.format, adt_override=args.adt)
    if args.saturation:
        verdict = saturation_baseline(h)
        print("saturation (experimental, unproven): "
              + ("linearizable" if verdict.linearizable else "unlinearizable"))
        return EXIT_LINEARIZABLE if verdict.linearizable else EXIT_UNLINEARIZABLE
    verdict = brute_force_linearizable(h, max_ops=args.max_ops)
    return _emit_verdict(verdict, args.verbose)


def cmd_gen(args: argparse.Namespace) -> int:
    if args.kind == "small-model":
        h = gen_small_model_family(args.n)
    elif args.kind == "random":
        h = gen_random(args.adt, args.ops, args.seed, values=args.values)
    else:
        cfg = GenConfig(adt=args.adt, ops=args.ops, values=args.values,
                        threads=args.threads, seed=args.seed, stretch=args.stretch)
        h = gen_linearizable(cfg)
    _write_output(args.out, serialize_history(h, fmt=args.format))
    return EXIT_LINEARIZABLE


def cmd_record(args: argparse.Namespace) -> int:
    impl = "buggy-stack" if args.bug else args.impl
    cfg = GenConfig(ops=args.ops, threads=args.threads, seed=args.seed, bug=args.bug)
    h = record_execution(impl, cfg)
    _write_output(args.out, serialize_history(h, fmt=args.format))
    return EXIT_LINEARIZABLE


def run_bench(adt: str, sizes: list[int], seed: int, threads: int) -> list[dict]:
    """Check generated histories along a size ladder; report work and time.

    Slowdowns are normalized against the smallest instance, mirroring the
    per-thread-count normalization used in scalability plots.
    """
    rows = []
    base_wall = None
    for n in sizes:
        cfg = GenConfig(adt=adt, ops=n, values=max(8, n // 8), threads=threads,
                        seed=seed + n, stretch=float(threads))
        h = gen_linearizable(cfg)
        counter = WorkCounter()
        t0 = time.perf_counter()
        verdict = check_history(h, counter=counter)
        wall = time.perf_counter() - t0
        if not verdict.linearizable:
            raise HistoryError(f"generator produced an unlinearizable {adt} history "
                               f"(n={n}); this is a toolkit bug")
        if base_wall is None:
            base_wall = wall or 1e-9
        rows.append({"size": n, "threads": threads, "wall_seconds": wall,
                     "work_count": counter.count, "slowdown": wall / base_wall})
    return rows


def cmd_bench(args: argparse.Namespace) -> int:
    sizes = list(range(args.min_n, args.max_n + 1, args.step))
    rows = run_bench(args.adt, sizes, args.seed, args.threads)
    lines = ["size,threads,wall_seconds,work_count,slowdown"]
    for r in rows:
        lines.append(f"{r['size']},{r['threads']},{r['wall_seconds']:.6f},"
                     f"{r['work_count']},{r['slowdown']:.3f}")
    _write_output(args.out, "\n".join(lines) + "\n")
    return EXIT_LINEARIZABLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limon",
        description="Linearizability monitor for concurrent histories.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="decide linearizability of a history file")
    p_check.add_argument("file", help="history file, or - for standard input")
    p_check.add_argument("--adt", choices=ADTS, help="override the declared data type")
    p_check.add_argument("--format", default="auto", choices=("auto", "ops", "events"))
    p_check.add_argument("--verbose", action="store_true",
                         help="print the verdict and witness as one JSON object")
    p_check.add_argument("--stream", action="store_true",
                         help="read set/multiset events from stdin incrementally")
    p_check.set_defaults(func=cmd_check)

    p_oracle = sub.add_parser("oracle", help="exact brute-force ground truth (small inputs)")
    p_oracle.add_argument("file")
    p_oracle.add_argument("--adt", choices=ADTS)
    p_oracle.add_argument("--format", default="auto", choices=("auto", "ops", "events"))
    p_oracle.add_argument("--max-ops", type=int, default=10,
                          help="refuse histories larger than this (default 10)")
    p_oracle.add_argument("--verbose", action="store_true")
    p_oracle.add_argument("--saturation", action="store_true",
                          help="run the experimental saturation baseline instead")
    p_oracle.set_defaults(func=cmd_oracle)

    p_gen = sub.add_parser("gen", help="generate a synthetic history")
    p_gen.add_argument("--adt", default="stack", choices=ADTS)
    p_gen.add_argument("--kind", default="linearizable",
                       choices=("linearizable", "random", "small-model"))
    p_gen.add_argument("--ops", type=int, default=100)
    p_gen.add_argument("--values", type=int, default=8)
    p_gen.add_argument("--threads", type=int, default=4)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--stretch", type=float, default=1.0)
    p_gen.add_argument("--n", type=int, default=5, help="family size for --kind small-model")
    p_gen.add_argument("--format", default="ops", choices=("ops", "events"))
    p_gen.add_argument("--out", default="-")
    p_gen.set_defaults(func=cmd_gen)

    p_rec = sub.add_parser("record", help="record a live run of a reference structure")
    p_rec.add_argument("--impl", default="treiber-stack",
                       choices=("coarse-stack", "treiber-stack", "buggy-stack",
                                "coarse-queue", "ms-queue"))
    p_rec.add_argument("--threads", type=int, default=8)
    p_rec.add_argument("--ops", type=int, default=1000)
    p_rec.add_argument("--seed", type=int, default=0)
    p_rec.add_argument("--bug", action="store_true",
                       help="shorthand for the buggy time-window stack")
    p_rec.add_argument("--format", default="events", choices=("ops", "events"))
    p_rec.add_argument("--out", default="-")
    p_rec.set_defaults(func=cmd_record)

    p_bench = sub.add_parser("bench", help="work-count and wall-time ladder as CSV")
    p_bench.add_argument("--adt", default="stack", choices=ADTS)
    p_bench.add_argument("--min-n", type=int, default=100)
    p_bench.add_argument("--max-n", type=int, default=5000)
    p_bench.add_argument("--step", type=int, default=100)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--threads", type=int, default=8,
                         help="generator overlap width, recorded in the CSV")
    p_bench.add_argument("--out", default="-")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"limon: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except BoundExceeded as exc:
        print(f"limon: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except HistoryError as exc:
        print(f"limon: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except OSError as exc:
        print(f"limon: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
