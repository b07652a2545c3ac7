"""Command-line interface.

Subcommands::

    simulate       play one game, print the outcome as JSON
    verify         replay the embedded reference registry
    search-random  batch random search with record logging
    search-pieces  enumerate certified pieces into a store file
    backward       backward closure from anchor states
    stats          batch statistics: CSV histogram, summary JSON, figure
    expand         concatenate a loop trace into a larger looping game
    mutate         single-card variants of a deck that keep it looping
    bench          measure batch throughput

Exit codes: 0 success/terminated, 2 non-terminating, 3 cut off,
1 verification failure, 64 usage or parse errors, 74 I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import construct, registry, reverse, stochastic
from .cards import BmnError, GameState, InvalidCharacterError, composition, parse_state
from .engine import Detect, EmptyLeaderHandError, Outcome, play_game, play_trick

EX_OK = 0
EX_NONTERMINATING = 2
EX_CUTOFF = 3
EX_VERIFY_FAIL = 1
EX_USAGE = 64
EX_IOERR = 74

_OUTCOME_EXIT = {
    Outcome.TERMINATED: EX_OK,
    Outcome.NON_TERMINATING: EX_NONTERMINATING,
    Outcome.CUT_OFF: EX_CUTOFF,
}


def _read_state(args) -> GameState:
    if args.state is not None:
        text = args.state
    elif args.file == "-":
        text = sys.stdin.read()
    elif args.file is not None:
        text = Path(args.file).read_text()
    else:
        raise BmnError("provide a state inline or with --file")
    return parse_state(text)


def _read_states_file(path: str) -> list[GameState]:
    states = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            states.append(parse_state(line))
    return states


def _add_state_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("state", nargs="?", default=None,
                   help="game state, e.g. 'J-- / -J- (1)' or '1. J-- 2. -J- (1)'")
    p.add_argument("--file", help="read the state from a file ('-' for stdin)")


def cmd_simulate(args) -> int:
    state = _read_state(args)
    detect = Detect(args.detect)
    if args.trace:
        out = play_game(state, max_tricks=args.max_tricks, detect=Detect.NONE
                        if detect is Detect.NONE else Detect.HASHSET)
        # Stream the boundary trace while replaying.
        cur = state
        for _ in range(out.tricks):
            print(cur)
            step = play_trick(cur)
            if step.next_state is None:
                break
            cur = step.next_state
        result = out
    else:
        result = play_game(state, max_tricks=args.max_tricks, detect=detect)
    print(json.dumps(result.to_json()))
    return _OUTCOME_EXIT[result.kind]


def cmd_verify(args) -> int:
    only = args.only.split(",") if args.only else None
    results = registry.verify(only)
    failures = [r for r in results if not r.ok]
    for r in results:
        print(r.line())
    passed = len(results) - len(failures)
    print(f"{passed}/{len(results)} checks passed")
    if failures:
        first = failures[0]
        print(f"first failure: [{first.group}] {first.label}: {first.detail}",
              file=sys.stderr)
        return EX_VERIFY_FAIL
    return EX_OK


def _policy(args) -> stochastic.DealPolicy:
    return stochastic.DealPolicy(stochastic.Policy(args.policy), args.seed)


def _registry_max_cards() -> int:
    return max(r.cards for r in registry.RECORDS)


def _append_record_log(path: str, summary: stochastic.LengthSummary) -> int:
    """Append any new record (by cards) beyond the registry maximum."""
    threshold = _registry_max_cards()
    if summary.record_deal is None or summary.max_cards <= threshold:
        return 0
    entry = {
        "deal": summary.record_deal.to_json(),
        "tricks": summary.max_tricks,
        "cards": summary.max_cards,
        "seed": summary.policy.seed if summary.policy else None,
        "policy": summary.policy.kind.value if summary.policy else None,
        "index": summary.record_index,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(entry) + "\n")
        fh.flush()
    return 1


def cmd_search_random(args) -> int:
    policy = _policy(args)
    summary = stochastic.run_batch(policy, args.games, max_tricks=args.max_tricks,
                                   workers=args.workers)
    appended = _append_record_log(args.record_log, summary)
    payload = summary.to_json()
    payload["newRecords"] = appended
    if summary.loops:
        payload["nonTerminatingFound"] = [
            stochastic.random_deal(policy, i).to_json() for i in summary.loops]
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if summary.loops:
        print(f"non-terminating deal(s) found at draw indices {list(summary.loops)}!",
              file=sys.stderr)
        return EX_NONTERMINATING
    return EX_OK


def cmd_search_pieces(args) -> int:
    face_budget = None
    if args.faces:
        face_budget = {}
        for part in args.faces.split(","):
            sym, _, n = part.partition("=")
            face_budget[sym.strip().upper()] = int(n)
    pieces = construct.enumerate_pieces(
        args.max_len, mode=args.mode, face_budget=face_budget,
        filter_piece=args.filter_piece, budget_tricks=args.budget_tricks)
    construct.write_piece_store(args.out, pieces, args.filter_piece, args.budget_tricks)
    print(f"{len(pieces)} piece class representatives written to {args.out}")
    return EX_OK


def cmd_backward(args) -> int:
    anchors = _read_states_file(args.anchors)
    closure = reverse.backward_closure(anchors, max_depth=args.max_depth,
                                       max_states=args.max_states)
    report = reverse.family_report(closure)
    if args.format == "dot":
        text = reverse.to_dot(closure)
        Path(args.out).write_text(text + "\n") if args.out else print(text)
    else:
        lines = [json.dumps(n.to_json()) for n in closure.nodes]
        if args.out:
            Path(args.out).write_text("\n".join(lines) + "\n")
        else:
            for line in lines:
                print(line)
    if closure.budget_hit:
        print(f"budget exhausted: {closure.budget_hit}", file=sys.stderr)
    print(f"family: {json.dumps(report)}", file=sys.stderr)
    if args.report_balanced:
        for s in reverse.balanced_members(closure.nodes):
            print(f"balanced: {s}", file=sys.stderr)
    return EX_OK


def cmd_stats(args) -> int:
    policy = _policy(args)
    summary = stochastic.run_batch(policy, args.games, max_tricks=args.max_tricks,
                                   workers=args.workers)
    out_prefix = Path(args.out or f"stats-{policy.kind.value}-{args.seed}")
    csv_path = out_prefix.with_suffix(".csv")
    try:
        with open(csv_path, "w", encoding="ascii") as fh:
            fh.write("length,trickCount,cardCount\n")
            for length, tc, cc in stochastic.histogram_csv_rows(summary):
                fh.write(f"{length},{tc},{cc}\n")
    except OSError as exc:
        print(f"cannot write {csv_path}: {exc}", file=sys.stderr)
        return EX_IOERR
    payload = summary.to_json()
    fit = None
    try:
        fit = stochastic.fit_exponential_tail(summary, tail_start=args.tail_start)
        payload["tailFit"] = {
            "tailStart": args.tail_start,
            "rate": fit.rate,
            "halfLife": fit.half_life,
            "stderr": fit.stderr,
            "nTail": fit.n_tail,
        }
        payload["conditionalSurvival20"] = stochastic.conditional_survival(
            summary, args.tail_start, 20)
    except stochastic.InsufficientTailMassError as exc:
        payload["tailFit"] = {"error": str(exc)}
    json_path = out_prefix.with_suffix(".json")
    json_path.write_text(json.dumps(payload, indent=2) + "\n")
    written = [str(csv_path), str(json_path)]
    if not args.no_fig:
        from . import plotting

        fig_path = plotting.length_distribution_figure(
            {policy.kind.value: summary},
            {policy.kind.value: fit} if fit else None,
            str(out_prefix.with_suffix(".png")))
        written.append(fig_path)
    _append_record_log(args.record_log, summary)
    print(json.dumps({"written": written,
                      "halfLife": fit.half_life if fit else None}))
    return EX_OK


def cmd_expand(args) -> int:
    if args.loop:
        states = _read_states_file(args.loop)
        expanded = construct.expand_loop(states)
    else:
        expanded = construct.attach_copies(_read_state(args), args.copies)
    print(json.dumps(expanded.to_json()))
    return EX_OK


def cmd_mutate(args) -> int:
    state = _read_state(args)
    ops = [o.strip() for o in args.ops.split(",") if o.strip()]
    variants = construct.mutate(state, ops=ops, max_edits=args.max_edits,
                                budget_tricks=args.budget_tricks)
    lines = [json.dumps(v.to_json()) for v in variants]
    if args.out:
        Path(args.out).write_text("\n".join(lines) + ("\n" if lines else ""))
    else:
        for line in lines:
            print(line)
    print(f"{len(variants)} non-terminating variants", file=sys.stderr)
    return EX_OK


def cmd_bench(args) -> int:
    policy = _policy(args)
    # Warm the JIT outside the timed region.
    stochastic.run_batch(policy, 1000, workers=args.workers)
    t0 = time.perf_counter()
    summary = stochastic.run_batch(policy, args.games, workers=args.workers,
                                   start_index=1000)
    elapsed = time.perf_counter() - t0
    per_sec = args.games / elapsed
    print(json.dumps({
        "games": args.games,
        "seconds": round(elapsed, 3),
        "gamesPerSecond": round(per_sec),
        "gamesPerHour": round(per_sec * 3600),
        "workers": args.workers or stochastic.default_workers(),
        "meanTricks": round(sum(k * v for k, v in summary.trick_histogram.items())
                            / max(1, summary.games - summary.cutoffs), 2),
    }))
    return EX_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bmn",
        description="Beggar-My-Neighbor laboratory: exact engine, backward play, "
                    "constructive search, batch statistics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="play one game and print the outcome")
    _add_state_args(p)
    p.add_argument("--max-tricks", type=int, default=100_000)
    p.add_argument("--detect", choices=[d.value for d in Detect], default="hashset")
    p.add_argument("--trace", action="store_true",
                   help="print each trick-boundary state before the outcome")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="replay the embedded reference registry")
    p.add_argument("--only", help="comma-separated groups: "
                                  "records,pieces,constructions,cycle,predecessors,family")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search-random", help="random search with record logging")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--games", type=int, default=1_000_000)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--max-tricks", type=int, default=100_000)
    p.add_argument("--policy", choices=[x.value for x in stochastic.Policy],
                   default="uniform")
    p.add_argument("--record-log", default="bmn-records.jsonl")
    p.add_argument("--out", help="write the summary JSON here instead of stdout")
    p.set_defaults(func=cmd_search_random)

    p = sub.add_parser("search-pieces", help="enumerate certified pieces")
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--mode", choices=["base4", "multiset"], default="base4")
    p.add_argument("--faces", help="multiset mode face budget, e.g. 'K=6,Q=4'")
    p.add_argument("--filter-piece", default=construct.DEFAULT_FILTER)
    p.add_argument("--budget-tricks", type=int, default=construct.DEFAULT_BUDGET_TRICKS)
    p.add_argument("--out", default="pieces.txt")
    p.set_defaults(func=cmd_search_pieces)

    p = sub.add_parser("backward", help="backward closure from anchor states")
    p.add_argument("--anchors", required=True,
                   help="file with one state per line (e.g. a cycle trace)")
    p.add_argument("--max-depth", type=int, default=64)
    p.add_argument("--max-states", type=int, default=1_000_000)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.add_argument("--report-balanced", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_backward)

    p = sub.add_parser("stats", help="batch statistics with CSV/JSON/figure output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--games", type=int, default=1_000_000)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--max-tricks", type=int, default=100_000)
    p.add_argument("--policy", choices=[x.value for x in stochastic.Policy],
                   default="uniform")
    p.add_argument("--tail-start", type=int, default=100)
    p.add_argument("--record-log", default="bmn-records.jsonl")
    p.add_argument("--no-fig", action="store_true", help="skip the figure")
    p.add_argument("--out", help="output path prefix")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("expand",
                       help="expand a loop trace or self-attach a looping deal")
    _add_state_args(p)
    p.add_argument("--loop", help="file with the loop states in order")
    p.add_argument("--copies", type=int, default=2,
                   help="self-attachment count when expanding a single state")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("mutate", help="edit-distance variants that keep looping")
    _add_state_args(p)
    p.add_argument("--ops", default="insert,remove,swap")
    p.add_argument("--max-edits", type=int, default=1)
    p.add_argument("--budget-tricks", type=int, default=construct.DEFAULT_BUDGET_TRICKS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("bench", help="measure batch throughput")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--games", type=int, default=200_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--policy", choices=[x.value for x in stochastic.Policy],
                   default="uniform")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidCharacterError as exc:
        print(f"error: invalid character {exc.char!r} at position {exc.position}",
              file=sys.stderr)
        return EX_USAGE
    except (construct.ExpansionError, construct.AssemblyError) as exc:
        # A candidate that failed verification is a result, not misuse.
        print(f"not non-terminating: {exc}", file=sys.stderr)
        return EX_VERIFY_FAIL
    except (BmnError, EmptyLeaderHandError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EX_IOERR
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
