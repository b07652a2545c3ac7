"""Embedded reference data: record games, pieces, constructed decks, and
the 62-state reference cycle, with verification routines for each group.

Every string is verbatim reference data; the checksum test in the suite
pins the exact bytes, so any accidental edit fails the build.  The
``verify_*`` functions replay the data through the engine and return one
:class:`CheckResult` per item, which the CLI renders as pass/fail lines.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .cards import GameState, composition
from .engine import Detect, Outcome, PlayOutcome, play_game, play_trick
from . import construct, reverse


@dataclass(frozen=True)
class RecordEntry:
    """A historical longest-game record: holder, date, reported counts, deal.

    The topmost printed hand is hand1 and that player leads.
    """

    holder: str
    date: str
    tricks: int
    cards: int
    deal: GameState


RECORDS = (
    RecordEntry("Mark Manasse", "1992", 713, 5104,
                GameState("Q--J----K--K-J---Q---A---A",
                          "---K-K--JA-QA--J-----Q----")),
    RecordEntry("Michael Kleber", "before 1999", 805, 5791,
                GameState("---JQ---K-A----A-J-K---QK-",
                          "-J-----------AJQA----K---Q")),
    RecordEntry("Michael Kleber", "c. 2002", 841, 5977,
                GameState("----QJ-A-KK--------K--QQJ-",
                          "---J---K--A-----Q-AJ-A----")),
    RecordEntry("Michael Kleber", "c. 2005", 893, 6321,
                GameState("-J--KA----A-Q--Q-A----KJ--",
                          "A------QKJ--Q-------KJ----")),
    RecordEntry("Truman Collins", "2006", 960, 6914,
                GameState("A-QK------Q----KA-----J---",
                          "-JAK----A--Q----J---QJ--K-")),
    RecordEntry("Richard Mann & Nicolas Wu", "16-07-2007", 1007, 7157,
                GameState("K-KK----K-A-----JAA--Q--J-",
                          "---Q---Q-J-----J------AQ--")),
    RecordEntry("Reed Nessler", "01-05-2012", 1015, 7207,
                GameState("----Q------A--K--A-A--QJK-",
                          "-Q--J--J---QK---K----JA---")),
    RecordEntry("Reed Nessler", "04-05-2012", 1016, 7224,
                GameState("-J-------Q------A--A--QKK-",
                          "-A-Q--J--J---Q--AJ-K---K--")),
    RecordEntry("Nicolas Wu", "17-05-2012", 1016, 7225,
                GameState("--A-Q--J--J---Q--AJ-K---K-",
                          "-J-------Q------A--A--QKK-")),
    RecordEntry("Reed Nessler", "20-09-2013", 1014, 7259,
                GameState("---AK-Q--J----J--QKJ-Q----",
                          "------JK-----A--K--Q---AA-")),
    RecordEntry("William Rucklidge", "17-01-2014", 1024, 7269,
                GameState("A-AQ-----Q--K--AQ-------JJ",
                          "-J-A-KKJ--K-----------Q---")),
    RecordEntry("Philip Anderson", "03-02-2014", 1032, 7323,
                GameState("-AJ--QK--K----Q--J-A-KKJ--",
                          "---------JQ----------A-AQ-")),
    RecordEntry("William Rucklidge", "05-03-2014", 1122, 7960,
                GameState("-J------Q------AAA-----QQ-",
                          "K----JA-----------KQ-K-JJK")),
    RecordEntry("Reed Nessler", "31-08-2021", 1106, 7972,
                GameState("----K---A--Q-A--JJA------J",
                          "-----KK---------A-JK-Q-Q-Q")),
    RecordEntry("Reed Nessler", "09-06-2022", 1164, 8344,
                GameState("---AJ--Q---------QAKQJJ-QK",
                          "-----A----KJ-K--------A---")),
)

PREDECESSOR_ORIGIN = GameState("--------------------J--Q-Q-Q-Q-K-KJ--K-K-A-A-A-AJ-", "J-", 1)

PRINTED_PREDECESSORS = (
    GameState("J--------------------J--Q-Q-Q-Q-K-KJ--K-K-A-A-A-A",
              "-J-", 1),
    GameState("J--------------------J--Q-Q-Q-Q-K-KJ--K-K-A-A-A-",
              "A-J-", 2),
    GameState("-J--------------------J--Q-Q-Q-Q-K-KJ--K-K-A-A-A",
              "A-J-", 1),
    GameState("AJ--------------------J--Q-Q-Q-Q-K-KJ--K-K-A-A-",
              "-A-J-", 1),
    GameState("-AJ--------------------J--Q-Q-Q-Q-K-KJ--K-K-A-",
              "A-A-J-", 2),
    GameState("--AJ--------------------J--Q-Q-Q-Q-K-KJ--K-K-A",
              "A-A-J-", 1),
    GameState("A-AJ--------------------J--Q-Q-Q-Q-K-KJ--K-K-",
              "-A-A-J-", 1),
    GameState("A-AJ--------------------J--Q-Q-Q-Q-K-KJ--K-K",
              "--A-A-J-", 2),
    GameState("-A-AJ--------------------J--Q-Q-Q-Q-K-KJ--K-",
              "K-A-A-J-", 2),
    GameState("--A-AJ--------------------J--Q-Q-Q-Q-K-KJ--K",
              "K-A-A-J-", 1),
    GameState("K-A-AJ--------------------J--Q-Q-Q-Q-K-KJ--",
              "-K-A-A-J-", 1),
    GameState("K-A-AJ--------------------J--Q-Q-Q-Q-K-KJ-",
              "--K-A-A-J-", 2),
    GameState("-K-A-AJ--------------------J--Q-Q-Q-Q-K-KJ",
              "--K-A-A-J-", 1),
)

PIECES = (
    "--",
    "--Q-Q",
    "-----K",
    "--------",
    "--K---Q-KQQ",
    "--Q-Q-Q-Q-K-K",
    "--K---A----AA",
    "--------A-KAA",
    "--A-----A-A--A",
    "--A----Q----QQ",
    "--------A----AA",
    "--Q----Q----Q-Q",
    "--Q--Q-Q-QQ-Q-Q",
    "--------Q-Q-Q-Q",
    "--------Q----Q-Q",
    "--K-A--Q-K--Q--QQ",
    "--Q----A-Q-A-A---",
    "--------------K---",
    "--------Q----Q----",
    "-----------------Q-",
    "--------------------",
    "--------K----KQQ-KQQ",
    "--------K----KK--Q-K--Q--QQ",
    "--------K---------Q-Q-K---Q-KKQ",
    "--------------------A----------A---A",
    "--------------------Q----------Q----Q-Q",
)

CONSTRUCTED_GAMES = (
    GameState("--------------------J--Q-Q-Q-Q-K-KJ--K-K-A-A-A-AJ-", "J-"),
    GameState("-----------------KJ--Q-K-A-K-Q-KJ--Q----A-Q-A-A-J-", "J-"),
    GameState("-----------------KJ--A-A-Q-A-A---Q-J--K---Q-KQK-J-", "J-"),
    GameState("--------Q----Q-Q-J--------A----AA---J--K-KQ-KK-AJ-", "J-"),
    GameState("--Q----Q----Q-Q-J--K---K-KAK--J--------A----AA--J-", "J-"),
    GameState("-----------------Q-J--K---Q-KQQJ--K-K--A-A-A--A-J-", "J-"),
    GameState("--------J--Q----A-Q-A-A-J--------K----KQ-Q-K-K-AJ-", "J-"),
    GameState("-----A--J--Q----Q----Q-QJ--------K----KA--A-KK-AJ-", "J-"),
    GameState("--------Q-------Q-J--Q-Q-K-K-AKJ--K---A----AA---J-", "J-"),
    GameState("--------Q-------Q-J--Q-Q-K-K-K-KJ--A-----A-A--A-J-", "J-"),
    GameState("--Q----Q----Q-Q-J-----KJ--------K----KA-A-K-A--AJ-", "J-"),
    GameState("--A-Q-K-K-K-KJ--Q----A-Q-A-AJ--------------Q----J-", "J-"),
    GameState("--------------Q----J--K---Q-KQKJ--A-A-K-A-A---Q-J-", "J-"),
    GameState("--K---A----AA---J--J--------K----KA--Q-K--Q--QQ-J-", "J-"),
    GameState("--A-A--J--A-A---J--------K---------Q-Q-K---Q-KKQJ-", "J-"),
    GameState("--K---A----AAJ--J--------K---------Q-Q-K---Q-KAQJ-", "J-"),
)

REFERENCE_CYCLE = (
    GameState("--K---A----AAJ--J--------K---------Q-Q-K---Q-KAQJ-",
              "J-", 1),
    GameState("K---A----AAJ--J--------K---------Q-Q-K---Q-KAQJ-",
              "--J-", 2),
    GameState("--A----AAJ--J--------K---------Q-Q-K---Q-KAQJ-",
              "--K-J-", 2),
    GameState("---AAJ--J--------K---------Q-Q-K---Q-KAQJ-",
              "-----KA-J-", 2),
    GameState("--J--------K---------Q-Q-K---Q-KAQJ--------A-KAAJ-",
              "J-", 1),
    GameState("J--------K---------Q-Q-K---Q-KAQJ--------A-KAAJ-",
              "--J-", 2),
    GameState("--------K---------Q-Q-K---Q-KAQJ--------A-KAAJ--J-",
              "J-", 1),
    GameState("------K---------Q-Q-K---Q-KAQJ--------A-KAAJ--J-",
              "--J-", 2),
    GameState("---K---------Q-Q-K---Q-KAQJ--------A-KAAJ--J-",
              "-----J-", 2),
    GameState("--------Q-Q-K---Q-KAQJ--------A-KAAJ--J-",
              "--------K-J-", 2),
    GameState("Q-K---Q-KAQJ--------A-KAAJ--J-",
              "-----------------KQ-J-", 2),
    GameState("-K---Q-KAQJ--------A-KAAJ--J--Q--",
              "--------------KQ-J-", 1),
    GameState("---Q-KAQJ--------A-KAAJ--J--Q----K---",
              "----------KQ-J-", 1),
    GameState("-KAQJ--------A-KAAJ--J--Q----K---------Q--",
              "-----KQ-J-", 1),
    GameState("AQJ--------A-KAAJ--J--Q----K---------Q----K---",
              "-KQ-J-", 1),
    GameState("--------A-KAAJ--J--Q----K---------Q----K---A-KQQJ-",
              "J-", 1),
    GameState("------A-KAAJ--J--Q----K---------Q----K---A-KQQJ-",
              "--J-", 2),
    GameState("---A-KAAJ--J--Q----K---------Q----K---A-KQQJ-",
              "-----J-", 2),
    GameState("KAAJ--J--Q----K---------Q----K---A-KQQJ-",
              "--------A-J-", 2),
    GameState("AAJ--J--Q----K---------Q----K---A-KQQJ--K---",
              "----A-J-", 1),
    GameState("AJ--J--Q----K---------Q----K---A-KQQJ--K---A----",
              "A-J-", 1),
    GameState("--J--Q----K---------Q----K---A-KQQJ--K---A----AAJ-",
              "J-", 1),
    GameState("J--Q----K---------Q----K---A-KQQJ--K---A----AAJ-",
              "--J-", 2),
    GameState("--Q----K---------Q----K---A-KQQJ--K---A----AAJ--J-",
              "J-", 1),
    GameState("Q----K---------Q----K---A-KQQJ--K---A----AAJ--J-",
              "--J-", 2),
    GameState("---K---------Q----K---A-KQQJ--K---A----AAJ--J-",
              "--Q-J-", 2),
    GameState("--------Q----K---A-KQQJ--K---A----AAJ--J-",
              "-----Q-K-J-", 2),
    GameState("-Q----K---A-KQQJ--K---A----AAJ--J-",
              "-K-J-----------Q--", 2),
    GameState("---K---A-KQQJ--K---A----AAJ--J-",
              "-----------Q----KQ-J-", 2),
    GameState("---A-KQQJ--K---A----AAJ--J--------K---",
              "----Q----KQ-J-", 1),
    GameState("QQJ--K---A----AAJ--J--------K---------A-Q-K---",
              "-KQ-J-", 1),
    GameState("--K---A----AAJ--J--------K---------A-Q-K---Q-KQQJ-",
              "J-", 1),
    GameState("K---A----AAJ--J--------K---------A-Q-K---Q-KQQJ-",
              "--J-", 2),
    GameState("--A----AAJ--J--------K---------A-Q-K---Q-KQQJ-",
              "--K-J-", 2),
    GameState("---AAJ--J--------K---------A-Q-K---Q-KQQJ-",
              "-----KA-J-", 2),
    GameState("--J--------K---------A-Q-K---Q-KQQJ--------A-KAAJ-",
              "J-", 1),
    GameState("J--------K---------A-Q-K---Q-KQQJ--------A-KAAJ-",
              "--J-", 2),
    GameState("--------K---------A-Q-K---Q-KQQJ--------A-KAAJ--J-",
              "J-", 1),
    GameState("------K---------A-Q-K---Q-KQQJ--------A-KAAJ--J-",
              "--J-", 2),
    GameState("---K---------A-Q-K---Q-KQQJ--------A-KAAJ--J-",
              "-----J-", 2),
    GameState("--------A-Q-K---Q-KQQJ--------A-KAAJ--J-",
              "--------K-J-", 2),
    GameState("Q-K---Q-KQQJ--------A-KAAJ--J-",
              "-----------------KA-J-", 2),
    GameState("-K---Q-KQQJ--------A-KAAJ--J--Q--",
              "--------------KA-J-", 1),
    GameState("---Q-KQQJ--------A-KAAJ--J--Q----K---",
              "----------KA-J-", 1),
    GameState("-KQQJ--------A-KAAJ--J--Q----K---------Q--",
              "-----KA-J-", 1),
    GameState("QQJ--------A-KAAJ--J--Q----K---------Q----K---",
              "-KA-J-", 1),
    GameState("--------A-KAAJ--J--Q----K---------Q----K---Q-KQAJ-",
              "J-", 1),
    GameState("------A-KAAJ--J--Q----K---------Q----K---Q-KQAJ-",
              "--J-", 2),
    GameState("---A-KAAJ--J--Q----K---------Q----K---Q-KQAJ-",
              "-----J-", 2),
    GameState("KAAJ--J--Q----K---------Q----K---Q-KQAJ-",
              "--------A-J-", 2),
    GameState("AAJ--J--Q----K---------Q----K---Q-KQAJ--K---",
              "----A-J-", 1),
    GameState("AJ--J--Q----K---------Q----K---Q-KQAJ--K---A----",
              "A-J-", 1),
    GameState("--J--Q----K---------Q----K---Q-KQAJ--K---A----AAJ-",
              "J-", 1),
    GameState("J--Q----K---------Q----K---Q-KQAJ--K---A----AAJ-",
              "--J-", 2),
    GameState("--Q----K---------Q----K---Q-KQAJ--K---A----AAJ--J-",
              "J-", 1),
    GameState("Q----K---------Q----K---Q-KQAJ--K---A----AAJ--J-",
              "--J-", 2),
    GameState("---K---------Q----K---Q-KQAJ--K---A----AAJ--J-",
              "--Q-J-", 2),
    GameState("--------Q----K---Q-KQAJ--K---A----AAJ--J-",
              "-----Q-K-J-", 2),
    GameState("-Q----K---Q-KQAJ--K---A----AAJ--J-",
              "-K-J-----------Q--", 2),
    GameState("---K---Q-KQAJ--K---A----AAJ--J-",
              "-----------Q----KQ-J-", 2),
    GameState("---Q-KQAJ--K---A----AAJ--J--------K---",
              "----Q----KQ-J-", 1),
    GameState("QAJ--K---A----AAJ--J--------K---------Q-Q-K---",
              "-KQ-J-", 1),
)

#: The balanced 26/26 deal that feeds the reference cycle after 4 tricks.
BALANCED_DEAL = GameState("---K---Q-KQAJ-----AAJ--J--",
                          "----------Q----KQ-J-----KA")

#: Lead-in length from BALANCED_DEAL to the cycle, and the cycle period.
BALANCED_LEAD_IN = 4
CYCLE_PERIOD = 62

#: Non-terminating decks that never balance: the oversized 55-card deck
#: (39 number cards) and the first standard-composition one.
UNBALANCED_DECKS = (
    GameState("--Q-K-J-----------------KJ--Q----A-Q-A-A---J--Q-K-A-K", "J-"),
    GameState("--------------------J--Q-Q-Q-Q-K-KJ--K-K-A-A-A-AJ-", "J-"),
)

#: Removing the three number cards inside this run of the 55-card deck
#: yields a standard 52-card non-terminating game.
OVERSIZED_REMOVABLE_RUN = "A---J"

#: The smallest non-terminating game.
SIX_CARD_GAME = GameState("J--", "-J-")

#: Filter piece used by the certification template.
FILTER_PIECE = "--K---A----AA"

#: Budget for piece certification; far above any certification's needs.
PIECE_BUDGET_TRICKS = 10_000


@dataclass
class CheckResult:
    """One verification item: a label, pass/fail, and an expected/actual diff."""

    group: str
    label: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        suffix = f"  {self.detail}" if (self.detail and not self.ok) else ""
        return f"{status} [{self.group}] {self.label}{suffix}"


def checksum() -> str:
    """SHA-256 over the canonical serialization of all embedded data."""
    h = hashlib.sha256()
    for r in RECORDS:
        h.update(f"{r.holder}|{r.date}|{r.tricks}|{r.cards}|{r.deal}\n".encode())
    h.update(f"{PREDECESSOR_ORIGIN}\n".encode())
    for s in PRINTED_PREDECESSORS:
        h.update(f"{s}\n".encode())
    for p in PIECES:
        h.update(f"{p}\n".encode())
    for s in CONSTRUCTED_GAMES:
        h.update(f"{s}\n".encode())
    for s in REFERENCE_CYCLE:
        h.update(f"{s}\n".encode())
    for s in UNBALANCED_DECKS:
        h.update(f"{s}\n".encode())
    h.update(f"{BALANCED_DEAL}|{BALANCED_LEAD_IN}|{CYCLE_PERIOD}\n".encode())
    h.update(f"{SIX_CARD_GAME}|{FILTER_PIECE}|{OVERSIZED_REMOVABLE_RUN}\n".encode())
    return h.hexdigest()


def verify_records(detect: Detect = Detect.HASHSET) -> list[CheckResult]:
    """Replay every record deal; exact (tricks, cards) reproduction required."""
    results = []
    for r in RECORDS:
        out = play_game(r.deal, max_tricks=100_000, detect=detect)
        ok = (out.kind is Outcome.TERMINATED
              and out.tricks == r.tricks and out.cards_played == r.cards)
        detail = (f"expected terminated {r.tricks}/{r.cards}, "
                  f"got {out.kind.value} {out.tricks}/{out.cards_played}")
        results.append(CheckResult("records", f"{r.holder} ({r.date})", ok, detail))
    return results


def replay_records() -> list[tuple[RecordEntry, PlayOutcome]]:
    """Engine outcomes for every record deal, for reporting and regression."""
    return [(r, play_game(r.deal, max_tricks=100_000)) for r in RECORDS]


def verify_cycle() -> list[CheckResult]:
    """The balanced deal reaches the reference cycle and reproduces it verbatim."""
    results = []
    out = play_game(BALANCED_DEAL, max_tricks=10_000)
    ok = (out.kind is Outcome.NON_TERMINATING
          and out.lead_in == BALANCED_LEAD_IN and out.period == CYCLE_PERIOD)
    results.append(CheckResult(
        "cycle", "balanced deal loops with lead-in 4, period 62", ok,
        f"got {out.kind.value} lead_in={out.lead_in} period={out.period}"))
    if out.kind is not Outcome.NON_TERMINATING or not out.cycle_states:
        results.append(CheckResult("cycle", "cycle states match reference trace", False,
                                   "no cycle states to compare"))
        return results
    got = list(out.cycle_states)
    ref = list(REFERENCE_CYCLE)
    # The engine anchors the cycle at the first repeated state; the
    # reference trace starts at a different point of the same cycle, so
    # align by rotation before the verbatim comparison.
    try:
        offset = got.index(ref[0])
    except ValueError:
        offset = -1
    if offset < 0 or len(got) != len(ref):
        results.append(CheckResult("cycle", "cycle states match reference trace", False,
                                   "reference state 1 not present in detected cycle"))
        return results
    aligned = got[offset:] + got[:offset]
    for i, (a, b) in enumerate(zip(aligned, ref), start=1):
        results.append(CheckResult("cycle", f"state {i}", a == b,
                                   f"expected {b}, got {a}"))
    return results


def verify_predecessors() -> list[CheckResult]:
    """predecessors_of on the fixture origin matches the printed set exactly."""
    got = {p for p in reverse.predecessors_of(PREDECESSOR_ORIGIN).predecessors}
    want = set(PRINTED_PREDECESSORS)
    results = []
    for i, s in enumerate(PRINTED_PREDECESSORS, start=1):
        results.append(CheckResult("predecessors", f"printed predecessor {i}", s in got,
                                   f"missing {s}"))
    extras = sorted(got - want, key=str)
    results.append(CheckResult(
        "predecessors", "no states beyond the printed thirteen", not extras,
        "; ".join(f"extra {s}" for s in extras)))
    return results


def verify_pieces() -> list[CheckResult]:
    """Every catalogued piece certifies in the jack template with the filter."""
    results = []
    for p in PIECES:
        out = construct.template_test(p, filter_piece=FILTER_PIECE,
                                      budget_tricks=PIECE_BUDGET_TRICKS)
        results.append(CheckResult("pieces", p, out.kind is Outcome.NON_TERMINATING,
                                   f"template outcome {out.kind.value}"))
    return results


def verify_constructions() -> list[CheckResult]:
    """Every catalogued construction is a standard-composition looping game."""
    results = []
    for s in CONSTRUCTED_GAMES:
        out = play_game(s, max_tricks=100_000)
        ok = out.kind is Outcome.NON_TERMINATING and composition(s).is_standard
        results.append(CheckResult("constructions", s.hand1, ok,
                                   f"outcome {out.kind.value}, composition {composition(s)}"))
    return results


def verify_family(max_depth: int = 64, max_states: int = 1_000_000) -> list[CheckResult]:
    """Backward closure of the cycle contains the balanced deal at depth 4
    and a 30-member family of balanced deals."""
    closure = reverse.backward_closure(list(REFERENCE_CYCLE), max_depth=max_depth,
                                       max_states=max_states)
    by_state = {n.state: n for n in closure.nodes}
    results = []
    node = by_state.get(BALANCED_DEAL)
    results.append(CheckResult(
        "family", "balanced deal found at depth 4",
        node is not None and node.depth == BALANCED_LEAD_IN,
        f"depth {getattr(node, 'depth', None)}"))
    report = reverse.family_report(closure)
    ok30 = any(v == 30 for v in report.values())
    conventions = ", ".join(f"{k}={v}" for k, v in sorted(report.items()))
    results.append(CheckResult(
        "family", "a counting convention yields the published family of 30",
        ok30, conventions))
    results.append(CheckResult(
        "family", f"family counts: {conventions}", True))
    return results


VERIFY_GROUPS: dict[str, Callable[[], list[CheckResult]]] = {
    "records": verify_records,
    "pieces": verify_pieces,
    "constructions": verify_constructions,
    "cycle": verify_cycle,
    "predecessors": verify_predecessors,
    "family": verify_family,
}


def verify(only: Optional[Iterable[str]] = None) -> list[CheckResult]:
    """Run all (or selected) verification groups."""
    groups = list(VERIFY_GROUPS) if only is None else list(only)
    results: list[CheckResult] = []
    for g in groups:
        if g not in VERIFY_GROUPS:
            raise KeyError(f"unknown verification group {g!r}")
        results.extend(VERIFY_GROUPS[g]())
    return results
