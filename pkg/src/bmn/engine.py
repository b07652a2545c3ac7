"""Exact forward play: single tricks, whole games, and loop detection.

Trick rules
-----------
The leader lays their top card.  Players alternate laying single cards
while only number cards appear.  A court card (J/Q/K/A) obliges the
opponent to lay 1/2/3/4 cards; the moment a court card appears among the
payment the obligation reverses.  When a penalty is paid in full with
number cards, the player who laid the last court card wins the trick and
places the whole table pile under their pack in play order (first-laid
card ends up closest to the old bottom).  The winner leads the next
trick.

Game accounting
---------------
A game is won by the player who gets every card into their hand; this is
checked at trick boundaries before a trick starts.  If a trick is in
progress and a player must lay from an empty hand, the opponent wins:
the unfinished trick still counts as a trick, every card on the table
counts, and the failed draw itself is charged as one final card event.
This is the accounting that reproduces twelve of the fifteen published
record games bit-exactly; see the record registry for the three
historical entries whose reported pairs disagree with each other under
every uniform convention.

Non-termination is detected by trick-boundary state recurrence: either
with a visited hash table (exact lead-in/period on first recurrence) or
with Brent's constant-memory algorithm followed by the standard
re-synchronization passes, which must agree exactly.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .cards import BmnError, Card, GameState, format_cards

_COURT_MIN = 1  # card values above zero demand a penalty


class EmptyLeaderHandError(BmnError):
    """play_trick was called with an empty leader hand."""


class CapacityExceededError(BmnError):
    """State does not fit the packed key format (more than 64 cards)."""


class Detect(enum.Enum):
    """Loop-detection strategy for :func:`play_game`."""

    HASHSET = "hashset"
    BRENT = "brent"
    NONE = "none"


class Outcome(enum.Enum):
    TERMINATED = "terminated"
    NON_TERMINATING = "non-terminating"
    CUT_OFF = "cut-off"


@dataclass(frozen=True)
class TrickOutcome:
    """Result of resolving a single trick.

    Attributes:
        next_state: state at the next trick boundary (None if the game
            ended mid-trick).
        cards_laid: cards actually placed on the table this trick.
        trick_winner: player who took the pile (None if ended mid-trick).
        ended: winner of the whole game when a player had to lay from an
            empty hand, else None.
    """

    next_state: Optional[GameState]
    cards_laid: int
    trick_winner: Optional[int]
    ended: Optional[int] = None


@dataclass(frozen=True)
class PlayOutcome:
    """Result of playing a game to termination, recurrence, or cut-off.

    For NON_TERMINATING outcomes ``tricks`` spans the lead-in plus one
    full pass around the cycle, and ``cycle_states`` holds the ``period``
    distinct states starting from the first state that recurs.
    """

    kind: Outcome
    winner: Optional[int] = None
    tricks: int = 0
    cards_played: int = 0
    lead_in: Optional[int] = None
    period: Optional[int] = None
    cycle_states: Optional[tuple[GameState, ...]] = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "winner": self.winner,
            "tricks": self.tricks,
            "cardsPlayed": self.cards_played,
            "leadIn": self.lead_in,
            "period": self.period,
        }


def _trick_on_deques(h1: deque, h2: deque, leader: int):
    """Resolve one trick in place.

    Returns (winner, cards_laid, ended_winner).  When ended_winner is not
    None the hands are left mid-trick and the pile is abandoned;
    cards_laid then already includes the failed draw.
    """
    pile: list[int] = []
    penalty = 0
    cur = leader
    hand = h1 if cur == 1 else h2
    while True:
        if not hand:
            # Required to lay from an empty hand: opponent wins the game.
            return None, len(pile) + 1, 3 - cur
        card = hand.popleft()
        pile.append(card)
        if card >= _COURT_MIN:
            penalty = card
            cur = 3 - cur
            hand = h1 if cur == 1 else h2
        elif penalty > 0:
            penalty -= 1
            if penalty == 0:
                winner = 3 - cur
                (h1 if winner == 1 else h2).extend(pile)
                return winner, len(pile), None
        else:
            cur = 3 - cur
            hand = h1 if cur == 1 else h2


def play_trick(state: GameState) -> TrickOutcome:
    """Resolve exactly one trick from a boundary state.

    Raises :class:`EmptyLeaderHandError` if the leader holds no cards;
    mid-trick exhaustion of either player is a normal ``ended`` outcome.
    """
    if not state.hand(state.leader):
        raise EmptyLeaderHandError(f"player {state.leader} cannot lead from an empty hand")
    h1 = deque(state.cards1())
    h2 = deque(state.cards2())
    winner, laid, ended = _trick_on_deques(h1, h2, state.leader)
    if ended is not None:
        # laid includes the failed draw charge; report only real cards here.
        return TrickOutcome(None, laid - 1, None, ended)
    nxt = GameState(format_cards(h1), format_cards(h2), winner)
    return TrickOutcome(nxt, laid, winner)


def state_key(state: GameState) -> int:
    """Injective packed key: leader, hand lengths, then 3 bits per card.

    Raises :class:`CapacityExceededError` for states beyond 64 cards.
    """
    n1, n2 = len(state.hand1), len(state.hand2)
    if n1 + n2 > 64:
        raise CapacityExceededError(f"{n1 + n2} cards exceed the 64-card packed capacity")
    key = ((state.leader - 1) << 7 | n1) << 7 | n2
    for card in state.cards1() + state.cards2():
        key = (key << 3) | card
    return key


def _boundary_key(h1: deque, h2: deque, leader: int) -> bytes:
    """Cheap injective key over deques of card values, any size."""
    return b"%c%c%c" % (leader, len(h1) & 0xFF, len(h1) >> 8) + bytes(h1) + bytes(h2)


def _snapshot(h1: deque, h2: deque, leader: int) -> GameState:
    return GameState(format_cards(h1), format_cards(h2), leader)


class _Runner:
    """Mutable game walker over deques with trick/card accounting."""

    def __init__(self, state: GameState):
        self.h1 = deque(state.cards1())
        self.h2 = deque(state.cards2())
        self.leader = state.leader
        self.tricks = 0
        self.cards = 0

    def boundary_winner(self) -> Optional[int]:
        if not self.h1 and not self.h2:
            raise EmptyLeaderHandError("both hands are empty")
        if not self.h2:
            return 1
        if not self.h1:
            return 2
        return None

    def step(self) -> Optional[int]:
        """Play one trick; returns the game winner if it halted mid-trick."""
        winner, laid, ended = _trick_on_deques(self.h1, self.h2, self.leader)
        self.tricks += 1
        self.cards += laid
        if ended is not None:
            return ended
        self.leader = winner
        return None

    def state(self) -> GameState:
        return _snapshot(self.h1, self.h2, self.leader)

    def key(self) -> bytes:
        return _boundary_key(self.h1, self.h2, self.leader)


def _finish_terminated(run: _Runner, winner: int) -> PlayOutcome:
    return PlayOutcome(Outcome.TERMINATED, winner=winner, tricks=run.tricks, cards_played=run.cards)


def _nonterminating_outcome(start: GameState, lead_in: int, period: int) -> PlayOutcome:
    """Replay lead_in + period tricks to collect exact counts and states."""
    run = _Runner(start)
    cycle: list[GameState] = []
    for i in range(lead_in + period):
        if i >= lead_in:
            cycle.append(run.state())
        halted = run.step()
        assert halted is None, "replay of a detected cycle cannot halt"
    return PlayOutcome(
        Outcome.NON_TERMINATING,
        tricks=run.tricks,
        cards_played=run.cards,
        lead_in=lead_in,
        period=period,
        cycle_states=tuple(cycle),
    )


def _play_game_hashset(start: GameState, max_tricks: int) -> PlayOutcome:
    run = _Runner(start)
    seen: dict[bytes, int] = {}
    while run.tricks < max_tricks:
        winner = run.boundary_winner()
        if winner is not None:
            return _finish_terminated(run, winner)
        key = run.key()
        prev = seen.get(key)
        if prev is not None:
            return _nonterminating_outcome(start, prev, run.tricks - prev)
        seen[key] = run.tricks
        halted = run.step()
        if halted is not None:
            return _finish_terminated(run, halted)
    return PlayOutcome(Outcome.CUT_OFF, tricks=run.tricks, cards_played=run.cards)


def _play_game_brent(start: GameState, max_tricks: int) -> PlayOutcome:
    """Brent cycle detection in O(1) memory, then exact re-synchronization."""
    run = _Runner(start)
    winner = run.boundary_winner()
    if winner is not None:
        return _finish_terminated(run, winner)
    tortoise = run.key()
    power = lam = 1
    while run.tricks < max_tricks:
        halted = run.step()
        if halted is not None:
            return _finish_terminated(run, halted)
        winner = run.boundary_winner()
        if winner is not None:
            return _finish_terminated(run, winner)
        key = run.key()
        if key == tortoise:
            break
        if power == lam:
            tortoise = key
            power *= 2
            lam = 0
        lam += 1
    else:
        return PlayOutcome(Outcome.CUT_OFF, tricks=run.tricks, cards_played=run.cards)
    # lam is the period; find the lead-in by advancing a second walker.
    period = lam
    ahead = _Runner(start)
    for _ in range(period):
        ahead.step()
    behind = _Runner(start)
    mu = 0
    while behind.key() != ahead.key():
        behind.step()
        ahead.step()
        mu += 1
    return _nonterminating_outcome(start, mu, period)


def _play_game_none(start: GameState, max_tricks: int) -> PlayOutcome:
    run = _Runner(start)
    while run.tricks < max_tricks:
        winner = run.boundary_winner()
        if winner is not None:
            return _finish_terminated(run, winner)
        halted = run.step()
        if halted is not None:
            return _finish_terminated(run, halted)
    return PlayOutcome(Outcome.CUT_OFF, tricks=run.tricks, cards_played=run.cards)


def classify(state: GameState, max_tricks: int = 100_000) -> Outcome:
    """Exact outcome kind only, skipping cycle reconstruction.

    Same hash-table detection as :func:`play_game`, but without the
    replay that collects cycle states; use for bulk screening where only
    the classification matters.
    """
    run = _Runner(state)
    seen: set[bytes] = set()
    while run.tricks < max_tricks:
        if run.boundary_winner() is not None:
            return Outcome.TERMINATED
        key = run.key()
        if key in seen:
            return Outcome.NON_TERMINATING
        seen.add(key)
        if run.step() is not None:
            return Outcome.TERMINATED
    return Outcome.CUT_OFF


def play_game(
    state: GameState,
    max_tricks: int = 100_000,
    detect: Detect | str = Detect.HASHSET,
) -> PlayOutcome:
    """Play a whole game from a boundary state.

    ``detect`` selects non-termination detection: HASHSET stores every
    boundary state, BRENT uses constant memory, NONE reports only
    termination or cut-off.  HASHSET and BRENT report identical
    (lead_in, period) and identical cycle states on every looping input.
    """
    if max_tricks < 1:
        raise ValueError("max_tricks must be >= 1")
    detect = Detect(detect)
    if detect is Detect.HASHSET:
        return _play_game_hashset(state, max_tricks)
    if detect is Detect.BRENT:
        return _play_game_brent(state, max_tricks)
    return _play_game_none(state, max_tricks)
