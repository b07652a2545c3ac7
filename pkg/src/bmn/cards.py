"""Card and game-state model with the canonical text notation.

Cards come in five rank classes: indistinguishable number cards plus the
four court cards Jack, Queen, King and Ace, demanding penalties of 1-4
cards.  Hands are written left to right from the top of the pack using
the characters ``-JQKA``; a full game state is two hands plus the player
who leads the next trick.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple


class Card(enum.IntEnum):
    """One of the five rank classes.

    The integer value doubles as the penalty: the number of ordinary
    cards the opponent owes when this card is laid.
    """

    NUMBER = 0
    JACK = 1
    QUEEN = 2
    KING = 3
    ACE = 4

    @property
    def penalty(self) -> int:
        return int(self)

    @property
    def is_court(self) -> bool:
        return self != Card.NUMBER

    @property
    def symbol(self) -> str:
        return CARD_CHARS[self]


#: Canonical character per card value, index = Card value.
CARD_CHARS = "-JQKA"

_CHAR_TO_CARD = {c: Card(i) for i, c in enumerate(CARD_CHARS)}

#: Cards as small ints; hands are stored as tuples of these.
CardSeq = tuple[Card, ...]


class BmnError(Exception):
    """Base class for all package errors."""


class InvalidCharacterError(BmnError):
    """A card string contained a character outside ``-JQKA``.

    Attributes:
        position: 0-based index of the offending character in the input.
        char: the offending character.
    """

    def __init__(self, position: int, char: str):
        self.position = position
        self.char = char
        super().__init__(f"invalid card character {char!r} at position {position}")


class MalformedStateError(BmnError):
    """Game-state text did not match any accepted grammar."""


class InvalidLeaderError(BmnError):
    """A leader annotation was present but not 1 or 2."""


def parse_cards(text: str) -> CardSeq:
    """Parse card notation into a card sequence.

    Whitespace is ignored; every other character must be one of ``-JQKA``
    (case sensitive, left = top of the pack).  Raises
    :class:`InvalidCharacterError` for anything else.
    """
    cards = []
    for pos, ch in enumerate(text):
        if ch.isspace():
            continue
        card = _CHAR_TO_CARD.get(ch)
        if card is None:
            raise InvalidCharacterError(pos, ch)
        cards.append(card)
    return tuple(cards)


def format_cards(cards: Iterable[int]) -> str:
    """Inverse of :func:`parse_cards`; emits no whitespace."""
    return "".join(CARD_CHARS[c] for c in cards)


class DeckComposition(NamedTuple):
    """Per-rank card counts over a whole deck or state."""

    numbers: int
    jacks: int
    queens: int
    kings: int
    aces: int

    @property
    def total(self) -> int:
        return sum(self)

    @property
    def is_standard(self) -> bool:
        return self == STANDARD_COMPOSITION


STANDARD_COMPOSITION = DeckComposition(36, 4, 4, 4, 4)


@dataclass(frozen=True)
class GameState:
    """Both players' hands at a trick boundary plus the player to lead.

    Hands are canonical notation strings.  The leftmost character is the
    top card (next to be played); won tricks are appended at the right.
    Instances are immutable and hashable, so they can be used directly as
    visited-set keys and shared between workers.
    """

    hand1: str
    hand2: str
    leader: int = 1

    def __post_init__(self) -> None:
        if self.leader not in (1, 2):
            raise InvalidLeaderError(f"leader must be 1 or 2, got {self.leader!r}")
        # Normalizes and validates; raises InvalidCharacterError early.
        object.__setattr__(self, "hand1", format_cards(parse_cards(self.hand1)))
        object.__setattr__(self, "hand2", format_cards(parse_cards(self.hand2)))

    def hand(self, player: int) -> str:
        return self.hand1 if player == 1 else self.hand2

    def cards1(self) -> CardSeq:
        return parse_cards(self.hand1)

    def cards2(self) -> CardSeq:
        return parse_cards(self.hand2)

    @property
    def total_cards(self) -> int:
        return len(self.hand1) + len(self.hand2)

    @property
    def is_balanced(self) -> bool:
        return len(self.hand1) == len(self.hand2)

    def swapped(self) -> "GameState":
        """The same deal with hand labels (and leader) exchanged."""
        return GameState(self.hand2, self.hand1, 3 - self.leader)

    def __str__(self) -> str:
        return f"1. {self.hand1} 2. {self.hand2} ({self.leader})"

    def to_json(self) -> dict:
        return {"hand1": self.hand1, "hand2": self.hand2, "leader": self.leader}

    @classmethod
    def from_json(cls, obj: dict | str) -> "GameState":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["hand1"], obj["hand2"], int(obj.get("leader", 1)))


_ANNOTATED_RE = re.compile(
    r"^\s*1\.\s*(?P<h1>[^2]*?)\s*2\.\s*(?P<h2>.*?)\s*(?:\(\s*(?P<leader>\d+)\s*\))?\s*$",
    re.DOTALL,
)
_LEADER_SUFFIX_RE = re.compile(r"\(\s*(\d+)\s*\)\s*$")


def parse_state(text: str) -> GameState:
    """Parse a game state from any of the accepted textual forms.

    Accepted grammars, all with an optional trailing ``(n)`` leader flag
    (leader defaults to player 1):

    * annotated: ``1. <cards> 2. <cards> (1)``
    * slash-separated: ``<cards> / <cards>``
    * two non-empty lines

    Raises :class:`MalformedStateError` or :class:`InvalidLeaderError`.
    """
    if text is None:
        raise MalformedStateError("empty input")
    stripped = text.strip()
    m = _ANNOTATED_RE.match(stripped)
    if stripped.startswith("1.") and m:
        h1_text, h2_text = m.group("h1"), m.group("h2")
        leader = int(m.group("leader")) if m.group("leader") else 1
    else:
        leader = 1
        lm = _LEADER_SUFFIX_RE.search(stripped)
        if lm:
            leader = int(lm.group(1))
            stripped = stripped[: lm.start()]
        if "/" in stripped:
            h1_text, _, h2_text = stripped.partition("/")
        else:
            lines = [ln for ln in stripped.splitlines() if ln.strip()]
            if len(lines) != 2:
                raise MalformedStateError(f"cannot parse game state from {text!r}")
            h1_text, h2_text = lines
    if leader not in (1, 2):
        raise InvalidLeaderError(f"leader must be 1 or 2, got {leader}")
    return GameState(format_cards(parse_cards(h1_text)), format_cards(parse_cards(h2_text)), leader)


def composition(state: GameState) -> DeckComposition:
    """Per-rank counts over both hands combined."""
    counts = [0] * 5
    for ch in state.hand1 + state.hand2:
        counts[_CHAR_TO_CARD[ch]] += 1
    return DeckComposition(*counts)
