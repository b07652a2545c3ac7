"""Core model: parsing, formatting, composition."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from bmn import (
    Card,
    DeckComposition,
    GameState,
    InvalidCharacterError,
    InvalidLeaderError,
    MalformedStateError,
    STANDARD_COMPOSITION,
    composition,
    format_cards,
    parse_cards,
    parse_state,
)
from bmn.registry import BALANCED_DEAL, UNBALANCED_DECKS


def test_penalties():
    assert [c.penalty for c in Card] == [0, 1, 2, 3, 4]
    assert not Card.NUMBER.is_court
    assert all(c.is_court for c in (Card.JACK, Card.QUEEN, Card.KING, Card.ACE))


def test_parse_basic():
    assert parse_cards("J-") == (Card.JACK, Card.NUMBER)
    assert parse_cards("") == ()
    assert parse_cards(" -A \nJ") == (Card.NUMBER, Card.ACE, Card.JACK)


def test_parse_rejects_lowercase_and_junk():
    with pytest.raises(InvalidCharacterError) as exc:
        parse_cards("J-q")
    assert exc.value.position == 2
    assert exc.value.char == "q"
    with pytest.raises(InvalidCharacterError):
        parse_cards("10")


def test_format_basic():
    assert format_cards((Card.JACK, Card.NUMBER)) == "J-"
    assert format_cards(()) == ""
    assert format_cards((Card.NUMBER, Card.KING, Card.ACE)) == "-KA"


card_text = st.text(alphabet="-JQKA", max_size=60)
noisy_text = st.text(alphabet="-JQKA \t\n", max_size=80)


@given(noisy_text)
def test_round_trip(text):
    cards = parse_cards(text)
    assert format_cards(cards) == "".join(text.split())
    assert parse_cards(format_cards(cards)) == cards


def test_parse_state_annotated():
    s = parse_state("1. J-- 2. -J- (1)")
    assert (s.hand1, s.hand2, s.leader) == ("J--", "-J-", 1)


def test_parse_state_annotated_leader2():
    s = parse_state("1. K---A 2. -K- (2)")
    assert s.leader == 2


def test_parse_state_default_leader():
    s = parse_state("1. - 2. - ")
    assert (s.hand1, s.hand2, s.leader) == ("-", "-", 1)


def test_parse_state_slash():
    s = parse_state("J-- / -J-")
    assert (s.hand1, s.hand2, s.leader) == ("J--", "-J-", 1)
    s = parse_state("J-- / -J- (2)")
    assert s.leader == 2


def test_parse_state_two_lines():
    s = parse_state("--Q-K\nJ-")
    assert (s.hand1, s.hand2, s.leader) == ("--Q-K", "J-", 1)


def test_parse_state_bad_leader():
    with pytest.raises(InvalidLeaderError):
        parse_state("1. J 2. - (3)")


def test_parse_state_malformed():
    with pytest.raises(MalformedStateError):
        parse_state("no hands here")


def test_state_str_round_trip():
    s = GameState("Q--J", "-KA", 2)
    assert parse_state(str(s)) == s


def test_state_json_round_trip():
    s = GameState("J-", "", 1)
    assert GameState.from_json(s.to_json()) == s


def test_composition_balanced_deal():
    assert composition(BALANCED_DEAL) == STANDARD_COMPOSITION
    assert composition(BALANCED_DEAL).is_standard


def test_composition_empty():
    assert composition(GameState("", "", 1)) == DeckComposition(0, 0, 0, 0, 0)


def test_composition_oversized_deck():
    comp = composition(UNBALANCED_DECKS[0])
    assert comp.numbers == 39
    assert (comp.jacks, comp.queens, comp.kings, comp.aces) == (4, 4, 4, 4)


@given(card_text, card_text, st.randoms())
def test_composition_invariant_under_permutation(h1, h2, rnd):
    state = GameState(h1, h2, 1)
    cards = list(h1 + h2)
    rnd.shuffle(cards)
    cut = rnd.randrange(len(cards) + 1) if cards else 0
    shuffled = GameState(format_cards(parse_cards("".join(cards[:cut]))),
                         format_cards(parse_cards("".join(cards[cut:]))), 1)
    assert composition(state) == composition(shuffled)


def test_swapped():
    s = GameState("J-", "-Q", 1)
    assert s.swapped() == GameState("-Q", "J-", 2)
    assert s.swapped().swapped() == s
