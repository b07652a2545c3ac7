"""Forward engine: tricks, games, detection modes, keys, oracle checks."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bmn import (
    CapacityExceededError,
    Detect,
    EmptyLeaderHandError,
    GameState,
    Outcome,
    composition,
    play_game,
    play_trick,
    state_key,
)
from bmn.registry import BALANCED_DEAL, RECORDS, REFERENCE_CYCLE, SIX_CARD_GAME

from naive import naive_play, naive_trick


def test_trick_reference_states_1_to_2():
    out = play_trick(REFERENCE_CYCLE[0])
    assert out.next_state == REFERENCE_CYCLE[1]
    assert out.cards_laid == 3
    assert out.trick_winner == 2
    assert out.ended is None


def test_trick_reference_states_11_to_12():
    out = play_trick(REFERENCE_CYCLE[10])
    assert out.next_state == REFERENCE_CYCLE[11]


def test_trick_smallest_penalty():
    out = play_trick(GameState("J", "-", 1))
    assert out.ended is None
    assert out.next_state == GameState("J-", "", 1)
    assert out.cards_laid == 2
    assert out.trick_winner == 1


def test_trick_empty_leader_raises():
    with pytest.raises(EmptyLeaderHandError):
        play_trick(GameState("", "J", 1))


def test_trick_mid_trick_exhaustion():
    # Leader lays the ace; the opponent owes four but holds two.
    out = play_trick(GameState("A", "--", 1))
    assert out.ended == 1
    assert out.next_state is None
    # Two payment cards plus the leader's ace were actually laid; the
    # failed draw is charged by play_game's accounting, not here.
    assert out.cards_laid == 3


def test_game_six_card_loops():
    out = play_game(SIX_CARD_GAME)
    assert out.kind is Outcome.NON_TERMINATING
    assert out.lead_in == 1
    assert out.period == 2


def test_game_balanced_deal():
    out = play_game(BALANCED_DEAL)
    assert out.kind is Outcome.NON_TERMINATING
    assert (out.lead_in, out.period) == (4, 62)
    assert len(out.cycle_states) == 62
    assert len(set(out.cycle_states)) == 62
    # One forward trick walks the cycle in order, closing exactly.
    for i, s in enumerate(out.cycle_states):
        nxt = play_trick(s).next_state
        assert nxt == out.cycle_states[(i + 1) % 62]


def test_game_cycle_states_are_reference_rotation():
    out = play_game(BALANCED_DEAL)
    got = list(out.cycle_states)
    offset = got.index(REFERENCE_CYCLE[0])
    assert got[offset:] + got[:offset] == list(REFERENCE_CYCLE)


def test_game_terminates_record():
    entry = RECORDS[4]  # 960 tricks, 6914 cards
    out = play_game(entry.deal)
    assert out.kind is Outcome.TERMINATED
    assert (out.tricks, out.cards_played) == (entry.tricks, entry.cards)


def test_game_cutoff():
    out = play_game(BALANCED_DEAL, max_tricks=10, detect=Detect.NONE)
    assert out.kind is Outcome.CUT_OFF
    assert out.tricks == 10


def test_game_both_empty_rejected():
    with pytest.raises(EmptyLeaderHandError):
        play_game(GameState("", "", 1))


def test_game_immediate_boundary_win():
    out = play_game(GameState("J-", "", 1))
    assert out.kind is Outcome.TERMINATED
    assert out.winner == 1
    assert out.tricks == 0 and out.cards_played == 0


def test_hashset_and_brent_agree_on_reference_games():
    for state in (SIX_CARD_GAME, BALANCED_DEAL):
        a = play_game(state, detect=Detect.HASHSET)
        b = play_game(state, detect=Detect.BRENT)
        assert (a.lead_in, a.period) == (b.lead_in, b.period)
        assert a.cycle_states == b.cycle_states
        assert (a.tricks, a.cards_played) == (b.tricks, b.cards_played)


small_deck = st.text(alphabet="-JQKA", min_size=2, max_size=12)


@given(small_deck, st.integers(1, 11), st.sampled_from([1, 2]))
@settings(max_examples=300, deadline=None)
def test_hashset_equals_brent_on_random_small_decks(deck, split, leader):
    split = min(split, len(deck))
    state = GameState(deck[:split], deck[split:], leader)
    if not state.hand(leader):
        return
    a = play_game(state, max_tricks=5000, detect=Detect.HASHSET)
    b = play_game(state, max_tricks=5000, detect=Detect.BRENT)
    assert a.kind == b.kind
    assert (a.lead_in, a.period) == (b.lead_in, b.period)
    assert (a.tricks, a.cards_played) == (b.tricks, b.cards_played)
    assert a.cycle_states == b.cycle_states


@given(small_deck, st.integers(1, 11), st.sampled_from([1, 2]))
@settings(max_examples=300, deadline=None)
def test_trick_conserves_cards(deck, split, leader):
    split = min(split, len(deck))
    state = GameState(deck[:split], deck[split:], leader)
    if not state.hand(leader):
        return
    out = play_trick(state)
    if out.next_state is not None:
        assert composition(out.next_state) == composition(state)
        assert out.next_state.leader == out.trick_winner
        assert out.next_state.total_cards == state.total_cards
        assert out.cards_laid >= 2


def test_state_key_distinguishes_leader():
    a = GameState("J-", "-", 1)
    b = GameState("J-", "-", 2)
    assert state_key(a) != state_key(b)
    assert state_key(a) == state_key(GameState("J-", "-", 1))


def test_state_key_distinguishes_hand_boundary():
    assert state_key(GameState("J-", "-", 1)) != state_key(GameState("J", "--", 1))
    assert state_key(GameState("-", "", 1)) != state_key(GameState("", "-", 1))


def test_state_key_distinct_across_cycle():
    keys = {state_key(s) for s in REFERENCE_CYCLE}
    assert len(keys) == 62


def test_state_key_capacity():
    big = GameState("-" * 40, "-" * 25, 1)
    with pytest.raises(CapacityExceededError):
        state_key(big)


def _all_states(deck: str):
    """Every split and leader for a fixed card ordering."""
    for split in range(len(deck) + 1):
        for leader in (1, 2):
            state = GameState(deck[:split], deck[split:], leader)
            if state.hand(leader):
                yield state


def _small_decks(max_cards: int, max_faces: int):
    """All card orderings with the given size and face caps."""
    for n in range(2, max_cards + 1):
        for faces in range(min(max_faces, n) + 1):
            for face_positions in itertools.combinations(range(n), faces):
                for face_kinds in itertools.product("JQKA", repeat=faces):
                    deck = ["-"] * n
                    for pos, kind in zip(face_positions, face_kinds):
                        deck[pos] = kind
                    yield "".join(deck)


def test_oracle_equivalence_small_decks():
    """Engine classification matches the naive simulator on every deck of
    up to 8 cards with up to 2 face cards (the 10-card sweep runs in the
    acceptance suite)."""
    checked = 0
    for deck in _small_decks(8, 2):
        for state in _all_states(deck):
            got = play_game(state, max_tricks=5000)
            want = naive_play(state.hand1, state.hand2, state.leader, max_tricks=5000)
            if want[0] == "end":
                assert got.kind is Outcome.TERMINATED, state
                assert got.winner == want[1], state
                assert (got.tricks, got.cards_played) == (want[2], want[3]), state
            else:
                assert want[0] == "loop"
                assert got.kind is Outcome.NON_TERMINATING, state
                assert (got.lead_in, got.period) == (want[1], want[2]), state
            checked += 1
    assert checked > 10_000


def test_trick_agrees_with_naive_on_reference_cycle():
    for state in REFERENCE_CYCLE:
        kind, h1, h2, winner, pile = naive_trick(state.hand1, state.hand2, state.leader)
        out = play_trick(state)
        assert kind == "done"
        assert (h1, h2, winner) == (out.next_state.hand1, out.next_state.hand2,
                                    out.next_state.leader)
        assert len(pile) == out.cards_laid
