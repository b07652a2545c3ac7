"""Backward play: predecessor enumeration and family closure."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bmn import (
    GameState,
    backward_closure,
    balanced_members,
    composition,
    family_report,
    play_trick,
    predecessors_of,
)
from bmn.reverse import FamilyNode, to_dot
from bmn.registry import (
    BALANCED_DEAL,
    PREDECESSOR_ORIGIN,
    PRINTED_PREDECESSORS,
    REFERENCE_CYCLE,
)
from bmn.stochastic import DealPolicy, random_deal

from naive import naive_predecessors


def test_soundness_on_fixture():
    result = predecessors_of(PREDECESSOR_ORIGIN)
    assert result.origin == PREDECESSOR_ORIGIN
    for p in result.predecessors:
        assert play_trick(p).next_state == PREDECESSOR_ORIGIN
        assert p != PREDECESSOR_ORIGIN
        assert composition(p) == composition(PREDECESSOR_ORIGIN)
    assert len(set(result.predecessors)) == len(result.predecessors)


def test_fixture_contains_all_printed_predecessors():
    got = set(predecessors_of(PREDECESSOR_ORIGIN).predecessors)
    for printed in PRINTED_PREDECESSORS:
        assert printed in got


def test_fixture_extra_predecessor_is_genuine():
    """The enumeration finds one state beyond the printed list; forward
    play proves it is a true predecessor, so completeness keeps it."""
    got = set(predecessors_of(PREDECESSOR_ORIGIN).predecessors)
    extras = got - set(PRINTED_PREDECESSORS)
    assert len(extras) == 1
    (extra,) = extras
    assert extra == GameState(
        "AJ--------------------J--Q-Q-Q-Q-K-KJ--K-K-A-A", "--A-J-", 2)
    assert play_trick(extra).next_state == PREDECESSOR_ORIGIN


def test_walkthrough_predecessor():
    state = GameState("--K---A----AAJ-", "J-", 1)
    preds = predecessors_of(state).predecessors
    assert GameState("J--K---A----AA", "-J-", 1) in preds


def test_no_predecessors():
    assert predecessors_of(GameState("A", "-", 1)).predecessors == ()
    # Brute-force over every 2-card state confirms the empty result.
    universe = []
    for deck in ("A-", "-A"):
        for split in range(3):
            for leader in (1, 2):
                universe.append((deck[:split], deck[split:], leader))
    assert naive_predecessors("A", "-", 1, universe) == []


def _states_of_composition(deck_multiset: str):
    """All distinct orderings, splits and leaders of a card multiset."""
    seen_orders = set(itertools.permutations(deck_multiset))
    for order in seen_orders:
        deck = "".join(order)
        for split in range(len(deck) + 1):
            for leader in (1, 2):
                yield (deck[:split], deck[split:], leader)


@pytest.mark.parametrize("multiset", ["---J", "--JQ", "-----K", "--JJ-A"])
def test_exhaustive_inversion_small_compositions(multiset):
    """predecessors_of equals brute-force inversion over whole compositions."""
    universe = list(_states_of_composition(multiset))
    # Build the expected predecessor map by forward-playing everything.
    expected: dict[tuple, set] = {}
    for cand in universe:
        h1, h2, leader = cand
        if not (h1 if leader == 1 else h2):
            continue
        from naive import naive_trick

        step = naive_trick(h1, h2, leader)
        if step[0] != "done":
            continue
        succ = (step[1], step[2], step[3])
        if succ != cand:
            expected.setdefault(succ, set()).add(cand)
    for state in universe:
        got = {(p.hand1, p.hand2, p.leader)
               for p in predecessors_of(GameState(*state)).predecessors}
        assert got == expected.get(state, set()), state


@given(st.integers(0, 2 ** 63 - 1), st.integers(0, 30))
@settings(max_examples=60, deadline=None)
def test_duality_on_random_deals(seed, tricks_in):
    """A mid-game boundary state is among the predecessors of its successor."""
    state = random_deal(DealPolicy("uniform", seed), 0)
    for _ in range(tricks_in):
        nxt = play_trick(state).next_state
        if nxt is None:
            return
        state = nxt
    out = play_trick(state)
    if out.next_state is None:
        return
    assert state in predecessors_of(out.next_state).predecessors


def test_closure_from_cycle():
    closure = backward_closure(list(REFERENCE_CYCLE))
    assert closure.budget_hit is None
    nodes = {n.state: n for n in closure.nodes}
    # The published balanced deal feeds the cycle after four tricks.
    assert BALANCED_DEAL in nodes
    assert nodes[BALANCED_DEAL].depth == 4
    # No cycle state appears among the discovered family.
    assert not set(nodes) & set(REFERENCE_CYCLE)
    # Conservation: every family member has the anchor composition.
    anchor_comp = composition(REFERENCE_CYCLE[0])
    assert all(composition(s) == anchor_comp for s in nodes)


def test_closure_family_counts():
    closure = backward_closure(list(REFERENCE_CYCLE))
    report = family_report(closure)
    assert report["balanced_nodes"] == 30
    assert report["nodes"] == 2608
    assert report["sources"] == 2264
    balanced = balanced_members(closure.nodes)
    assert BALANCED_DEAL in balanced
    assert len(balanced) == 30


def test_closure_monotone_in_budgets():
    small = backward_closure(list(REFERENCE_CYCLE), max_depth=2)
    big = backward_closure(list(REFERENCE_CYCLE), max_depth=4)
    small_states = {n.state for n in small.nodes}
    big_states = {n.state for n in big.nodes}
    assert small_states <= big_states
    assert small.budget_hit == "depth"


def test_closure_state_budget():
    closure = backward_closure(list(REFERENCE_CYCLE), max_states=10)
    assert closure.budget_hit == "states"
    assert len(closure.nodes) == 10


def test_closure_of_sourceless_anchor():
    anchor = GameState("A", "-", 1)
    closure = backward_closure([anchor])
    assert closure.nodes == ()
    assert closure.budget_hit is None


def test_balanced_members_empty_for_unbalanced():
    nodes = [FamilyNode(GameState("J--", "-", 1), 1, True)]
    assert balanced_members(nodes) == []


def test_unbalanced_construction_has_no_balanced_family():
    """Backward play from the first standard construction's loop reaches
    no balanced deck."""
    from bmn import play_game
    from bmn.registry import UNBALANCED_DECKS

    out = play_game(UNBALANCED_DECKS[1])
    closure = backward_closure(list(out.cycle_states))
    assert closure.budget_hit is None
    assert balanced_members(closure.nodes) == []


def test_dot_output():
    closure = backward_closure(list(REFERENCE_CYCLE), max_depth=1)
    dot = to_dot(closure)
    assert dot.startswith("digraph")
    assert "->" in dot
