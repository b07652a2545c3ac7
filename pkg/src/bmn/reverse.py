"""Backward play: predecessor enumeration and family closure.

A trick winner leads the next trick, so the previous trick's pile is a
suffix of the current leader's hand.  Each hand suffix is replayed under
the forward rules to decide whether it is a legal trick transcript and,
if so, which player laid each card; unwinding those cards to the hand
fronts reconstructs the predecessor.  Backward play is nondeterministic:
several suffixes and either previous leader may validate, so families of
deals converge on one state.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .cards import Card, GameState, format_cards, parse_cards
from .engine import play_trick


@dataclass(frozen=True)
class PredecessorSet:
    """All states one legal forward trick before ``origin``."""

    origin: GameState
    predecessors: tuple[GameState, ...]


@dataclass(frozen=True)
class FamilyNode:
    """A state discovered by backward closure.

    Attributes:
        state: the discovered boundary state.
        depth: tricks of forward play from this state to an anchor.
        is_source: True when the state has no predecessors of its own.
    """

    state: GameState
    depth: int
    is_source: bool

    def to_json(self) -> dict:
        return {"state": self.state.to_json(), "depth": self.depth,
                "isSource": self.is_source}


@dataclass(frozen=True)
class ClosureResult:
    """Backward closure output plus which budget bound, if any, was hit."""

    anchors: tuple[GameState, ...]
    nodes: tuple[FamilyNode, ...]
    budget_hit: Optional[str] = None  # "depth", "states", or None


def _replay_transcript(pile: tuple[int, ...], leader: int):
    """Replay a candidate pile as one trick led by ``leader``.

    Returns (winner, cards laid by player 1, cards laid by player 2) when
    the pile is a complete legal trick ending exactly on its last card,
    else None.
    """
    to_play = leader
    penalty = 0
    laid1: list[int] = []
    laid2: list[int] = []
    last = len(pile) - 1
    for i, card in enumerate(pile):
        (laid1 if to_play == 1 else laid2).append(card)
        if card != Card.NUMBER:
            penalty = card
            to_play = 3 - to_play
        elif penalty > 0:
            penalty -= 1
            if penalty == 0:
                # Trick complete; legal only if the pile is fully consumed.
                return (3 - to_play, laid1, laid2) if i == last else None
        else:
            to_play = 3 - to_play
    return None


def predecessors_of(state: GameState) -> PredecessorSet:
    """Enumerate every state from which one forward trick yields ``state``.

    Complete and sound: each candidate suffix of the leader's hand is
    validated as a trick transcript for both possible previous leaders,
    and every accepted predecessor is re-checked by forward play.
    """
    winner = state.leader  # previous trick's winner leads now
    wh = parse_cards(state.hand(winner))
    other_hand = state.hand(3 - winner)
    found: list[GameState] = []
    seen: set[GameState] = set()
    for size in range(2, len(wh) + 1):
        pile = wh[-size:]
        rest = format_cards(wh[:-size])
        for prev_leader in (1, 2):
            replay = _replay_transcript(pile, prev_leader)
            if replay is None or replay[0] != winner:
                continue
            _, laid1, laid2 = replay
            if winner == 1:
                cand = GameState(format_cards(laid1) + rest,
                                 format_cards(laid2) + other_hand, prev_leader)
            else:
                cand = GameState(format_cards(laid1) + other_hand,
                                 format_cards(laid2) + rest, prev_leader)
            if cand == state or cand in seen:
                continue
            assert play_trick(cand).next_state == state, "unsound predecessor"
            seen.add(cand)
            found.append(cand)
    return PredecessorSet(state, tuple(found))


def backward_closure(
    anchors: Iterable[GameState],
    max_depth: int = 64,
    max_states: int = 1_000_000,
) -> ClosureResult:
    """Breadth-first predecessor closure from the anchor states.

    Anchor states (e.g. a detected cycle) are excluded from the result;
    every other discovered state is reported at its smallest depth, with
    ``is_source`` marking states that have no predecessors at all.
    Budget exhaustion is reported in-band via ``budget_hit``.
    """
    anchors = tuple(anchors)
    if not anchors:
        raise ValueError("anchors must be non-empty")
    if max_depth < 1 or max_states < 1:
        raise ValueError("budgets must be >= 1")
    anchor_set = set(anchors)
    preds_cache: dict[GameState, tuple[GameState, ...]] = {}

    def preds(s: GameState) -> tuple[GameState, ...]:
        cached = preds_cache.get(s)
        if cached is None:
            cached = predecessors_of(s).predecessors
            preds_cache[s] = cached
        return cached

    depth_of: dict[GameState, int] = {}
    order: list[GameState] = []
    frontier = deque(anchors)
    depth = 0
    budget_hit = None
    while frontier and budget_hit is None:
        depth += 1
        if depth > max_depth:
            budget_hit = "depth"
            break
        next_frontier: deque[GameState] = deque()
        for s in frontier:
            for p in preds(s):
                if p in anchor_set or p in depth_of:
                    continue
                depth_of[p] = depth
                order.append(p)
                next_frontier.append(p)
                if len(order) >= max_states:
                    budget_hit = "states"
                    break
            if budget_hit:
                break
        frontier = next_frontier
    nodes = tuple(FamilyNode(s, depth_of[s], not preds(s)) for s in order)
    return ClosureResult(anchors, nodes, budget_hit)


def balanced_members(nodes: Iterable[FamilyNode]) -> list[GameState]:
    """States whose hands hold the same number of cards."""
    return [n.state for n in nodes if n.state.is_balanced]


def family_report(closure: ClosureResult) -> dict[str, int]:
    """Family sizes under every natural counting convention.

    The published family count corresponds to one of these conventions;
    callers should report all of them rather than assume.
    """
    nodes = closure.nodes
    sources = [n for n in nodes if n.is_source]
    balanced = [n for n in nodes if n.state.is_balanced]
    dedup_swap = {min(n.state, n.state.swapped(), key=str) for n in sources}
    return {
        "nodes": len(nodes),
        "sources": len(sources),
        "balanced_nodes": len(balanced),
        "balanced_sources": sum(1 for n in sources if n.state.is_balanced),
        "sources_leader1": sum(1 for n in sources if n.state.leader == 1),
        "sources_leader2": sum(1 for n in sources if n.state.leader == 2),
        "sources_up_to_hand_swap": len(dedup_swap),
    }


def to_dot(closure: ClosureResult, include_anchors: bool = True) -> str:
    """DOT graph of the family: nodes are states, edges are single tricks."""
    def ident(s: GameState) -> str:
        return f'"{s.hand1}/{s.hand2}({s.leader})"'

    lines = ["digraph family {", "  rankdir=TB;", "  node [shape=box, fontsize=8];"]
    anchor_set = set(closure.anchors)
    known = anchor_set | {n.state for n in closure.nodes}
    if include_anchors:
        for a in closure.anchors:
            lines.append(f"  {ident(a)} [style=filled, fillcolor=lightgrey];")
            nxt = play_trick(a).next_state
            if nxt in anchor_set:
                lines.append(f"  {ident(a)} -> {ident(nxt)};")
    for n in closure.nodes:
        shape = "note" if n.state.leader == 1 else "box"
        lines.append(f"  {ident(n.state)} [shape={shape}];")
        nxt = play_trick(n.state).next_state
        if nxt is not None and nxt in known:
            lines.append(f"  {ident(n.state)} -> {ident(nxt)};")
    lines.append("}")
    return "\n".join(lines)
