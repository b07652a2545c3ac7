"""Independent reference simulator used as the test oracle.

Deliberately written in a different style from the package engine:
hands are plain strings, the trick is resolved by mutually recursive
alternation/payment functions, and game history is a linear list scanned
for repeats.  Slow but simple; only used on small inputs and samples.
"""

from __future__ import annotations

PENALTY = {"J": 1, "Q": 2, "K": 3, "A": 4}


class _Table:
    def __init__(self, hand1: str, hand2: str):
        self.hands = {1: list(hand1), 2: list(hand2)}
        self.pile: list[str] = []

    def lay(self, player: int) -> str | None:
        if not self.hands[player]:
            return None
        card = self.hands[player].pop(0)
        self.pile.append(card)
        return card


def _alternate(table: _Table, player: int):
    """Players alternate number cards until a court card starts a payment."""
    while True:
        card = table.lay(player)
        if card is None:
            return ("halt", 3 - player)
        if card in PENALTY:
            return _pay(table, 3 - player, PENALTY[card], player)
        player = 3 - player


def _pay(table: _Table, payer: int, owed: int, demander: int):
    """payer owes `owed` ordinary cards; court cards flip the obligation."""
    for _ in range(owed):
        card = table.lay(payer)
        if card is None:
            return ("halt", demander)
        if card in PENALTY:
            return _pay(table, demander, PENALTY[card], payer)
    return ("won", demander)


def naive_trick(hand1: str, hand2: str, leader: int):
    """One trick. Returns ('done', h1, h2, winner, pile) or ('halt', winner, laid)."""
    table = _Table(hand1, hand2)
    result = _alternate(table, leader)
    if result[0] == "halt":
        return ("halt", result[1], len(table.pile))
    winner = result[1]
    table.hands[winner].extend(table.pile)
    return ("done", "".join(table.hands[1]), "".join(table.hands[2]), winner,
            "".join(table.pile))


def naive_play(hand1: str, hand2: str, leader: int, max_tricks: int = 100_000):
    """Full game with a linear-scan visited list.

    Returns ('end', winner, tricks, cards) or ('loop', lead_in, period)
    or ('cutoff',).  Uses the same victory accounting as the engine: a
    player holding everything at a boundary wins; a failed mid-trick draw
    ends the game, counting the trick and charging the attempt.
    """
    history: list[tuple[str, str, int]] = []
    tricks = cards = 0
    while tricks < max_tricks:
        if not hand1:
            return ("end", 2, tricks, cards)
        if not hand2:
            return ("end", 1, tricks, cards)
        state = (hand1, hand2, leader)
        if state in history:
            first = history.index(state)
            return ("loop", first, len(history) - first)
        history.append(state)
        step = naive_trick(hand1, hand2, leader)
        if step[0] == "halt":
            return ("end", step[1], tricks + 1, cards + step[2] + 1)
        _, hand1, hand2, winner, pile = step
        tricks += 1
        cards += len(pile)
        leader = winner
    return ("cutoff",)


def naive_predecessors(hand1: str, hand2: str, leader: int, universe):
    """Brute-force inversion: forward-play every candidate in `universe`
    one trick and keep those that land exactly on the given state."""
    target = (hand1, hand2, leader)
    found = []
    for cand in universe:
        if cand == target:
            continue
        step = naive_trick(*cand)
        if step[0] == "done" and (step[1], step[2], step[3]) == target:
            found.append(cand)
    return found
