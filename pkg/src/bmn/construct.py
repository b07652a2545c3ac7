"""Constructive machinery for building non-terminating decks.

Loop expansion, the three single-card mutation operators, the
jack-template piece test, piece enumeration (base-4 counting and multiset
permutation modes), face-swap equivalence classes, and assembly of
candidate decks from pieces.

A *piece* is a jack-free card sequence that keeps a game looping when it
is jack-terminated and spliced into the template

    ``--J <filter> J <candidate> J- / J-``

with player 1 leading.  Pieces behave independently of each other, so any
number of certified pieces, each followed by a jack, concatenate into a
non-terminating deck against a bare ``J-`` hand.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .cards import BmnError, Card, GameState, composition, format_cards, parse_cards
from .engine import Detect, Outcome, PlayOutcome, play_game, play_trick

#: Filter piece used by default in the certification template.
DEFAULT_FILTER = "--K---A----AA"

#: Default certification budget; catalogue pieces certify far below this.
DEFAULT_BUDGET_TRICKS = 10_000

#: Composition caps for a standard deck: at most 4 of one face kind and
#: 12 face cards total may appear in a piece (jacks are the separators).
MAX_PER_FACE = 4
MAX_TOTAL_FACES = 12

_FACES = (Card.QUEEN, Card.KING, Card.ACE)


class ExpansionError(BmnError):
    """Loop expansion produced a terminating game (malformed loop input)."""


class AssemblyError(BmnError):
    """Assembled deck terminated: a false piece or an interaction bug."""


@dataclass(frozen=True)
class Piece:
    """A jack-free sequence certified by the template test."""

    cards: str
    certified: bool = True

    def __post_init__(self) -> None:
        if "J" in self.cards:
            raise ValueError("pieces never contain jacks")

    def __str__(self) -> str:
        return self.cards

    @property
    def face_count(self) -> int:
        return sum(1 for c in self.cards if c != "-")


def template_test(
    candidate: str | Piece,
    filter_piece: str | Piece = DEFAULT_FILTER,
    budget_tricks: int = DEFAULT_BUDGET_TRICKS,
) -> PlayOutcome:
    """Play the certification template around ``candidate``.

    The candidate is a piece iff the outcome is non-terminating.  The
    filter piece rejects sequences that loop in a bare template but do
    not act independently when combined with other pieces.
    """
    cand = str(candidate)
    filt = str(filter_piece)
    if "J" in cand:
        raise ValueError("candidate must be jack-free")
    hand1 = "--J" + filt + "J" + cand + "J-"
    return play_game(GameState(hand1, "J-"), max_tricks=budget_tricks, detect=Detect.BRENT)


def is_piece(candidate: str, filter_piece: str = DEFAULT_FILTER,
             budget_tricks: int = DEFAULT_BUDGET_TRICKS) -> bool:
    """Whether ``candidate`` certifies in the template.

    Candidates are screened by the compiled kernel; positives are then
    confirmed by the exact engine, so a certified result never rests on
    the fast path alone.
    """
    from . import fastsim
    from .engine import classify

    cand = str(candidate)
    if "J" in cand:
        raise ValueError("candidate must be jack-free")
    hand1 = parse_cards("--J" + str(filter_piece) + "J" + cand + "J-")
    code, _, _ = fastsim.play_values(hand1, (Card.JACK, Card.NUMBER), 1, budget_tricks)
    if code != fastsim.OUTCOME_LOOP:
        return False
    state = GameState(format_cards(hand1), "J-")
    return classify(state, budget_tricks) is Outcome.NON_TERMINATING


def assemble_deck(pieces: Sequence[str | Piece], verify_budget: int = 100_000) -> GameState:
    """Concatenate pieces, each jack-terminated, against a bare ``J-`` hand.

    hand1 is ``piece1 + J + piece2 + J + ... + pieceK + J-`` with player 1
    leading.  The result is asserted non-terminating before being
    returned; callers check :func:`bmn.cards.composition` for
    standard-deck validity.

    Raises :class:`AssemblyError` with the replayed outcome if the deck
    terminates.
    """
    if not pieces:
        raise ValueError("need at least one piece")
    hand1 = "".join(str(p) + "J" for p in pieces) + "-"
    state = GameState(hand1, "J-")
    outcome = play_game(state, max_tricks=verify_budget, detect=Detect.BRENT)
    if outcome.kind is not Outcome.NON_TERMINATING:
        raise AssemblyError(
            f"assembled deck {state} gave {outcome.kind.value} after "
            f"{outcome.tricks} tricks; pieces: {[str(p) for p in pieces]}")
    return state


def expand_loop(loop: Sequence[GameState], verify_budget: int = 1_000_000) -> GameState:
    """Concatenate all loop states' hands into one larger candidate game.

    Joins state i's hand1 for all i in loop order from the first state
    (likewise hand2), keeping the first state's leader.  Expansion is a
    candidate generator, not a guaranteed construction: the result is
    replayed and :class:`ExpansionError` raised if it terminates, so only
    verified looping games are ever returned.  Both reference cycles
    refuse every concatenation order, so callers should expect failures
    and keep only the survivors.
    """
    loop = list(loop)
    if not loop:
        raise ValueError("loop must be non-empty")
    state = GameState("".join(s.hand1 for s in loop),
                      "".join(s.hand2 for s in loop), loop[0].leader)
    outcome = play_game(state, max_tricks=verify_budget, detect=Detect.BRENT)
    if outcome.kind is not Outcome.NON_TERMINATING:
        raise ExpansionError(
            f"expanded game gave {outcome.kind.value} after {outcome.tricks} tricks")
    return state


def attach_copies(state: GameState, copies: int = 2,
                  verify_budget: int = 1_000_000) -> GameState:
    """Attach a looping game to itself end to end, ``copies`` times total.

    Doubling the smallest looping game this way yields the next one up
    (``J--J--`` against ``-J--J-``).  Like :func:`expand_loop` this is a
    candidate generator: the result is verified by play and
    :class:`ExpansionError` raised if it terminates.
    """
    if copies < 1:
        raise ValueError("copies must be >= 1")
    expanded = GameState(state.hand1 * copies, state.hand2 * copies, state.leader)
    outcome = play_game(expanded, max_tricks=verify_budget, detect=Detect.BRENT)
    if outcome.kind is not Outcome.NON_TERMINATING:
        raise ExpansionError(
            f"attached game gave {outcome.kind.value} after {outcome.tricks} tricks")
    return expanded


# ---------------------------------------------------------------------------
# Mutation operators
# ---------------------------------------------------------------------------

def _single_edits(deck: tuple[int, ...], ops: frozenset[str]) -> Iterator[tuple[int, ...]]:
    """All decks one Insert/Remove/Swap edit away from ``deck``."""
    kinds = (Card.NUMBER, Card.JACK, Card.QUEEN, Card.KING, Card.ACE)
    if "insert" in ops:
        for i in range(len(deck) + 1):
            for k in kinds:
                yield deck[:i] + (k,) + deck[i:]
    if "remove" in ops:
        for i in range(len(deck)):
            yield deck[:i] + deck[i + 1:]
    if "swap" in ops:
        for i, cur in enumerate(deck):
            for k in kinds:
                if k != cur:
                    yield deck[:i] + (k,) + deck[i + 1:]


def mutate(
    state: GameState,
    ops: Iterable[str] = ("insert", "remove", "swap"),
    max_edits: int = 1,
    budget_tricks: int = DEFAULT_BUDGET_TRICKS,
) -> list[GameState]:
    """Non-terminating variants within ``max_edits`` single-card edits.

    Edits apply to the concatenated deck (hand1 + hand2); every resulting
    card list is tested at every split point between the hands, keeping
    the input's leader.  With ``max_edits`` 0 this is the identity
    filter: the input itself if non-terminating, else nothing.
    """
    ops = frozenset(o.lower() for o in ops)
    unknown = ops - {"insert", "remove", "swap"}
    if unknown:
        raise ValueError(f"unknown ops: {sorted(unknown)}")
    if not 0 <= max_edits <= 3:
        raise ValueError("max_edits must be in 0..3")
    base = parse_cards(state.hand1) + parse_cards(state.hand2)
    decks = {base}
    frontier = {base}
    for _ in range(max_edits):
        nxt = set()
        for deck in frontier:
            for edited in _single_edits(deck, ops):
                if edited not in decks:
                    decks.add(edited)
                    nxt.add(edited)
        frontier = nxt
    results: list[GameState] = []
    seen: set[GameState] = set()
    for deck in decks:
        for split in range(len(deck) + 1):
            hand1, hand2 = deck[:split], deck[split:]
            leader_hand = hand1 if state.leader == 1 else hand2
            if not leader_hand:
                continue
            cand = GameState(format_cards(hand1), format_cards(hand2), state.leader)
            if cand in seen:
                continue
            seen.add(cand)
            out = play_game(cand, max_tricks=budget_tricks, detect=Detect.BRENT)
            if out.kind is Outcome.NON_TERMINATING:
                results.append(cand)
    return results


# ---------------------------------------------------------------------------
# Piece enumeration
# ---------------------------------------------------------------------------

def _composition_ok(cards: Sequence[int]) -> bool:
    counts = [0] * 5
    for c in cards:
        counts[c] += 1
    faces = counts[Card.QUEEN] + counts[Card.KING] + counts[Card.ACE]
    return faces <= MAX_TOTAL_FACES and max(counts[1:]) <= MAX_PER_FACE


def iter_base4_candidates(max_len: int) -> Iterator[str]:
    """Candidate sequences in base-4 counting order with left reduction.

    Digit values map 0/1/2/3 to number/queen/king/ace.  Each counter
    value is padded to ``max_len`` digits and then reduced by repeatedly
    stripping the leftmost digit until a face card leads, testing every
    reduction; across the whole scan each distinct sequence of length at
    most ``max_len`` appears exactly once.  Candidates breaking the
    standard-deck composition caps are skipped.
    """
    digit_cards = (Card.NUMBER, Card.QUEEN, Card.KING, Card.ACE)
    for value in range(4 ** max_len):
        digits = []
        v = value
        for _ in range(max_len):
            digits.append(v & 3)
            v >>= 2
        digits.reverse()
        cards = tuple(digit_cards[d] for d in digits)
        # Strip the leftmost card after each test until a face card leads.
        for start in range(max_len):
            cand = cards[start:]
            if _composition_ok(cand):
                yield format_cards(cand)
            if cards[start] != Card.NUMBER:
                break


def iter_multiset_candidates(face_budget: Mapping[str, int], max_len: int) -> Iterator[str]:
    """Distinct arrangements of every face sub-multiset of ``face_budget``
    padded with number cards up to ``max_len``.

    ``face_budget`` maps face symbols (``Q``/``K``/``A``) to maximum
    counts, e.g. ``{"K": 6, "Q": 4}``.  Composition caps apply.
    """
    from sympy.utilities.iterables import multiset_permutations

    budget = {sym: int(n) for sym, n in face_budget.items()}
    unknown = set(budget) - {"Q", "K", "A"}
    if unknown:
        raise ValueError(f"face budget may only contain Q/K/A, got {sorted(unknown)}")
    ranges = [range(budget.get(sym, 0) + 1) for sym in "QKA"]
    for nq, nk, na in itertools.product(*ranges):
        faces = [Card.QUEEN] * nq + [Card.KING] * nk + [Card.ACE] * na
        if not _composition_ok(faces):
            continue
        for numbers in range(max_len - len(faces) + 1):
            multiset = [int(c) for c in faces] + [0] * numbers
            if not multiset:
                continue
            for perm in multiset_permutations(multiset):
                yield format_cards(perm)


def canonical_piece(members: Iterable[str]) -> str:
    """Class representative: lexicographically least under ``- J Q K A``."""
    return min(members, key=lambda s: tuple(parse_cards(s)))


def enumerate_pieces(
    max_len: int,
    mode: str = "base4",
    face_budget: Optional[Mapping[str, int]] = None,
    filter_piece: str = DEFAULT_FILTER,
    budget_tricks: int = DEFAULT_BUDGET_TRICKS,
    dedup: bool = True,
) -> list[Piece]:
    """Certified pieces up to ``max_len`` cards.

    ``mode`` is ``"base4"`` (counting scan with left reduction) or
    ``"multiset"`` (arrangements of ``face_budget`` sub-multisets).  With
    ``dedup`` the result keeps one representative per face-swap
    equivalence class, chosen lexicographically least; the raw certified
    sequences are available via :func:`iter_certified`.
    """
    if max_len < 1 or max_len > 40:
        raise ValueError("max_len must be in 1..40")
    certified = list(iter_certified(max_len, mode, face_budget, filter_piece, budget_tricks))
    if not dedup:
        return [Piece(c) for c in certified]
    # Union-find over the certified set, connecting members one
    # class-preserving edit apart; no further template tests are needed
    # because both endpoints are already certified.
    index = {c: i for i, c in enumerate(certified)}
    parent = list(range(len(certified)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for c in certified:
        i = find(index[c])
        for edited in _class_edits(parse_cards(c)):
            j = index.get(format_cards(edited))
            if j is not None:
                j = find(j)
                if i != j:
                    parent[j] = i
    classes: dict[int, list[str]] = {}
    for c in certified:
        classes.setdefault(find(index[c]), []).append(c)
    reps = [canonical_piece(members) for members in classes.values()]
    reps.sort(key=lambda s: (len(s), tuple(parse_cards(s))))
    return [Piece(r) for r in reps]


def iter_certified(
    max_len: int,
    mode: str = "base4",
    face_budget: Optional[Mapping[str, int]] = None,
    filter_piece: str = DEFAULT_FILTER,
    budget_tricks: int = DEFAULT_BUDGET_TRICKS,
) -> Iterator[str]:
    """Yield every candidate that certifies, in scan order, no dedup."""
    if mode == "base4":
        candidates = iter_base4_candidates(max_len)
    elif mode == "multiset":
        if face_budget is None:
            raise ValueError("multiset mode needs a face_budget")
        candidates = iter_multiset_candidates(face_budget, max_len)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    from . import fastsim

    filt = str(filter_piece)
    prefix = parse_cards("--J" + filt + "J")
    suffix = (Card.JACK, Card.NUMBER)
    hand2 = (Card.JACK, Card.NUMBER)
    seen: set[str] = set()

    from .engine import classify

    def screen(chunk: list[str]) -> Iterator[str]:
        states = [(prefix + parse_cards(c) + suffix, hand2, 1) for c in chunk]
        codes = fastsim.screen_batch(states, budget_tricks)
        for cand, code in zip(chunk, codes):
            # Confirm kernel positives with the exact engine.
            if code != fastsim.OUTCOME_LOOP:
                continue
            state = GameState(format_cards(prefix) + cand + "J-", "J-")
            if classify(state, budget_tricks) is Outcome.NON_TERMINATING:
                yield cand

    chunk: list[str] = []
    for cand in candidates:
        if cand in seen:
            continue
        seen.add(cand)
        chunk.append(cand)
        if len(chunk) >= 8192:
            yield from screen(chunk)
            chunk = []
    if chunk:
        yield from screen(chunk)


# ---------------------------------------------------------------------------
# Face-swap equivalence classes
# ---------------------------------------------------------------------------

def _class_edits(cards: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """Single class-preserving edits: face-for-face swaps plus number-card
    insertion and removal."""
    for i, cur in enumerate(cards):
        if cur in _FACES:
            for k in _FACES:
                if k != cur:
                    yield cards[:i] + (k,) + cards[i + 1:]
        else:
            yield cards[:i] + cards[i + 1:]
    for i in range(len(cards) + 1):
        yield cards[:i] + (Card.NUMBER,) + cards[i:]


def iter_swap_class(
    piece: str | Piece,
    filter_piece: str = DEFAULT_FILTER,
    budget_tricks: int = DEFAULT_BUDGET_TRICKS,
    length_slack: int = 3,
    max_members: Optional[int] = None,
) -> Iterator[Piece]:
    """Lazily walk the seed's equivalence class, seed first.

    Breadth-first over single face-swap / number-card edits where every
    visited member re-certifies in the template; lengths may drift at
    most ``length_slack`` cards from the seed, which bounds the class.
    ``max_members`` caps the walk for classes with huge swap orbits.
    """
    from . import fastsim
    from .engine import classify

    seed = str(piece)
    start = parse_cards(seed)
    prefix = parse_cards("--J" + str(filter_piece) + "J")
    tail = (Card.JACK, Card.NUMBER)
    seen = {start}
    queue = deque([start])
    yield Piece(seed)
    count = 1
    while queue:
        cur = queue.popleft()
        fresh = []
        for nxt in _class_edits(cur):
            if nxt in seen or abs(len(nxt) - len(start)) > length_slack:
                continue
            seen.add(nxt)
            fresh.append(nxt)
        if not fresh:
            continue
        codes = fastsim.screen_batch(
            [(prefix + cand + tail, tail, 1) for cand in fresh], budget_tricks)
        for cand, code in zip(fresh, codes):
            if code != fastsim.OUTCOME_LOOP:
                continue
            text = format_cards(cand)
            state = GameState(format_cards(prefix) + text + "J-", "J-")
            if classify(state, budget_tricks) is Outcome.NON_TERMINATING:
                yield Piece(text)
                count += 1
                if max_members is not None and count >= max_members:
                    return
                queue.append(cand)


def find_swap_class(
    piece: str | Piece,
    budget_tricks: int = DEFAULT_BUDGET_TRICKS,
    filter_piece: str = DEFAULT_FILTER,
    length_slack: int = 3,
    max_members: Optional[int] = 100_000,
) -> list[Piece]:
    """The discovered equivalence-class members of ``piece`` (seed included)."""
    return list(iter_swap_class(piece, filter_piece, budget_tricks,
                                length_slack, max_members))


def same_swap_class(a: str | Piece, b: str | Piece,
                    filter_piece: str = DEFAULT_FILTER,
                    budget_tricks: int = DEFAULT_BUDGET_TRICKS,
                    max_members: int = 100_000) -> bool:
    """Whether ``b`` is reachable from ``a`` through certified single edits."""
    target = str(b)
    for member in iter_swap_class(a, filter_piece, budget_tricks,
                                  max_members=max_members):
        if str(member) == target:
            return True
    return False


# ---------------------------------------------------------------------------
# Backward-play diagnostics
# ---------------------------------------------------------------------------

def lead_swap_report(piece: str | Piece) -> dict[int, bool]:
    """Which single backward steps of the piece's own game flip the leader.

    For the jack-terminated single-piece game, maps each legal backward
    pile size to whether the reconstructed previous leader differs from
    the current one.  Recorded as a diagnostic only; a flip deep inside a
    piece makes it useless for balancing a deck.
    """
    from .reverse import predecessors_of

    state = GameState(str(piece) + "J-", "J-")
    report: dict[int, bool] = {}
    for pred in predecessors_of(state).predecessors:
        pile_size = play_trick(pred).cards_laid
        report[pile_size] = pred.leader != state.leader
    return report


# ---------------------------------------------------------------------------
# Piece store I/O
# ---------------------------------------------------------------------------

def write_piece_store(path, pieces: Iterable[str | Piece],
                      filter_piece: str = DEFAULT_FILTER,
                      budget_tricks: int = DEFAULT_BUDGET_TRICKS) -> None:
    """Newline-delimited store of class representatives with a header line."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# filter={filter_piece} budget={budget_tricks}\n")
        for p in pieces:
            fh.write(f"{p}\n")


def read_piece_store(path) -> tuple[list[Piece], dict[str, str]]:
    """Read a piece store; returns (pieces, header metadata)."""
    meta: dict[str, str] = {}
    pieces: list[Piece] = []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for part in line[1:].split():
                    key, _, val = part.partition("=")
                    if val:
                        meta[key] = val
                continue
            pieces.append(Piece(line))
    return pieces, meta
