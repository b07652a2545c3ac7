"""Compiled batch simulation kernel.

Deal generation and game play live in one numba kernel so that millions
of games per minute are possible on a single core.  Draw i of a batch is
a pure function of (seed, i): each game owns a splitmix64-keyed counter
stream, so results are bit-identical for a fixed (seed, games) no matter
how many threads run the batch.  The kernel's trick loop mirrors
:mod:`bmn.engine` exactly and is agreement-tested against it.

Outcome codes: 0 terminated, 1 non-terminating, 2 cut off.
"""

from __future__ import annotations

import warnings

import numpy as np

try:
    with warnings.catch_warnings():
        # Old-TBB advisory about the threading layer; the workqueue
        # fallback is fine for our prange loops.
        warnings.simplefilter("ignore")
        import numba
        from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f
        if args and callable(args[0]):
            return args[0]
        return wrap

    prange = range

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)

OUTCOME_TERMINATED = 0
OUTCOME_LOOP = 1
OUTCOME_CUTOFF = 2

#: Card multiset of a standard deck, by value.
STANDARD_DECK = np.array([0] * 36 + [1] * 4 + [2] * 4 + [3] * 4 + [4] * 4, dtype=np.uint8)

#: One hand's multiset under the face-balanced policy: two of each face.
FACE_BALANCED_HAND = np.array([0] * 18 + [1, 1, 2, 2, 3, 3, 4, 4], dtype=np.uint8)

POLICY_UNIFORM = 0
POLICY_FACE_BALANCED = 1


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _stream_key(seed, index):
    return _mix64((U64(seed) + _GOLDEN) ^ _mix64(U64(index) + _GOLDEN))


@njit(cache=True, inline="always")
def _rand(key, t):
    return _mix64(key + U64(t) * _GOLDEN)


@njit(cache=True)
def _deal_into(out, seed, index, policy):
    """Write draw ``index``'s 52-card deal into ``out`` (hand1 then hand2)."""
    key = _stream_key(seed, index)
    if policy == POLICY_UNIFORM:
        for i in range(52):
            out[i] = STANDARD_DECK[i]
        t = 0
        for i in range(51, 0, -1):
            j = int(_rand(key, t) % U64(i + 1))
            t += 1
            tmp = out[i]
            out[i] = out[j]
            out[j] = tmp
    else:
        for i in range(26):
            out[i] = FACE_BALANCED_HAND[i]
            out[26 + i] = FACE_BALANCED_HAND[i]
        t = 0
        for i in range(25, 0, -1):
            j = int(_rand(key, t) % U64(i + 1))
            t += 1
            tmp = out[i]
            out[i] = out[j]
            out[j] = tmp
        for i in range(25, 0, -1):
            j = int(_rand(key, t) % U64(i + 1))
            t += 1
            tmp = out[26 + i]
            out[26 + i] = out[26 + j]
            out[26 + j] = tmp


@njit(cache=True)
def _play(deck, split, leader, max_tricks):
    """Play one game; returns (outcome_code, tricks, cards).

    ``deck`` holds hand1 then hand2 top-first; ``split`` is hand1's size.
    Victory goes to the player holding every card at a trick boundary; a
    player forced to lay from an empty hand mid-trick loses, with that
    trick counted and the failed draw charged as one card.  Loop
    detection is Brent's algorithm on boundary states.
    """
    total = deck.shape[0]
    # Ring buffers sized to the next power of two above the card count.
    cap = 1
    while cap < total + 1:
        cap <<= 1
    mask = cap - 1
    buf = np.empty((2, cap), dtype=np.uint8)
    head = np.zeros(2, dtype=np.int64)
    size = np.zeros(2, dtype=np.int64)
    for i in range(split):
        buf[0, i] = deck[i]
    for i in range(total - split):
        buf[1, i] = deck[split + i]
    size[0] = split
    size[1] = total - split
    pile = np.empty(total, dtype=np.uint8)

    tort = np.empty(total, dtype=np.uint8)
    tort_sizes = np.zeros(2, dtype=np.int64)
    tort_leader = 0
    have_tort = False
    power = 1
    lam = 0

    tricks = 0
    cards = 0
    cur_leader = leader
    while tricks < max_tricks:
        if size[0] == 0 or size[1] == 0:
            return OUTCOME_TERMINATED, tricks, cards
        # Brent comparison on the boundary state.
        if have_tort:
            if size[0] == tort_sizes[0] and size[1] == tort_sizes[1] and cur_leader == tort_leader:
                same = True
                for i in range(size[0]):
                    if buf[0, (head[0] + i) & mask] != tort[i]:
                        same = False
                        break
                if same:
                    for i in range(size[1]):
                        if buf[1, (head[1] + i) & mask] != tort[size[0] + i]:
                            same = False
                            break
                if same:
                    return OUTCOME_LOOP, tricks, cards
        if not have_tort or power == lam:
            for i in range(size[0]):
                tort[i] = buf[0, (head[0] + i) & mask]
            for i in range(size[1]):
                tort[size[0] + i] = buf[1, (head[1] + i) & mask]
            tort_sizes[0] = size[0]
            tort_sizes[1] = size[1]
            tort_leader = cur_leader
            if have_tort:
                power <<= 1
                lam = 0
            have_tort = True
        lam += 1

        # One trick.
        p = cur_leader - 1
        penalty = 0
        laid = 0
        winner = -1
        while True:
            if size[p] == 0:
                # Failed draw: opponent wins; charge the attempt.
                return OUTCOME_TERMINATED, tricks + 1, cards + laid + 1
            c = buf[p, head[p] & mask]
            head[p] += 1
            size[p] -= 1
            pile[laid] = c
            laid += 1
            if c > 0:
                penalty = c
                p = 1 - p
            elif penalty > 0:
                penalty -= 1
                if penalty == 0:
                    winner = 1 - p
                    break
            else:
                p = 1 - p
        tail = head[winner] + size[winner]
        for i in range(laid):
            buf[winner, (tail + i) & mask] = pile[i]
        size[winner] += laid
        tricks += 1
        cards += laid
        cur_leader = winner + 1
    return OUTCOME_CUTOFF, tricks, cards


@njit(cache=True, parallel=True)
def _run_range(seed, start, count, policy, max_tricks, outcomes, tricks, cards):
    for i in prange(count):
        deck = np.empty(52, dtype=np.uint8)
        _deal_into(deck, seed, start + i, policy)
        o, t, c = _play(deck, 26, 1, max_tricks)
        outcomes[i] = o
        tricks[i] = t
        cards[i] = c


@njit(cache=True, parallel=True)
def _play_batch(decks, totals, splits, leaders, max_tricks, codes):
    for i in prange(decks.shape[0]):
        o, t, c = _play(decks[i, :totals[i]], splits[i], leaders[i], max_tricks)
        codes[i] = o


def screen_batch(states: list[tuple], max_tricks: int) -> np.ndarray:
    """Kernel outcome codes for many explicit (hand1, hand2, leader) states.

    Each state's hands are value sequences; results are indexed by input
    position, independent of thread scheduling.
    """
    n = len(states)
    totals = np.empty(n, dtype=np.int64)
    splits = np.empty(n, dtype=np.int64)
    leaders = np.empty(n, dtype=np.int64)
    width = 1
    for i, (h1, h2, leader) in enumerate(states):
        totals[i] = len(h1) + len(h2)
        splits[i] = len(h1)
        leaders[i] = leader
        width = max(width, len(h1) + len(h2))
    decks = np.zeros((n, width), dtype=np.uint8)
    for i, (h1, h2, _) in enumerate(states):
        decks[i, :len(h1)] = list(h1)
        decks[i, len(h1):len(h1) + len(h2)] = list(h2)
    codes = np.empty(n, dtype=np.uint8)
    _play_batch(decks, totals, splits, leaders, max_tricks, codes)
    return codes


@njit(cache=True)
def _face_position_counts(seed, count, policy, counts):
    """Accumulate counts[position, card_value] over ``count`` deals."""
    deck = np.empty(52, dtype=np.uint8)
    for i in range(count):
        _deal_into(deck, seed, i, policy)
        for pos in range(52):
            counts[pos, deck[pos]] += 1


def run_range(seed: int, start: int, count: int, policy: int,
              max_tricks: int, workers: int | None = None):
    """Simulate draws [start, start+count); returns (outcomes, tricks, cards).

    Results are indexed by draw, so they do not depend on thread count.
    """
    outcomes = np.empty(count, dtype=np.uint8)
    tricks = np.empty(count, dtype=np.int32)
    cards = np.empty(count, dtype=np.int64)
    if HAVE_NUMBA and workers:
        old = numba.get_num_threads()
        numba.set_num_threads(max(1, min(workers, old)))
        try:
            _run_range(U64(seed), start, count, policy, max_tricks, outcomes, tricks, cards)
        finally:
            numba.set_num_threads(old)
    else:
        _run_range(U64(seed), start, count, policy, max_tricks, outcomes, tricks, cards)
    return outcomes, tricks, cards


def face_position_counts(seed: int, count: int, policy: int) -> np.ndarray:
    """(52, 5) histogram of card values per deal position over ``count`` draws."""
    counts = np.zeros((52, 5), dtype=np.int64)
    _face_position_counts(U64(seed), count, policy, counts)
    return counts


def classify_states(decks: list[np.ndarray], splits: list[int], leaders: list[int],
                    max_tricks: int) -> list[tuple[int, int, int]]:
    """Kernel outcomes for explicit states (screening helper)."""
    out = []
    for deck, split, leader in zip(decks, splits, leaders):
        out.append(_play(np.asarray(deck, dtype=np.uint8), split, leader, max_tricks))
    return [(int(o), int(t), int(c)) for o, t, c in out]


def play_values(hand1: list[int] | tuple[int, ...], hand2: list[int] | tuple[int, ...],
                leader: int, max_tricks: int) -> tuple[int, int, int]:
    """Kernel outcome for one explicit state; used to screen candidates."""
    deck = np.fromiter(list(hand1) + list(hand2), dtype=np.uint8,
                       count=len(hand1) + len(hand2))
    o, t, c = _play(deck, len(hand1), leader, max_tricks)
    return int(o), int(t), int(c)


# Pure-Python mirror of the kernel's deal stream, for record replay and
# parity tests.  Must match _deal_into bit for bit.

_M64 = (1 << 64) - 1


def _py_mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def _py_stream_key(seed: int, index: int) -> int:
    g = 0x9E3779B97F4A7C15
    return _py_mix64(((seed + g) & _M64) ^ _py_mix64((index + g) & _M64))


def _py_rand(key: int, t: int) -> int:
    return _py_mix64((key + t * 0x9E3779B97F4A7C15) & _M64)


def deal_values(seed: int, index: int, policy: int) -> list[int]:
    """Python reference for the kernel's deal of draw ``index``."""
    key = _py_stream_key(seed, index)
    if policy == POLICY_UNIFORM:
        deck = list(STANDARD_DECK)
        t = 0
        for i in range(51, 0, -1):
            j = _py_rand(key, t) % (i + 1)
            t += 1
            deck[i], deck[j] = deck[j], deck[i]
        return deck
    hand1 = list(FACE_BALANCED_HAND)
    hand2 = list(FACE_BALANCED_HAND)
    t = 0
    for i in range(25, 0, -1):
        j = _py_rand(key, t) % (i + 1)
        t += 1
        hand1[i], hand1[j] = hand1[j], hand1[i]
    for i in range(25, 0, -1):
        j = _py_rand(key, t) % (i + 1)
        t += 1
        hand2[i], hand2[j] = hand2[j], hand2[i]
    return hand1 + hand2
