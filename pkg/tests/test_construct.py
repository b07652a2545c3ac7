"""Constructive machinery: template, pieces, mutation, expansion, assembly."""

from __future__ import annotations

import itertools

import pytest

from bmn import (
    AssemblyError,
    GameState,
    Outcome,
    Piece,
    assemble_deck,
    composition,
    expand_loop,
    mutate,
    play_game,
    template_test,
)
from bmn.construct import (
    DEFAULT_FILTER,
    canonical_piece,
    enumerate_pieces,
    is_piece,
    iter_base4_candidates,
    iter_certified,
    iter_multiset_candidates,
    iter_swap_class,
    lead_swap_report,
    read_piece_store,
    same_swap_class,
    write_piece_store,
)
from bmn.registry import CONSTRUCTED_GAMES, PIECES, SIX_CARD_GAME


def test_template_shape():
    # The template places the candidate between the filter and the
    # closing jack; certified means the game loops.
    out = template_test("--", budget_tricks=10_000)
    assert out.kind is Outcome.NON_TERMINATING


def test_template_certifies_the_balance_enabling_piece():
    assert is_piece("--------K---------Q-Q-K---Q-KKQ")


def test_template_rejects_bare_ace():
    out = template_test("A")
    assert out.kind is Outcome.TERMINATED


def test_template_rejects_jacks():
    with pytest.raises(ValueError):
        template_test("J-")


def test_all_catalogue_pieces_certify():
    for piece in PIECES:
        assert is_piece(piece), piece


def test_piece_type_rejects_jack():
    with pytest.raises(ValueError):
        Piece("J-")


def test_assemble_published_deck():
    state = assemble_deck(["--K---A----AA", "--", "--------K---------Q-Q-K---Q-KAQ"])
    assert state == CONSTRUCTED_GAMES[-1]
    assert composition(state).is_standard


def test_assemble_single_piece():
    state = assemble_deck(["--K---A----AA"])
    assert state == GameState("--K---A----AAJ-", "J-", 1)


def test_assemble_rejects_false_piece():
    with pytest.raises(AssemblyError):
        assemble_deck(["A"])


def test_expand_loop_is_a_filtered_generator():
    """Concatenating the six-card game's own loop states terminates, so
    the expansion must refuse it rather than return a dud candidate."""
    from bmn import ExpansionError

    out = play_game(SIX_CARD_GAME)
    with pytest.raises(ExpansionError):
        expand_loop(out.cycle_states)


def test_attach_copies_doubles_six_card_game():
    from bmn.construct import attach_copies

    doubled = attach_copies(SIX_CARD_GAME, 2)
    assert doubled == GameState("J--J--", "-J--J-", 1)
    assert play_game(doubled).kind is Outcome.NON_TERMINATING
    tripled = attach_copies(SIX_CARD_GAME, 3)
    assert play_game(tripled).kind is Outcome.NON_TERMINATING


def test_expand_loop_identity_on_single_state():
    # A one-element loop concatenates to itself and only gets verified.
    loop = [GameState("J--J--", "-J--J-", 1)]
    assert expand_loop(loop) == loop[0]


def test_expand_loop_rejects_garbage():
    from bmn import ExpansionError

    with pytest.raises(ExpansionError):
        expand_loop([GameState("A-", "-", 1)])


def test_mutate_identity_filter():
    looping = SIX_CARD_GAME
    assert mutate(looping, max_edits=0) == [looping]
    ending = GameState("A-", "--", 1)
    assert mutate(ending, max_edits=0) == []


def test_mutate_single_swap_scan():
    # Exhaustive 1-edit scan with the engine as oracle: swapped variants
    # like J--/-Q- get tested but terminate, so only the unedited deck
    # survives the filter.
    variants = mutate(SIX_CARD_GAME, ops=["swap"], max_edits=1, budget_tricks=2000)
    assert variants == [SIX_CARD_GAME]
    assert GameState("J--", "-Q-", 1) not in variants
    assert play_game(GameState("J--", "-Q-", 1), 2000).kind is Outcome.TERMINATED


def test_mutate_two_edits_finds_new_loops():
    variants = mutate(SIX_CARD_GAME, max_edits=2, budget_tricks=2000)
    assert len(variants) == 24
    assert GameState("J--K-", "-J-", 1) in variants
    for v in variants:
        assert play_game(v, max_tricks=2000).kind is Outcome.NON_TERMINATING


def test_mutate_rejects_bad_ops():
    with pytest.raises(ValueError):
        mutate(SIX_CARD_GAME, ops=["teleport"], max_edits=1)
    with pytest.raises(ValueError):
        mutate(SIX_CARD_GAME, max_edits=9)


def test_base4_scan_covers_all_strings():
    # The counting-with-reduction scan visits every sequence up to the
    # length bound exactly once (composition caps aside).
    got = sorted(iter_base4_candidates(3))
    want = sorted("".join(p) for n in (1, 2, 3)
                  for p in itertools.product("-QKA", repeat=n))
    assert got == want


def test_base4_scan_composition_caps():
    for cand in iter_base4_candidates(6):
        faces = [c for c in cand if c != "-"]
        assert len(faces) <= 12
        assert all(faces.count(k) <= 4 for k in "QKA")


def test_enumerate_pieces_maxlen2():
    reps = [str(p) for p in enumerate_pieces(2)]
    assert "--" in reps


def test_enumerate_pieces_maxlen6_contains_catalogue_entries():
    reps = [str(p) for p in enumerate_pieces(6)]
    assert "--" in reps
    assert "--Q-Q" in reps
    assert "-----K" in reps


def test_certified_scan_matches_plain_product_scan():
    """The base-4 scan's certified set equals brute-force generation."""
    max_len = 5
    scan = set(iter_certified(max_len))
    brute = set()
    for n in range(1, max_len + 1):
        for cand in itertools.product("-QKA", repeat=n):
            text = "".join(cand)
            faces = [c for c in text if c != "-"]
            if len(faces) > 12 or any(faces.count(k) > 4 for k in "QKA"):
                continue
            if is_piece(text):
                brute.add(text)
    assert scan == brute


def test_multiset_mode_finds_swap_class_member():
    found = list(iter_certified(13, mode="multiset", face_budget={"K": 6, "Q": 4}))
    assert "--Q-Q-Q-Q-K-K" in found


def test_swap_class_of_all_number_piece():
    members = {str(p) for p in iter_swap_class("--")}
    # No faces to swap: only number-card count variants can appear.
    assert "--" in members
    assert all(set(m) == {"-"} for m in members)


def test_face_swap_orbit_fully_certifies():
    """Every face assignment over the six face slots stays a piece."""
    base = "--Q-Q-Q-Q-K-K"
    slots = [i for i, c in enumerate(base) if c != "-"]
    count = 0
    for kinds in itertools.product("QKA", repeat=len(slots)):
        cand = list(base)
        for i, k in zip(slots, kinds):
            cand[i] = k
        assert is_piece("".join(cand))
        count += 1
    assert count == 3 ** 6


def test_published_pieces_share_a_class():
    """A frozen single-edit path, every intermediate certified, proves the
    two catalogue-adjacent pieces are one piece under class edits.  (The
    path was found once with same_swap_class's breadth-first walk.)"""
    path = [
        "--Q-Q-Q-Q-K-K",
        "--Q-K-Q-Q-K-K",
        "--Q-K-A-Q-K-K",
        "--Q-K-A-K-K-K",
        "--Q-K-A-KK-K",
        "--Q-K-A-KQ-K",
        "--Q-K-A-KQ-K-",
    ]
    for step in path:
        assert is_piece(step), step
    for a, b in zip(path, path[1:]):
        la, lb = len(a), len(b)
        if la == lb:
            diffs = [i for i, (x, y) in enumerate(zip(a, b)) if x != y]
            assert len(diffs) == 1 and a[diffs[0]] != "-" and b[diffs[0]] != "-"
        else:
            assert abs(la - lb) == 1
            longer, shorter = (a, b) if la > lb else (b, a)
            assert any(longer[:i] + longer[i + 1:] == shorter and longer[i] == "-"
                       for i in range(len(longer)))


def test_same_swap_class_search_small():
    # The breadth-first search itself, on a cheap pair one swap apart.
    assert same_swap_class("--Q-Q", "--K-Q", max_members=500)


def test_canonical_piece_order():
    assert canonical_piece(["--Q-Q", "--K-Q", "--A-Q"]) == "--Q-Q"
    # Dash sorts below faces; shorter prefixes win.
    assert canonical_piece(["-Q", "-Q-"]) == "-Q"


def test_lead_swap_report():
    # The filter piece was chosen for backward play that keeps the lead.
    report = lead_swap_report(DEFAULT_FILTER)
    assert report, "single-piece game must have backward steps"
    # The problem piece has a deep subsequence that flips the lead.
    bad = lead_swap_report("--------K----KK--Q-K--Q--QQ")
    assert any(bad.values())


def test_piece_store_round_trip(tmp_path):
    path = tmp_path / "pieces.txt"
    pieces = enumerate_pieces(5)
    write_piece_store(path, pieces, DEFAULT_FILTER, 7777)
    back, meta = read_piece_store(path)
    assert [str(p) for p in back] == [str(p) for p in pieces]
    assert meta["filter"] == DEFAULT_FILTER
    assert meta["budget"] == "7777"
