"""Beggar-My-Neighbor laboratory.

A bit-exact forward engine with loop detection, a backward-play
predecessor engine, the piece/template construction method for building
non-terminating decks, and a reproducible high-throughput random-search
harness, all validated against an embedded reference registry.
"""

from .cards import (
    Card,
    CardSeq,
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
from .engine import (
    CapacityExceededError,
    Detect,
    EmptyLeaderHandError,
    Outcome,
    PlayOutcome,
    TrickOutcome,
    play_game,
    play_trick,
    state_key,
)
from .reverse import (
    ClosureResult,
    FamilyNode,
    PredecessorSet,
    backward_closure,
    balanced_members,
    family_report,
    predecessors_of,
)
from .construct import (
    AssemblyError,
    DEFAULT_FILTER,
    ExpansionError,
    Piece,
    assemble_deck,
    enumerate_pieces,
    expand_loop,
    find_swap_class,
    mutate,
    template_test,
)
from .stochastic import (
    DealPolicy,
    InsufficientTailMassError,
    LengthSummary,
    Policy,
    RecordModel,
    TailFit,
    conditional_survival,
    expected_record,
    expected_record_over_time,
    fit_exponential_tail,
    harmonic,
    random_deal,
    run_batch,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
