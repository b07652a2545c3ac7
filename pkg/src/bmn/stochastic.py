"""Random deals, batch simulation, length statistics, and the record model.

Deals are reproducible: draw i under a policy and seed is a pure
function of (seed, i), so batches are bit-identical regardless of worker
count and any single deal can be regenerated after the fact.  Batch play
runs on the compiled kernel in :mod:`bmn.fastsim`, which is
agreement-tested against the exact engine.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .cards import BmnError, GameState, format_cards
from . import fastsim

#: Euler-Mascheroni constant.
EULER_GAMMA = float(np.euler_gamma)

#: Games per kernel dispatch; fixed so chunking never affects results.
CHUNK = 1 << 16


class InsufficientTailMassError(BmnError):
    """Too little histogram mass beyond the tail start for a stable fit."""


class Policy(enum.Enum):
    """Deal distribution: fully uniform, or conditioned on both players
    receiving two of each face kind."""

    UNIFORM = "uniform"
    FACE_BALANCED = "face-balanced"

    @property
    def code(self) -> int:
        return fastsim.POLICY_UNIFORM if self is Policy.UNIFORM else fastsim.POLICY_FACE_BALANCED


@dataclass(frozen=True)
class DealPolicy:
    """A deal distribution plus the 64-bit seed that fixes the stream."""

    kind: Policy = Policy.UNIFORM
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Policy(self.kind))
        object.__setattr__(self, "seed", int(self.seed) & ((1 << 64) - 1))


def random_deal(policy: DealPolicy, index: int = 0) -> GameState:
    """Draw ``index`` of the policy's stream: a 26/26 standard deal, leader 1."""
    values = fastsim.deal_values(policy.seed, index, policy.kind.code)
    return GameState(format_cards(values[:26]), format_cards(values[26:]))


@dataclass(frozen=True)
class LengthSummary:
    """Histogram and tail statistics of game lengths over a batch.

    Records are ranked by cards played (ties broken by tricks, then by
    the earlier draw), matching how the historical longest-game table is
    ordered; ``max_tricks``/``max_cards`` are the record deal's replayed
    pair.  Games cut off at the trick budget are excluded from the
    histograms and counted in ``cutoffs``; any non-terminating deals
    found are listed in ``loops`` (and are news).
    """

    games: int
    trick_histogram: dict[int, int]
    card_histogram: dict[int, int]
    max_tricks: int = 0
    max_cards: int = 0
    record_deal: Optional[GameState] = None
    record_index: Optional[int] = None
    cutoffs: int = 0
    loops: tuple[int, ...] = ()  # draw indices of non-terminating deals
    policy: Optional[DealPolicy] = None

    def merge(self, other: "LengthSummary") -> "LengthSummary":
        """Combine two summaries; associative and commutative."""
        trick_hist = dict(self.trick_histogram)
        for k, v in other.trick_histogram.items():
            trick_hist[k] = trick_hist.get(k, 0) + v
        card_hist = dict(self.card_histogram)
        for k, v in other.card_histogram.items():
            card_hist[k] = card_hist.get(k, 0) + v
        mine = (self.max_cards, self.max_tricks,
                -(self.record_index if self.record_index is not None else 0))
        theirs = (other.max_cards, other.max_tricks,
                  -(other.record_index if other.record_index is not None else 0))
        best = self if (self.record_deal is not None and
                        (other.record_deal is None or mine >= theirs)) else other
        return LengthSummary(
            games=self.games + other.games,
            trick_histogram=trick_hist,
            card_histogram=card_hist,
            max_tricks=best.max_tricks,
            max_cards=best.max_cards,
            record_deal=best.record_deal,
            record_index=best.record_index,
            cutoffs=self.cutoffs + other.cutoffs,
            loops=tuple(sorted(self.loops + other.loops)),
            policy=self.policy or other.policy,
        )

    def survival(self, tricks: int) -> int:
        """Number of games strictly longer than ``tricks``."""
        return sum(v for k, v in self.trick_histogram.items() if k > tricks)

    def to_json(self) -> dict:
        return {
            "games": self.games,
            "cutoffs": self.cutoffs,
            "loops": list(self.loops),
            "maxTricks": self.max_tricks,
            "maxCards": self.max_cards,
            "recordDeal": self.record_deal.to_json() if self.record_deal else None,
            "recordIndex": self.record_index,
            "policy": {"kind": self.policy.kind.value, "seed": self.policy.seed}
            if self.policy else None,
        }


def _summarize_chunk(policy: DealPolicy, start: int, outcomes, tricks, cards) -> LengthSummary:
    ended = outcomes == fastsim.OUTCOME_TERMINATED
    t_end = tricks[ended]
    c_end = cards[ended]
    trick_hist = {int(k): int(v) for k, v in zip(*np.unique(t_end, return_counts=True))}
    card_hist = {int(k): int(v) for k, v in zip(*np.unique(c_end, return_counts=True))}
    loop_idx = np.flatnonzero(outcomes == fastsim.OUTCOME_LOOP)
    record_deal = record_index = None
    max_tricks = max_cards = 0
    if c_end.size:
        local = np.flatnonzero(ended)
        order = np.lexsort((local, -t_end, -c_end))
        best = local[order[0]]
        record_index = start + int(best)
        record_deal = random_deal(policy, record_index)
        max_tricks = int(tricks[best])
        max_cards = int(cards[best])
    return LengthSummary(
        games=len(outcomes),
        trick_histogram=trick_hist,
        card_histogram=card_hist,
        max_tricks=max_tricks,
        max_cards=max_cards,
        record_deal=record_deal,
        record_index=record_index,
        cutoffs=int(np.count_nonzero(outcomes == fastsim.OUTCOME_CUTOFF)),
        loops=tuple(start + int(i) for i in loop_idx),
        policy=policy,
    )


def default_workers() -> int:
    env = os.environ.get("BMN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_batch(
    policy: DealPolicy,
    games: int,
    max_tricks: int = 100_000,
    workers: Optional[int] = None,
    start_index: int = 0,
) -> LengthSummary:
    """Play ``games`` independent deals and merge their length statistics.

    Output is a pure function of (policy, games, max_tricks,
    start_index); ``workers`` only sets the kernel's thread count.
    """
    if games < 1:
        raise ValueError("games must be >= 1")
    if workers is None:
        workers = default_workers()
    summary: Optional[LengthSummary] = None
    done = 0
    while done < games:
        n = min(CHUNK, games - done)
        outcomes, tricks, cards = fastsim.run_range(
            policy.seed, start_index + done, n, policy.kind.code, max_tricks, workers)
        chunk = _summarize_chunk(policy, start_index + done, outcomes, tricks, cards)
        summary = chunk if summary is None else summary.merge(chunk)
        done += n
    return summary


class TailFit(NamedTuple):
    """Maximum-likelihood exponential fit of the length tail."""

    rate: float
    half_life: float
    stderr: float
    n_tail: int


def fit_exponential_tail(summary: LengthSummary, tail_start: int = 100) -> TailFit:
    """Exponential MLE on trick lengths strictly beyond ``tail_start``.

    Requires at least 1000 games of tail mass.  Raises
    :class:`InsufficientTailMassError` otherwise, or when the tail is
    degenerate (all lengths equal, infinite rate).
    """
    n = 0
    excess = 0
    for length, count in summary.trick_histogram.items():
        if length > tail_start:
            n += count
            excess += (length - tail_start) * count
    if n < 1000:
        raise InsufficientTailMassError(
            f"only {n} games beyond {tail_start} tricks; need at least 1000")
    mean_excess = excess / n
    if mean_excess <= 0:
        raise InsufficientTailMassError("degenerate tail: zero mean excess, infinite rate")
    rate = 1.0 / mean_excess
    return TailFit(rate=rate, half_life=math.log(2) / rate,
                   stderr=rate / math.sqrt(n), n_tail=n)


def conditional_survival(summary: LengthSummary, tricks: int, extra: int = 20) -> float:
    """P(game exceeds tricks+extra | game exceeds tricks), from the histogram."""
    base = summary.survival(tricks)
    if base == 0:
        raise InsufficientTailMassError(f"no games beyond {tricks} tricks")
    return summary.survival(tricks + extra) / base


@dataclass(frozen=True)
class RecordModel:
    """Record growth under exponentially distributed lengths and
    exponentially growing search volume n = a * exp(k * t)."""

    mu: float
    a: float = 1.0
    k: float = 0.0
    gamma: float = EULER_GAMMA

    def __post_init__(self) -> None:
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.a < 1:
            raise ValueError("a must be >= 1")
        if self.k < 0:
            raise ValueError("k must be >= 0")


#: Direct-summation limit for harmonic numbers.
_HARMONIC_EXACT_LIMIT = 1_000_000


def harmonic(n: int) -> float:
    """H_n, exact (compensated) summation up to 10**6, asymptotic beyond."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n <= _HARMONIC_EXACT_LIMIT:
        return math.fsum(1.0 / k for k in range(1, n + 1))
    return EULER_GAMMA + math.log(n) + 1.0 / (2 * n)


def expected_record(model: RecordModel, n: int) -> float:
    """Expected longest game after n independent draws: mu * H_n."""
    return model.mu * harmonic(n)


def expected_record_over_time(model: RecordModel, t: float) -> float:
    """Expected record at time t: mu * (gamma + ln a + k t)."""
    return model.mu * (model.gamma + math.log(model.a) + model.k * t)


def histogram_csv_rows(summary: LengthSummary):
    """Rows (length, trickCount, cardCount) over the union of histogram keys."""
    keys = sorted(set(summary.trick_histogram) | set(summary.card_histogram))
    for k in keys:
        yield k, summary.trick_histogram.get(k, 0), summary.card_histogram.get(k, 0)
