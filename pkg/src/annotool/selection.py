"""Perplexity-driven choice of the next motion to annotate.

Every annotated motion carries the arithmetic mean of its annotations'
perplexities; the next motion is sampled with probability proportional
to that mean. Until each motion has one annotation (and whenever the
operator pins the random strategy), selection falls back to a uniform
draw from the pool of motions with the fewest annotations. Motions
annotated since the last recompute are temporarily excluded from
sampling; a periodic recompute retrains the language model, refreshes
every mean, and clears the exclusion set.
"""

from __future__ import annotations

import enum
import math
import random
import threading
import time
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, replace

from . import corpus_lm

MotionId = int | str


class NoCandidateError(LookupError):
    """No motion is available for sampling under the given restrictions."""


class Strategy(str, enum.Enum):
    BOOTSTRAP_RANDOM = "bootstrap-random"
    FEWEST_UNIFORM = "fewest-uniform"
    PERPLEXITY_PROPORTIONAL = "perplexity-proportional"


# Operator-facing configuration values for the strategy flag.
STRATEGY_AUTO = "auto"
STRATEGY_RANDOM = "random"
STRATEGY_PERPLEXITY = "perplexity"


@dataclass(frozen=True)
class MotionPerplexity:
    motion_id: MotionId
    mppl: float
    annotation_count: int


def motion_perplexity(values: Sequence[float]) -> float:
    """Arithmetic mean of a motion's annotation perplexities."""
    if not values:
        raise ValueError("a motion must have at least one annotation perplexity")
    return math.fsum(values) / len(values)


@dataclass(frozen=True)
class SelectionSnapshot:
    """Immutable result of one recompute pass.

    ``probabilities`` is a normalized distribution over all motions
    known at build time (iteration order is sorted by motion id, which
    keeps sampling reproducible). ``excluded`` collects the motions
    annotated since the snapshot was built.
    """

    probabilities: dict[MotionId, float]
    excluded: frozenset[MotionId] = frozenset()
    created_at: float = 0.0
    strategy: Strategy = Strategy.PERPLEXITY_PROPORTIONAL

    def with_excluded(self, motion_id: MotionId) -> "SelectionSnapshot":
        if motion_id not in self.probabilities:
            return self
        return replace(self, excluded=self.excluded | {motion_id})


def build_distribution(
    mppls: Mapping[MotionId, float],
    *,
    strategy: Strategy = Strategy.PERPLEXITY_PROPORTIONAL,
    created_at: float = 0.0,
) -> SelectionSnapshot:
    """Normalize mean perplexities into a selection distribution.

    Means are >= 1 by construction, so every probability is strictly
    positive and the weights need no flooring.
    """
    if not mppls:
        raise ValueError("cannot build a distribution over zero motions")
    for motion_id, value in mppls.items():
        if not value > 0 or not math.isfinite(value):
            raise ValueError(
                f"mean perplexity of motion {motion_id!r} is {value}; "
                "weights must be positive and finite"
            )
    ordered = sorted(mppls.items(), key=lambda item: str(item[0]))
    total = math.fsum(value for _, value in ordered)
    probabilities = {motion_id: value / total for motion_id, value in ordered}
    return SelectionSnapshot(
        probabilities=probabilities, created_at=created_at, strategy=strategy
    )


def weighted_choice(weights: Mapping[MotionId, float], rng: random.Random) -> MotionId:
    """Inverse-transform draw over (not necessarily normalized) weights."""
    if not weights:
        raise NoCandidateError("no motion to draw from")
    total = math.fsum(weights.values())
    target = rng.random() * total
    cumulative = 0.0
    last = None
    for motion_id, weight in weights.items():
        cumulative += weight
        last = motion_id
        if target < cumulative:
            return motion_id
    return last  # guard against cumulative rounding at the upper edge


def sample_next(
    snapshot: SelectionSnapshot,
    rng: random.Random,
    user_skips: Iterable[MotionId] = (),
) -> MotionId:
    """Draw one motion from the snapshot, renormalized over the candidates.

    Candidates are the snapshot's motions minus its exclusion set and
    the caller's skip list. Raises NoCandidateError when that leaves
    nothing; the caller decides which restriction to relax.
    """
    blocked = snapshot.excluded | set(user_skips)
    eligible = {
        motion_id: p
        for motion_id, p in snapshot.probabilities.items()
        if motion_id not in blocked
    }
    if not eligible:
        raise NoCandidateError("every motion is excluded or skipped")
    return weighted_choice(eligible, rng)


def bootstrap_next(
    annotation_counts: Mapping[MotionId, int], rng: random.Random
) -> MotionId:
    """Uniform draw from the motions with the fewest annotations."""
    if not annotation_counts:
        raise NoCandidateError("no motion to draw from")
    fewest = min(annotation_counts.values())
    pool = sorted(
        (m for m, c in annotation_counts.items() if c == fewest), key=str
    )
    return pool[rng.randrange(len(pool))]


def choose_strategy(
    annotation_counts: Mapping[MotionId, int], flag: str = STRATEGY_AUTO
) -> Strategy:
    """Pick the active strategy from the counts and the operator flag.

    ``auto`` keeps the uniform bootstrap until every motion has at
    least one annotation, then switches to perplexity-proportional
    sampling. ``random`` / ``perplexity`` pin one strategy regardless.
    """
    if flag == STRATEGY_RANDOM:
        return Strategy.FEWEST_UNIFORM
    if flag == STRATEGY_PERPLEXITY:
        return Strategy.PERPLEXITY_PROPORTIONAL
    if flag != STRATEGY_AUTO:
        raise ValueError(f"unknown strategy flag {flag!r}")
    if not annotation_counts or min(annotation_counts.values()) == 0:
        return Strategy.FEWEST_UNIFORM
    return Strategy.PERPLEXITY_PROPORTIONAL


@dataclass(frozen=True)
class RecomputeResult:
    snapshot: SelectionSnapshot
    motion_perplexities: dict[MotionId, MotionPerplexity]
    annotation_perplexities: dict[MotionId, tuple[float, ...]]


class SelectionEngine:
    """Owns the current snapshot and the seeded sampling stream.

    Sampling uses ``random.Random`` (Mersenne Twister), whose stream is
    documented and identical across platforms: the same seed and store
    state replay the same selection sequence. Readers sample against
    one immutable snapshot; ``recompute`` builds a replacement off to
    the side and publishes it atomically. Exclusion updates go through
    the engine lock.
    """

    def __init__(
        self,
        *,
        seed: int | None = None,
        lm_order: int = corpus_lm.DEFAULT_ORDER,
        lm_lambda: float = corpus_lm.DEFAULT_LAMBDA,
        clock=time.time,
    ):
        self.rng = random.Random(seed)
        self.lm_order = lm_order
        self.lm_lambda = lm_lambda
        self._clock = clock
        self._lock = threading.Lock()
        self._snapshot: SelectionSnapshot | None = None
        self._model: corpus_lm.LanguageModel | None = None

    @property
    def snapshot(self) -> SelectionSnapshot | None:
        return self._snapshot

    @property
    def model(self) -> corpus_lm.LanguageModel | None:
        """Language model from the most recent recompute, if any."""
        return self._model

    def mark_annotated(self, motion_id: MotionId) -> None:
        """Exclude a just-annotated motion until the next recompute."""
        with self._lock:
            if self._snapshot is not None:
                self._snapshot = self._snapshot.with_excluded(motion_id)

    def recompute(
        self, texts_by_motion: Mapping[MotionId, Sequence[str]]
    ) -> RecomputeResult:
        """Retrain on all annotations and publish a fresh snapshot.

        Every motion in the mapping must have at least one annotation;
        the published snapshot has an empty exclusion set.
        """
        if not texts_by_motion:
            raise ValueError("recompute requires at least one annotated motion")
        tokenized: dict[MotionId, list[corpus_lm.SentenceTokens]] = {}
        corpus: list[corpus_lm.SentenceTokens] = []
        for motion_id, texts in texts_by_motion.items():
            if not texts:
                raise ValueError(f"motion {motion_id!r} has no annotations")
            tokens = [corpus_lm.normalize(t) for t in texts]
            tokenized[motion_id] = tokens
            corpus.extend(tokens)
        model = corpus_lm.train(corpus, order=self.lm_order, lam=self.lm_lambda)

        ppl_cache: dict[corpus_lm.SentenceTokens, float] = {}
        annotation_ppls: dict[MotionId, tuple[float, ...]] = {}
        mppls: dict[MotionId, float] = {}
        motion_stats: dict[MotionId, MotionPerplexity] = {}
        for motion_id, sentences in tokenized.items():
            values = []
            for sentence in sentences:
                value = ppl_cache.get(sentence)
                if value is None:
                    value = corpus_lm.perplexity(model, sentence)
                    ppl_cache[sentence] = value
                values.append(value)
            annotation_ppls[motion_id] = tuple(values)
            mean = motion_perplexity(values)
            mppls[motion_id] = mean
            motion_stats[motion_id] = MotionPerplexity(
                motion_id=motion_id, mppl=mean, annotation_count=len(values)
            )

        snapshot = build_distribution(mppls, created_at=self._clock())
        with self._lock:
            self._snapshot = snapshot
            self._model = model
        return RecomputeResult(
            snapshot=snapshot,
            motion_perplexities=motion_stats,
            annotation_perplexities=annotation_ppls,
        )


class RecomputeScheduler:
    """Background timer that triggers a recompute callback at a fixed interval."""

    def __init__(self, callback, interval_secs: float):
        if interval_secs <= 0:
            raise ValueError("recompute interval must be positive")
        self._callback = callback
        self._interval = interval_secs
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        if self._thread is not None:
            return
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def _run(self) -> None:
        while not self._stop.wait(self._interval):
            try:
                self._callback()
            except Exception:  # a failed pass must not kill the timer
                pass

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
