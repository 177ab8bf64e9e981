"""Synthetic-annotator experiment comparing selection strategies.

The simulator replays a desk-scale annotation campaign. Motions carry
fixed content: each gets a category, one fixed phrasing built from the
category's templates, and sometimes a second divergent reading, since
some recordings genuinely admit more than one valid description and
annotators then disagree persistently. Annotators mostly restate a
motion's reading, occasionally paraphrase it through another template,
and with a small error rate submit a note-form fragment, a premature
fragment, or a misspelled variant.

Selection follows a schedule: uniform draws from the least-annotated
pool, optionally switching to perplexity-proportional sampling at a
fixed event. Recomputes happen every fixed number of events rather
than on a wall clock, so a run is exactly reproducible from its seed.
"""

from __future__ import annotations

import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import corpus_lm, selection
from .analysis import AnnotationEvent, TimelinePoint, motion_perplexities
from .corpus_lm import CorpusAccumulator, SentenceTokens
from .selection import Strategy


@dataclass(frozen=True)
class MotionCategory:
    name: str
    motion_count: int
    templates: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.motion_count < 1:
            raise ValueError(f"category {self.name!r} needs at least one motion")
        if not self.templates:
            raise ValueError(f"category {self.name!r} needs at least one template")


@dataclass(frozen=True)
class SimulationConfig:
    categories: tuple[MotionCategory, ...]
    total_events: int
    recompute_every: int
    switch_event: int | None  # None: uniform sampling throughout
    error_rate: float = 0.0
    ambiguous_fraction: float = 0.0  # motions with a second divergent reading
    paraphrase_rate: float = 0.0  # chance an annotator re-templates the content
    seed: int = 0
    lm_order: int = corpus_lm.DEFAULT_ORDER
    lm_lambda: float = corpus_lm.DEFAULT_LAMBDA
    slots: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    error_templates: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.categories:
            raise ValueError("need at least one category")
        if self.total_events < 1:
            raise ValueError("need at least one event")
        if self.recompute_every < 1:
            raise ValueError("recompute cadence must be at least 1 event")
        if not 0.0 <= self.error_rate < 1.0:
            raise ValueError("error rate must be in [0, 1)")
        if not 0.0 <= self.ambiguous_fraction <= 1.0:
            raise ValueError("ambiguous fraction must be in [0, 1]")
        if not 0.0 <= self.paraphrase_rate <= 1.0:
            raise ValueError("paraphrase rate must be in [0, 1]")
        if self.switch_event is not None and not 0 <= self.switch_event <= self.total_events:
            raise ValueError("switch event must fall inside the run")

    @property
    def motion_count(self) -> int:
        return sum(c.motion_count for c in self.categories)


DEFAULT_SLOTS: dict[str, tuple[str, ...]] = {
    "pace": ("slowly", "quickly", "steadily"),
    "side": ("left", "right"),
    "direction": ("forward", "backward", "to the left", "to the right"),
    "shape": ("circle", "line", "curve"),
    "count": ("4", "5", "8"),
    "dance": ("waltz", "tango", "salsa"),
    "repeat": ("once", "twice", "several times"),
}

DEFAULT_ERROR_TEMPLATES: tuple[str, ...] = (
    "{pace_word} {gerund} motion",
    "person {gerund} the",
    "{gerund} with turn at end",
    "this motion is broken",
)

_PACE_WORDS = ("slow", "fast", "odd")


def reference_config(seed: int = 0) -> SimulationConfig:
    """Frozen desk-scale configuration for the strategy comparison.

    Five categories with a locomotion-dominated population (80% of the
    2000 motions), 6000 annotation events, 2% error injections, switch
    from uniform to perplexity-based selection at event 3000, recompute
    every 200 events. A fifth of the motions carry a second reading and
    annotators paraphrase 15% of the time; both rates were fixed from
    pilot runs of this config.
    """
    categories = (
        MotionCategory(
            name="locomotion",
            motion_count=1600,
            templates=(
                "a person walks {pace} {direction}",
                "a person runs {direction} and stops",
                "someone walks in a {shape} to the {side}",
                "a human walks {count} steps {direction}",
                "a person turns around and keeps walking",
            ),
        ),
        MotionCategory(
            name="manipulation",
            motion_count=100,
            templates=(
                "a person wipes the table with the {side} hand",
                "someone picks up a box and puts it down",
                "a person stirs a pot with a spoon",
            ),
        ),
        MotionCategory(
            name="sports",
            motion_count=100,
            templates=(
                "a person kicks a ball with the {side} foot",
                "someone throws a ball and catches it",
                "a person swings a tennis racket {repeat}",
            ),
        ),
        MotionCategory(
            name="dance",
            motion_count=100,
            templates=(
                "a person dances a {dance} with a partner",
                "someone performs a {dance} turning to the {side}",
            ),
        ),
        MotionCategory(
            name="gesticulation",
            motion_count=100,
            templates=(
                "a person waves with the {side} hand",
                "someone points at something with the {side} arm",
            ),
        ),
    )
    return SimulationConfig(
        categories=categories,
        total_events=6000,
        recompute_every=200,
        switch_event=3000,
        error_rate=0.02,
        ambiguous_fraction=0.2,
        paraphrase_rate=0.15,
        seed=seed,
    )


@dataclass
class SimulationResult:
    config: SimulationConfig
    events: list[AnnotationEvent]
    timeline: list[TimelinePoint]
    category_by_motion: dict[int, str]

    def timeline_point_at(self, event_count: int) -> TimelinePoint:
        for point in self.timeline:
            if point.event_count == event_count:
                return point
        raise KeyError(f"no timeline point at event {event_count}")


class _FewestPool:
    """Uniform draw from the motions with the fewest annotations, O(1) amortized.

    Equivalent to ``selection.bootstrap_next`` but suitable for thousands
    of motions over thousands of events; the draw order is still fully
    determined by the rng stream.
    """

    def __init__(self, motion_ids):
        ids = list(motion_ids)
        self._count_of = {m: 0 for m in ids}
        self._buckets: dict[int, list] = {0: ids}
        self._pos = {m: i for i, m in enumerate(ids)}
        self._min = 0

    def draw(self, rng: random.Random):
        while not self._buckets.get(self._min):
            self._min += 1
        bucket = self._buckets[self._min]
        return bucket[rng.randrange(len(bucket))]

    def increment(self, motion) -> None:
        count = self._count_of[motion]
        bucket = self._buckets[count]
        i = self._pos[motion]
        last = bucket[-1]
        bucket[i] = last
        self._pos[last] = i
        bucket.pop()
        if not bucket:
            del self._buckets[count]
        self._count_of[motion] = count + 1
        target = self._buckets.setdefault(count + 1, [])
        self._pos[motion] = len(target)
        target.append(motion)


@dataclass(frozen=True)
class _MotionContent:
    readings: tuple[str, ...]  # one fixed phrasing, or two divergent ones
    templates: tuple[str, ...]
    slot_values: dict[str, str]


class _Annotator:
    """Deterministic sentence source for one simulated campaign."""

    def __init__(self, config: SimulationConfig, rng: random.Random):
        self.rng = rng
        self.config = config
        self.slots = {**DEFAULT_SLOTS, **dict(config.slots)}
        self.error_templates = config.error_templates or DEFAULT_ERROR_TEMPLATES
        self.content: dict[int, _MotionContent] = {}
        self.category_by_motion: dict[int, str] = {}
        motion_id = 0
        for category in config.categories:
            for _ in range(category.motion_count):
                slot_values = {
                    name: values[rng.randrange(len(values))]
                    for name, values in self.slots.items()
                }
                readings = [self._fill(self._pick(category.templates), slot_values)]
                if rng.random() < config.ambiguous_fraction:
                    other_values = {
                        name: values[rng.randrange(len(values))]
                        for name, values in self.slots.items()
                    }
                    readings.append(
                        self._fill(self._pick(category.templates), other_values)
                    )
                self.content[motion_id] = _MotionContent(
                    readings=tuple(readings),
                    templates=category.templates,
                    slot_values=slot_values,
                )
                self.category_by_motion[motion_id] = category.name
                motion_id += 1

    def annotate(self, motion: int) -> str:
        content = self.content[motion]
        rng = self.rng
        phrase = content.readings[rng.randrange(len(content.readings))]
        if self.config.paraphrase_rate and rng.random() < self.config.paraphrase_rate:
            phrase = self._fill(self._pick(content.templates), content.slot_values)
        if self.config.error_rate and rng.random() < self.config.error_rate:
            return self._error(content, phrase)
        return phrase

    def _error(self, content: _MotionContent, phrase: str) -> str:
        rng = self.rng
        kind = rng.randrange(3)
        if kind == 0:
            template = self.error_templates[rng.randrange(len(self.error_templates))]
            return template.replace("{gerund}", _gerund_of(content.readings[0])).replace(
                "{pace_word}", _PACE_WORDS[rng.randrange(len(_PACE_WORDS))]
            )
        words = phrase.split()
        if kind == 1 and len(words) > 3:
            return " ".join(words[: rng.randrange(2, 4)]) + " the"
        positions = [i for i, w in enumerate(words) if len(w) >= 4]
        if not positions:
            return phrase
        i = positions[rng.randrange(len(positions))]
        word = words[i]
        j = rng.randrange(1, len(word) - 2)
        words[i] = word[:j] + word[j + 1] + word[j] + word[j + 2 :]
        return " ".join(words)

    def _pick(self, templates: Sequence[str]) -> str:
        return templates[self.rng.randrange(len(templates))]

    def _fill(self, template: str, slot_values: Mapping[str, str]) -> str:
        out = template
        for name, value in slot_values.items():
            token = "{" + name + "}"
            while token in out:
                out = out.replace(token, value, 1)
        return out


def simulate(config: SimulationConfig) -> SimulationResult:
    """Run the campaign; fully determined by the config (incl. seed)."""
    rng = random.Random(config.seed)
    annotator = _Annotator(config, rng)
    fewest = _FewestPool(annotator.category_by_motion)

    tokens_by_motion: dict[int, list[SentenceTokens]] = {}
    accumulator = CorpusAccumulator(order=config.lm_order, lam=config.lm_lambda)
    snapshot: selection.SelectionSnapshot | None = None
    excluded: set[int] = set()
    events: list[AnnotationEvent] = []
    timeline: list[TimelinePoint] = []

    for seq in range(1, config.total_events + 1):
        use_perplexity = config.switch_event is not None and seq > config.switch_event
        if use_perplexity and snapshot is None and accumulator.sentences:
            mppls = motion_perplexities(accumulator.model(), tokens_by_motion)
            snapshot = selection.build_distribution(mppls)
        if use_perplexity and snapshot is not None:
            pool = {
                m: p for m, p in snapshot.probabilities.items() if m not in excluded
            }
            if not pool:
                pool = dict(snapshot.probabilities)
            motion = selection.weighted_choice(pool, rng)
            strategy = Strategy.PERPLEXITY_PROPORTIONAL
        else:
            motion = fewest.draw(rng)
            strategy = Strategy.FEWEST_UNIFORM

        text = annotator.annotate(motion)
        tokens = corpus_lm.normalize(text)
        fewest.increment(motion)
        tokens_by_motion.setdefault(motion, []).append(tokens)
        accumulator.add(tokens)
        excluded.add(motion)
        events.append(
            AnnotationEvent(
                seq=seq,
                timestamp=float(seq),
                entry_id=motion,
                text=text,
                strategy=strategy.value,
            )
        )

        if seq % config.recompute_every == 0:
            model = accumulator.model()
            mppls = motion_perplexities(model, tokens_by_motion)
            values = list(mppls.values())
            timeline.append(
                TimelinePoint(
                    event_count=seq,
                    mean_mppl=float(np.mean(values)),
                    std_mppl=float(np.std(values)),
                )
            )
            snapshot = selection.build_distribution(mppls, created_at=float(seq))
            excluded.clear()

    return SimulationResult(
        config=config,
        events=events,
        timeline=timeline,
        category_by_motion=annotator.category_by_motion,
    )


def _gerund_of(sentence: str) -> str:
    """Crude -ing form of the sentence's main verb, for note-form errors."""
    for word in sentence.split():
        if word.endswith("s") and len(word) > 3 and not word.endswith("ss"):
            stem = word[:-1]
            if stem.endswith("e") and not stem.endswith("ee"):
                stem = stem[:-1]
            return stem + "ing"
    return "moving"
