"""Offline corpus analysis: rankings, keyword heatmaps, and timelines.

Everything here is deterministic given its inputs and emits plain data
(lists, numpy arrays) suitable for CSV/JSON dumps; plotting is out of
scope.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from . import corpus_lm
from .corpus_lm import CorpusAccumulator, SentenceTokens


@dataclass(frozen=True)
class AnnotationEvent:
    """One annotation submission in a replayable log."""

    seq: int
    timestamp: float
    entry_id: int | str
    text: str
    strategy: str


@dataclass(frozen=True)
class RankedAnnotation:
    perplexity: float
    text: str  # normalized form: lowercase, punctuation-free


def rank_annotations(
    model,
    annotations: Iterable[str],
    n: int = 10,
    direction: str = "lowest",
) -> list[RankedAnnotation]:
    """Top-n annotations by perplexity under ``model``.

    Texts are normalized before scoring; repeated sentences are listed
    once (first occurrence wins). ``direction`` is "lowest" or
    "highest".
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if direction not in ("lowest", "highest"):
        raise ValueError(f"direction must be 'lowest' or 'highest', got {direction!r}")
    seen: set[SentenceTokens] = set()
    scored: list[RankedAnnotation] = []
    for text in annotations:
        tokens = corpus_lm.normalize(text)
        if tokens in seen:
            continue
        seen.add(tokens)
        scored.append(
            RankedAnnotation(
                perplexity=corpus_lm.perplexity(model, tokens),
                text=" ".join(tokens),
            )
        )
    scored.sort(key=lambda r: (r.perplexity, r.text), reverse=direction == "highest")
    return scored[:n]


@dataclass(frozen=True)
class HeatmapSpec:
    keywords: tuple[str, ...]
    bucket_edges: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.bucket_edges) < 2:
            raise ValueError("need at least two bucket edges")
        for lo, hi in zip(self.bucket_edges, self.bucket_edges[1:]):
            if hi <= lo:
                raise ValueError("bucket edges must be strictly increasing")
        if not self.keywords:
            raise ValueError("need at least one keyword")

    @classmethod
    def log_spaced(
        cls, keywords: Sequence[str], low: float, high: float, buckets: int = 8
    ) -> "HeatmapSpec":
        if low <= 0 or high <= low:
            raise ValueError("need 0 < low < high for log-spaced edges")
        edges = np.geomspace(low, high, buckets + 1)
        return cls(keywords=tuple(keywords), bucket_edges=tuple(float(e) for e in edges))

    @property
    def bucket_count(self) -> int:
        return len(self.bucket_edges) - 1


@dataclass(frozen=True)
class Heatmap:
    spec: HeatmapSpec
    matrix: np.ndarray  # keywords x buckets, rows normalized
    occurrences: tuple[int, ...]  # annotations containing each keyword
    missing_keywords: tuple[str, ...]  # keywords with zero occurrences

    def mean_bucket_index(self, keyword: str) -> float:
        """Occurrence-weighted mean bucket position of one keyword row."""
        row = self.matrix[self.spec.keywords.index(keyword)]
        if row.sum() == 0:
            raise ValueError(f"keyword {keyword!r} never occurs")
        return float(np.dot(row, np.arange(len(row))))


def keyword_heatmap(
    scored_annotations: Iterable[tuple[float, str]], spec: HeatmapSpec
) -> Heatmap:
    """Distribution of each keyword's annotations over perplexity buckets.

    Each cell holds the fraction of the keyword's annotations whose
    perplexity falls in that bucket, so nonzero rows sum to one.
    Perplexities outside the edge range land in the outermost buckets.
    """
    edges = np.asarray(spec.bucket_edges)
    matrix = np.zeros((len(spec.keywords), spec.bucket_count))
    occurrences = [0] * len(spec.keywords)
    keyword_index = {k: i for i, k in enumerate(spec.keywords)}
    for ppl, text in scored_annotations:
        tokens = set(corpus_lm.normalize(text))
        bucket = int(np.searchsorted(edges, ppl, side="right")) - 1
        bucket = min(max(bucket, 0), spec.bucket_count - 1)
        for keyword, i in keyword_index.items():
            if keyword in tokens:
                matrix[i, bucket] += 1
                occurrences[i] += 1
    missing = []
    for i, keyword in enumerate(spec.keywords):
        if occurrences[i]:
            matrix[i] /= occurrences[i]
        else:
            missing.append(keyword)
    return Heatmap(
        spec=spec,
        matrix=matrix,
        occurrences=tuple(occurrences),
        missing_keywords=tuple(missing),
    )


@dataclass(frozen=True)
class TimelinePoint:
    event_count: int
    mean_mppl: float
    std_mppl: float  # population standard deviation


def perplexity_timeline(
    events: Sequence[AnnotationEvent],
    cadence: int,
    *,
    order: int = corpus_lm.DEFAULT_ORDER,
    lam: float = corpus_lm.DEFAULT_LAMBDA,
) -> list[TimelinePoint]:
    """Replay an event log, retraining at every ``cadence`` events.

    At each boundary the model is retrained on everything seen so far
    and the mean motion perplexity is recomputed over all annotated
    motions; the emitted series is the mean and population standard
    deviation of those per-motion means.
    """
    if cadence < 1:
        raise ValueError("cadence must be at least 1")
    accumulator = CorpusAccumulator(order=order, lam=lam)
    tokens_by_motion: dict[int | str, list[SentenceTokens]] = {}
    points: list[TimelinePoint] = []
    for position, event in enumerate(events, start=1):
        try:
            tokens = corpus_lm.normalize(event.text)
        except corpus_lm.EmptyAnnotationError:
            raise ValueError(f"event {event.seq} has an empty annotation") from None
        accumulator.add(tokens)
        tokens_by_motion.setdefault(event.entry_id, []).append(tokens)
        if position % cadence == 0:
            mppls = motion_perplexities(accumulator.model(), tokens_by_motion)
            values = list(mppls.values())
            points.append(
                TimelinePoint(
                    event_count=position,
                    mean_mppl=float(np.mean(values)),
                    std_mppl=float(np.std(values)),
                )
            )
    return points


def motion_perplexities(
    model, tokens_by_motion: Mapping[int | str, Sequence[SentenceTokens]]
) -> dict[int | str, float]:
    """Mean annotation perplexity per motion, caching repeated sentences."""
    cache: dict[SentenceTokens, float] = {}
    mppls: dict[int | str, float] = {}
    for motion_id, sentences in tokens_by_motion.items():
        total = 0.0
        for sentence in sentences:
            value = cache.get(sentence)
            if value is None:
                value = corpus_lm.perplexity(model, sentence)
                cache[sentence] = value
            total += value
        mppls[motion_id] = total / len(sentences)
    return mppls


def smoothed(series: Sequence[float], window: int) -> list[float]:
    """Trailing moving average; the first window-1 points use what exists."""
    if window < 1:
        raise ValueError("window must be at least 1")
    out = []
    for i in range(len(series)):
        lo = max(0, i - window + 1)
        chunk = series[lo : i + 1]
        out.append(math.fsum(chunk) / len(chunk))
    return out


def trend_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope; 0 for degenerate inputs."""
    if len(xs) != len(ys) or len(xs) < 2:
        return 0.0
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    denom = float(((x - x.mean()) ** 2).sum())
    if denom == 0:
        return 0.0
    return float(((x - x.mean()) * (y - y.mean())).sum() / denom)


def window_trend_ratio(
    timeline: Sequence[TimelinePoint], start_event: int, end_event: int
) -> float:
    """Second-half mean over first-half mean of std within an event window.

    The per-point standard deviation of motion means is heavy-tailed
    and noisy, so trend checks compare half-window averages instead of
    endpoints: a ratio near or above 1 reads as growing-or-flat, a
    clearly smaller one as declining.
    """
    window = [p.std_mppl for p in timeline if start_event <= p.event_count <= end_event]
    if len(window) < 2:
        raise ValueError(
            f"need at least two timeline points in [{start_event}, {end_event}]"
        )
    half = len(window) // 2
    head = window[: len(window) - half]
    tail = window[len(window) - half :]
    head_mean = math.fsum(head) / len(head)
    tail_mean = math.fsum(tail) / len(tail)
    if head_mean == 0:
        return 1.0 if tail_mean == 0 else float("inf")
    return tail_mean / head_mean
