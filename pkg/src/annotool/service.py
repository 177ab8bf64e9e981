"""Composition root: the annotation workflow over store + selection.

The platform owns the store, the selection engine, the validation
policy, and the ladder, and keeps their cross-module contracts in one
place: a submitted annotation is validated, persisted, counted toward
the annotator, and its motion excluded from sampling until the next
recompute; a recompute retrains the model, refreshes every cached
perplexity, and clears the exclusion set atomically.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import engage, selection, validate
from .config import AppConfig
from .engage import LevelStanding
from .selection import NoCandidateError, SelectionEngine, Strategy
from .store import AnnotationRecord, MotionStore, ProblemReport


class ValidationRejected(ValueError):
    def __init__(self, result: validate.ValidationResult):
        super().__init__(result.message or result.reason)
        self.result = result


@dataclass(frozen=True)
class SubmissionReceipt:
    record: AnnotationRecord
    entry_annotation_count: int
    annotator_count: int
    standing: LevelStanding


class AnnotationPlatform:
    def __init__(
        self,
        store: MotionStore | None = None,
        config: AppConfig | None = None,
        *,
        clock=time.time,
    ):
        self.config = config or AppConfig()
        self.store = store if store is not None else MotionStore(clock=clock)
        self.engine = SelectionEngine(
            seed=self.config.seed,
            lm_order=self.config.lm_order,
            lm_lambda=self.config.lm_lambda,
            clock=clock,
        )
        dictionary = (
            validate.load_wordlist(self.config.dictionary_path)
            if self.config.dictionary_path
            else validate.bundled_dictionary()
        )
        self.policy = validate.ValidationPolicy(
            min_words=self.config.min_words,
            max_words=self.config.max_words,
            min_dictionary_fraction=self.config.min_dictionary_fraction,
            max_sentence_terminators=self.config.max_sentence_terminators,
            dictionary=dictionary,
        )
        self.ladder = self.config.ladder
        self._releases: dict[str, bytes] = {}

    # -- selection ---------------------------------------------------------

    def current_strategy(self) -> Strategy:
        counts = self.store.annotation_counts(eligible_only=True)
        return selection.choose_strategy(counts, self.config.selection_strategy)

    def next_motion(self, skips: frozenset[int] = frozenset()) -> tuple[int, Strategy]:
        """Pick the next motion to annotate, honoring the caller's skips.

        Flagged entries are never served. If skips or the exclusion set
        empty the candidate pool, first the skip list and then the
        exclusion set are ignored, so an annotator always gets a motion
        while any eligible one exists.
        """
        counts = self.store.annotation_counts(eligible_only=True)
        if not counts:
            raise NoCandidateError("no eligible motion in the store")
        strategy = selection.choose_strategy(counts, self.config.selection_strategy)
        rng = self.engine.rng

        if strategy is Strategy.PERPLEXITY_PROPORTIONAL:
            snapshot = self.engine.snapshot
            if snapshot is not None:
                eligible = set(counts)
                ineligible = set(snapshot.probabilities) - eligible
                for blocked in (
                    snapshot.excluded | set(skips) | ineligible,
                    snapshot.excluded | ineligible,
                    ineligible,
                ):
                    pool = {
                        m: p
                        for m, p in snapshot.probabilities.items()
                        if m not in blocked
                    }
                    if pool:
                        return selection.weighted_choice(pool, rng), strategy
            # No usable snapshot yet (or it only covers flagged motions):
            # serve uniformly until the next recompute.
            strategy = Strategy.FEWEST_UNIFORM

        pool_counts = {m: c for m, c in counts.items() if m not in skips}
        if not pool_counts:
            pool_counts = counts
        return selection.bootstrap_next(pool_counts, rng), strategy

    def recompute_now(self) -> selection.RecomputeResult:
        """Manual trigger for the periodic pass; also used by the timer."""
        texts = self.store.texts_by_motion()
        result = self.engine.recompute(texts)
        cached: dict[int, float] = {}
        for motion_id, values in result.annotation_perplexities.items():
            records = self.store.annotations_for(motion_id)
            for record, value in zip(records, values):
                cached[record.annotation_id] = value
        self.store.set_annotation_perplexities(cached)
        return result

    def start_scheduler(self) -> selection.RecomputeScheduler:
        scheduler = selection.RecomputeScheduler(
            self._scheduled_recompute, self.config.recompute_interval_secs
        )
        scheduler.start()
        return scheduler

    def _scheduled_recompute(self) -> None:
        if self.store.texts_by_motion():
            self.recompute_now()

    # -- annotation workflow -------------------------------------------------

    def submit_annotation(
        self, annotator_id: str, entry_id: int, text: str, *, display_name: str | None = None
    ) -> SubmissionReceipt:
        """Validate and persist one annotation; counters update only on accept."""
        self.store.entry(entry_id)  # raises UnknownEntryError before validation
        verdict = validate.validate_annotation(text, self.policy)
        if not verdict:
            raise ValidationRejected(verdict)
        record = self.store.add_annotation(
            entry_id, annotator_id, text, display_name=display_name
        )
        self.engine.mark_annotated(entry_id)
        count = self.store.annotator_count_for(annotator_id)
        return SubmissionReceipt(
            record=record,
            entry_annotation_count=self.store.entry(entry_id).annotation_count,
            annotator_count=count,
            standing=engage.level_for(count, self.ladder),
        )

    def report_problem(self, annotator_id: str, entry_id: int, note: str) -> ProblemReport:
        return self.store.report_problem(entry_id, annotator_id, note)

    def standing_for(self, annotator_id: str) -> tuple[int, LevelStanding]:
        count = self.store.annotator_count_for(annotator_id)
        return count, engage.level_for(count, self.ladder)

    def leaderboard(self, limit: int = 100) -> list[engage.AnnotatorProfile]:
        return engage.leaderboard(self.store.annotator_profiles())[:limit]

    # -- dataset releases ------------------------------------------------------

    def publish_release(self, release_date: str) -> bytes:
        data = self.store.export_dataset(release_date)
        self._releases[release_date] = data
        return data

    def release(self, release_date: str) -> bytes | None:
        return self._releases.get(release_date)

    def release_dates(self) -> list[str]:
        return sorted(self._releases)
