"""Leveling ladder and leaderboard for annotator engagement.

Levels are cheap at first so a progress bar fills quickly for new
annotators, then thresholds spread out to keep the climb interesting.
The ladder is configuration; only the shape below is the default.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass


@dataclass(frozen=True)
class LevelStep:
    threshold: int
    title: str


DEFAULT_LADDER: tuple[LevelStep, ...] = (
    LevelStep(0, "Novice"),
    LevelStep(10, "Research Assistant"),
    LevelStep(30, "Junior Scientist"),
    LevelStep(75, "Senior Scientist"),
    LevelStep(150, "Principal Scientist"),
    LevelStep(300, "Distinguished Scientist"),
)


@dataclass(frozen=True)
class LevelStanding:
    title: str
    index: int
    progress: float  # fraction toward the next level, 1.0 at the top


@dataclass(frozen=True)
class AnnotatorProfile:
    annotator_id: str
    display_name: str
    annotation_count: int
    first_annotation_at: float | None = None


def validate_ladder(ladder: Sequence[LevelStep]) -> None:
    if not ladder:
        raise ValueError("ladder must have at least one level")
    if ladder[0].threshold != 0:
        raise ValueError("first level must start at 0 annotations")
    for earlier, later in zip(ladder, ladder[1:]):
        if later.threshold <= earlier.threshold:
            raise ValueError(
                f"thresholds must increase: {earlier.threshold} then {later.threshold}"
            )


def level_for(count: int, ladder: Sequence[LevelStep] = DEFAULT_LADDER) -> LevelStanding:
    """Current level and progress fraction toward the next one."""
    if count < 0:
        raise ValueError(f"annotation count cannot be negative, got {count}")
    validate_ladder(ladder)
    index = 0
    for i, step in enumerate(ladder):
        if count >= step.threshold:
            index = i
    if index == len(ladder) - 1:
        progress = 1.0
    else:
        span = ladder[index + 1].threshold - ladder[index].threshold
        progress = (count - ladder[index].threshold) / span
    return LevelStanding(title=ladder[index].title, index=index, progress=progress)


def leaderboard(profiles: Sequence[AnnotatorProfile]) -> list[AnnotatorProfile]:
    """Annotators by descending count; ties go to whoever annotated first,
    then to the smaller id, so the ordering is total and stable."""

    def key(profile: AnnotatorProfile):
        first = (
            profile.first_annotation_at
            if profile.first_annotation_at is not None
            else float("inf")
        )
        return (-profile.annotation_count, first, str(profile.annotator_id))

    return sorted(profiles, key=key)
