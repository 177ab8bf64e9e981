import pytest
from hypothesis import given
from hypothesis import strategies as st

from annotool.engage import (
    DEFAULT_LADDER,
    AnnotatorProfile,
    LevelStep,
    leaderboard,
    level_for,
    validate_ladder,
)


def test_new_annotator_is_novice():
    standing = level_for(0)
    assert standing.title == "Novice"
    assert standing.index == 0
    assert standing.progress == 0.0


def test_ten_annotations_reach_research_assistant():
    assert level_for(10).title == "Research Assistant"


def test_progress_halfway_between_levels():
    standing = level_for(20)
    assert standing.title == "Research Assistant"
    assert standing.progress == pytest.approx(0.5)


def test_top_level_progress_saturates():
    standing = level_for(10_000)
    assert standing.title == DEFAULT_LADDER[-1].title
    assert standing.progress == 1.0


def test_negative_count_rejected():
    with pytest.raises(ValueError):
        level_for(-1)


@given(st.integers(min_value=0, max_value=500))
def test_progress_fraction_in_unit_interval(count):
    standing = level_for(count)
    assert 0.0 <= standing.progress <= 1.0


@given(st.integers(min_value=0, max_value=499))
def test_level_monotone_in_count(count):
    assert level_for(count + 1).index >= level_for(count).index


def test_custom_ladder_validation():
    with pytest.raises(ValueError):
        validate_ladder((LevelStep(5, "Starter"),))
    with pytest.raises(ValueError):
        validate_ladder((LevelStep(0, "Starter"), LevelStep(0, "Also Starter")))
    validate_ladder((LevelStep(0, "Starter"), LevelStep(3, "Finisher")))


def test_leaderboard_orders_by_count_then_first_annotation():
    profiles = [
        AnnotatorProfile("A", "Alice", 5, first_annotation_at=10.0),
        AnnotatorProfile("B", "Bo", 12, first_annotation_at=50.0),
        AnnotatorProfile("C", "Chris", 5, first_annotation_at=20.0),
    ]
    assert [p.annotator_id for p in leaderboard(profiles)] == ["B", "A", "C"]


def test_leaderboard_tie_falls_back_to_id():
    profiles = [
        AnnotatorProfile("z", "Zoe", 3, first_annotation_at=1.0),
        AnnotatorProfile("a", "Ana", 3, first_annotation_at=1.0),
    ]
    assert [p.annotator_id for p in leaderboard(profiles)] == ["a", "z"]


def test_leaderboard_empty():
    assert leaderboard([]) == []


def test_leaderboard_is_permutation():
    profiles = [
        AnnotatorProfile(str(i), f"u{i}", count, first_annotation_at=float(i))
        for i, count in enumerate([4, 4, 9, 0, 2])
    ]
    ranked = leaderboard(profiles)
    assert sorted(p.annotator_id for p in ranked) == sorted(p.annotator_id for p in profiles)
