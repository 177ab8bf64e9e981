from dataclasses import replace

import pytest

from annotool.analysis import perplexity_timeline, window_trend_ratio
from annotool.simulate import (
    MotionCategory,
    SimulationConfig,
    reference_config,
    simulate,
)

SMALL = SimulationConfig(
    categories=(
        MotionCategory(
            name="locomotion",
            motion_count=40,
            templates=(
                "a person walks {pace} {direction}",
                "a person runs {direction} and stops",
            ),
        ),
        MotionCategory(
            name="dance",
            motion_count=10,
            templates=("a person dances a {dance} with a partner",),
        ),
    ),
    total_events=300,
    recompute_every=50,
    switch_event=150,
    error_rate=0.05,
    ambiguous_fraction=0.2,
    paraphrase_rate=0.15,
    seed=11,
)


def test_simulation_is_deterministic():
    first = simulate(SMALL)
    second = simulate(SMALL)
    assert first.events == second.events
    assert first.timeline == second.timeline


def test_event_log_structure():
    result = simulate(SMALL)
    assert [e.seq for e in result.events] == list(range(1, 301))
    assert all(e.strategy == "fewest-uniform" for e in result.events[:150])
    assert all(
        e.strategy == "perplexity-proportional" for e in result.events[150:]
    )
    assert {e.entry_id for e in result.events} <= set(result.category_by_motion)


def test_population_skew_matches_config():
    result = simulate(SMALL)
    counts = {}
    for category in result.category_by_motion.values():
        counts[category] = counts.get(category, 0) + 1
    assert counts == {"locomotion": 40, "dance": 10}
    assert reference_config().motion_count == 2000


def test_bootstrap_phase_covers_before_repeating():
    result = simulate(SMALL)
    seen = set()
    for event in result.events[:50]:
        assert event.entry_id not in seen, "fewest-pool repeated a motion too early"
        seen.add(event.entry_id)


def test_timeline_matches_independent_replay():
    result = simulate(SMALL)
    replayed = perplexity_timeline(result.events, cadence=SMALL.recompute_every)
    assert replayed == result.timeline


def test_excluded_motions_not_resampled_within_window():
    result = simulate(SMALL)
    # after the switch, a motion appears at most once per recompute window
    window = result.events[150:200]
    ids = [e.entry_id for e in window]
    assert len(ids) == len(set(ids))


def test_config_validation():
    with pytest.raises(ValueError):
        SimulationConfig(categories=(), total_events=10, recompute_every=5, switch_event=None)
    with pytest.raises(ValueError):
        replace(SMALL, error_rate=1.0)
    with pytest.raises(ValueError):
        replace(SMALL, switch_event=301)
    with pytest.raises(ValueError):
        MotionCategory(name="x", motion_count=0, templates=("t",))


def test_reference_switch_reduces_std():
    result = simulate(reference_config(seed=0))
    at_switch = result.timeline_point_at(3000).std_mppl
    assert result.timeline[-1].std_mppl <= 0.7 * at_switch


def test_random_only_trend_grows_or_plateaus():
    config = replace(reference_config(seed=0), switch_event=None)
    result = simulate(config)
    assert window_trend_ratio(result.timeline, 4000, 6000) >= 0.9


def test_zero_error_single_category_mean_is_flat():
    config = SimulationConfig(
        categories=(
            MotionCategory(
                name="locomotion",
                motion_count=50,
                templates=("a person walks {pace} {direction}",),
            ),
        ),
        total_events=900,
        recompute_every=50,
        switch_event=None,
        error_rate=0.0,
        seed=3,
    )
    result = simulate(config)
    means = [p.mean_mppl for p in result.timeline]
    burned = means[len(means) // 3 :]
    final = burned[-1]
    assert all(abs(m - final) / final <= 0.05 for m in burned)
