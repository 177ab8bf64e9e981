import math
import random
import threading
import time
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annotool import selection
from annotool.selection import (
    NoCandidateError,
    RecomputeScheduler,
    SelectionEngine,
    SelectionSnapshot,
    Strategy,
    bootstrap_next,
    build_distribution,
    choose_strategy,
    motion_perplexity,
    sample_next,
)

mppl_map_st = st.dictionaries(
    st.integers(min_value=0, max_value=50),
    st.floats(min_value=1.0, max_value=1e6, allow_nan=False, allow_infinity=False),
    min_size=1,
    max_size=20,
)


# -- mean perplexity -----------------------------------------------------------


def test_motion_perplexity_mean():
    assert motion_perplexity([2.0, 4.0]) == 3.0


def test_motion_perplexity_singleton():
    assert motion_perplexity([7.3]) == 7.3


def test_motion_perplexity_matches_fsum_mean():
    values = [1.25, 3.5, 2.125, 10.0, 1.0]
    assert motion_perplexity(values) == pytest.approx(math.fsum(values) / 5, rel=1e-12)


def test_motion_perplexity_rejects_empty():
    with pytest.raises(ValueError):
        motion_perplexity([])


# -- distribution --------------------------------------------------------------


def test_build_distribution_proportional():
    snapshot = build_distribution({"m1": 2.0, "m2": 2.0, "m3": 4.0})
    assert snapshot.probabilities == {"m1": 0.25, "m2": 0.25, "m3": 0.5}


def test_build_distribution_single_motion():
    assert build_distribution({"m1": 5.0}).probabilities == {"m1": 1.0}


def test_build_distribution_rejects_empty():
    with pytest.raises(ValueError):
        build_distribution({})


def test_build_distribution_rejects_nonpositive_values():
    with pytest.raises(ValueError):
        build_distribution({"m1": 0.0})
    with pytest.raises(ValueError):
        build_distribution({"m1": -2.0})


@given(mppl_map_st)
@settings(max_examples=60)
def test_distribution_normalized_and_positive(mppls):
    snapshot = build_distribution(mppls)
    assert math.fsum(snapshot.probabilities.values()) == pytest.approx(1.0, abs=1e-12)
    assert all(p > 0 for p in snapshot.probabilities.values())


@given(mppl_map_st, st.floats(min_value=1e-3, max_value=1e3))
@settings(max_examples=60)
def test_distribution_scale_invariant(mppls, c):
    base = build_distribution(mppls)
    scaled = build_distribution({m: c * v for m, v in mppls.items()})
    for motion, p in base.probabilities.items():
        assert scaled.probabilities[motion] == pytest.approx(p, abs=1e-12)


@given(mppl_map_st)
@settings(max_examples=40)
def test_exclusion_never_reduces_remaining_probability(mppls):
    snapshot = build_distribution(mppls)
    for excluded in list(snapshot.probabilities):
        rest = {m: p for m, p in snapshot.probabilities.items() if m != excluded}
        if not rest:
            continue
        total = math.fsum(rest.values())
        for m, p in rest.items():
            assert p / total >= p - 1e-15


# -- sampling ------------------------------------------------------------------


def test_sample_single_eligible_motion():
    snapshot = build_distribution({"m1": 2.0, "m2": 3.0})
    rng = random.Random(5)
    snapshot = snapshot.with_excluded("m2")
    for _ in range(20):
        assert sample_next(snapshot, rng) == "m1"


def test_sample_renormalized_frequencies():
    snapshot = SelectionSnapshot(probabilities={"m1": 0.25, "m2": 0.25, "m3": 0.5})
    snapshot = snapshot.with_excluded("m3")
    rng = random.Random(1234)
    draws = Counter(sample_next(snapshot, rng) for _ in range(10_000))
    assert draws["m3"] == 0
    assert abs(draws["m1"] / 10_000 - 0.5) <= 0.02
    assert abs(draws["m2"] / 10_000 - 0.5) <= 0.02


def test_sample_deterministic_for_seed():
    snapshot = build_distribution({"a": 1.0, "b": 2.0, "c": 3.0, "d": 1.5})
    first = [sample_next(snapshot, random.Random(99)) for _ in range(1)]
    runs = [
        [sample_next(snapshot, random.Random(99)) for _ in range(50)] for _ in range(2)
    ]
    assert runs[0] == runs[1]
    assert first[0] == runs[0][0]


def test_sample_exhausted_candidates_raise():
    snapshot = build_distribution({"m1": 1.0, "m2": 1.0})
    snapshot = snapshot.with_excluded("m1")
    with pytest.raises(NoCandidateError):
        sample_next(snapshot, random.Random(0), user_skips={"m2"})


def test_sample_honors_skips_separately_from_exclusions():
    snapshot = build_distribution({"m1": 1.0, "m2": 1.0, "m3": 1.0})
    rng = random.Random(0)
    for _ in range(30):
        assert sample_next(snapshot, rng, user_skips={"m1", "m3"}) == "m2"


# -- bootstrap ------------------------------------------------------------------


def test_bootstrap_prefers_fewest():
    rng = random.Random(77)
    draws = Counter(
        bootstrap_next({"m1": 0, "m2": 0, "m3": 1}, rng) for _ in range(10_000)
    )
    assert draws["m3"] == 0
    assert abs(draws["m1"] / 10_000 - 0.5) <= 0.02
    assert abs(draws["m2"] / 10_000 - 0.5) <= 0.02


def test_bootstrap_uniform_when_tied():
    rng = random.Random(3)
    draws = Counter(
        bootstrap_next({"m1": 3, "m2": 3, "m3": 3}, rng) for _ in range(9_000)
    )
    for m in ("m1", "m2", "m3"):
        assert abs(draws[m] / 9_000 - 1 / 3) <= 0.03


def test_bootstrap_singleton():
    assert bootstrap_next({"m1": 0}, random.Random(0)) == "m1"


# -- strategy choice -------------------------------------------------------------


def test_choose_strategy_bootstraps_until_covered():
    assert choose_strategy({"m1": 0, "m2": 3}) is Strategy.FEWEST_UNIFORM


def test_choose_strategy_switches_on_full_coverage():
    assert choose_strategy({"m1": 1, "m2": 3}) is Strategy.PERPLEXITY_PROPORTIONAL


def test_choose_strategy_pinned_random_wins():
    assert (
        choose_strategy({"m1": 5, "m2": 5}, flag="random") is Strategy.FEWEST_UNIFORM
    )


def test_choose_strategy_pinned_perplexity():
    assert (
        choose_strategy({"m1": 0}, flag="perplexity")
        is Strategy.PERPLEXITY_PROPORTIONAL
    )


def test_choose_strategy_unknown_flag():
    with pytest.raises(ValueError):
        choose_strategy({}, flag="sometimes")


# -- engine ----------------------------------------------------------------------


def test_recompute_clears_exclusions_and_is_deterministic():
    engine = SelectionEngine(seed=7, clock=lambda: 1000.0)
    texts = {
        "walk-0": ["a person walks forward and stops"] * 2,
        "rare-0": ["a person performs a slow cartwheel to the left"] * 2,
    }
    first = engine.recompute(texts)
    engine.mark_annotated("walk-0")
    assert engine.snapshot.excluded == {"walk-0"}
    second = engine.recompute(texts)
    assert second.snapshot.excluded == frozenset()
    assert second.snapshot.probabilities == first.snapshot.probabilities


def test_near_duplicates_shift_weight_toward_untouched_motion():
    engine = SelectionEngine(seed=0)
    base = {
        "walk-0": ["a person walks forward and stops"] * 2,
        "rare-0": ["a person performs a slow cartwheel to the left"] * 2,
    }
    before = engine.recompute(base).snapshot.probabilities["walk-0"]
    flooded = {
        "walk-0": base["walk-0"] + ["a person walks forward and stops"] * 6,
        "rare-0": base["rare-0"],
    }
    after = engine.recompute(flooded).snapshot.probabilities["walk-0"]
    assert after < before


def test_recompute_requires_annotations():
    engine = SelectionEngine()
    with pytest.raises(ValueError):
        engine.recompute({})
    with pytest.raises(ValueError):
        engine.recompute({"m1": []})


def test_engine_exposes_trained_model():
    engine = SelectionEngine(seed=1)
    engine.recompute({"m": ["a person walks forward and stops"]})
    assert engine.model is not None
    assert "walks" in engine.model.vocabulary


def test_mark_annotated_before_any_snapshot_is_noop():
    engine = SelectionEngine()
    engine.mark_annotated("m1")
    assert engine.snapshot is None


def test_identical_seeds_replay_identical_sequences():
    def run():
        engine = SelectionEngine(seed=42)
        engine.recompute(
            {
                "a": ["a person walks forward and stops"],
                "b": ["a person walks in a circle to the left"],
                "c": ["a person performs a slow cartwheel to the left"],
            }
        )
        return [sample_next(engine.snapshot, engine.rng) for _ in range(25)]

    assert run() == run()


def test_scheduler_fires_and_stops():
    calls = []
    scheduler = RecomputeScheduler(lambda: calls.append(time.time()), 0.02)
    scheduler.start()
    time.sleep(0.2)
    scheduler.stop()
    count = len(calls)
    assert count >= 2
    time.sleep(0.1)
    assert len(calls) == count


def test_concurrent_sampling_against_published_snapshot():
    engine = SelectionEngine(seed=5)
    engine.recompute(
        {f"m{i}": ["a person walks forward and stops"] for i in range(20)}
    )
    errors = []

    def reader():
        rng = random.Random(0)
        try:
            for _ in range(200):
                snapshot = engine.snapshot
                sample_next(snapshot, rng)
        except Exception as exc:  # pragma: no cover - failure path
            errors.append(exc)

    def writer():
        texts = {f"m{i}": ["a person walks forward and stops"] for i in range(20)}
        for _ in range(10):
            engine.recompute(texts)
            engine.mark_annotated("m3")

    threads = [threading.Thread(target=reader) for _ in range(4)]
    threads.append(threading.Thread(target=writer))
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
