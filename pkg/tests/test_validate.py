import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annotool.validate import (
    REASON_SPELLING,
    REASON_TOO_FEW_WORDS,
    REASON_TOO_MANY_SENTENCES,
    REASON_TOO_MANY_WORDS,
    ValidationPolicy,
    bundled_dictionary,
    load_wordlist,
    validate_annotation,
)

POLICY = ValidationPolicy()

# Twenty realistic single-sentence motion descriptions; the validator is
# deliberately conservative, so every one of these must pass.
REALISTIC_SENTENCES = [
    "A person walks forward and picks up a box.",
    "A person walks in a circle to the right.",
    "Someone walks four steps and then stops.",
    "A human runs forward quickly and slows down at the end.",
    "The subject turns around and walks back to the start.",
    "A person kicks a ball with the right foot.",
    "Somebody wipes the table with the left hand five times.",
    "A person dances a waltz with an invisible partner.",
    "A person takes a 180 degree turn and keeps walking.",
    "Someone climbs two stairs and waits at the top.",
    "A person throws a ball and catches it again.",
    "The person kneels down and stands up slowly.",
    "A person waves with both hands above the head.",
    "Someone jumps twice and lands on both feet.",
    "A person stirs a pot with a spoon in the right hand.",
    "The subject walks backward in a wide curve.",
    "A person pushes a box across the floor.",
    "Someone bows politely and steps to the side.",
    "A person balances on the left leg for a moment.",
    "A person stumbles while walking and regains balance.",
]


@pytest.mark.parametrize("sentence", REALISTIC_SENTENCES)
def test_realistic_sentences_accepted(sentence):
    verdict = validate_annotation(sentence, POLICY)
    assert verdict.accepted, f"{sentence!r} rejected: {verdict.reason} {verdict.message}"


def test_too_few_words():
    verdict = validate_annotation("walking", POLICY)
    assert not verdict.accepted
    assert verdict.reason == REASON_TOO_FEW_WORDS


def test_empty_after_normalization_counts_as_too_few():
    verdict = validate_annotation("!!!", POLICY)
    assert verdict.reason == REASON_TOO_FEW_WORDS


def test_gibberish_rejected_for_spelling():
    verdict = validate_annotation("asdf qwer zxcv tyui", POLICY)
    assert verdict.reason == REASON_SPELLING


def test_three_sentences_rejected():
    verdict = validate_annotation("A person walks. Then he stops. Then he waves.", POLICY)
    assert verdict.reason == REASON_TOO_MANY_SENTENCES


def test_too_many_words():
    text = "a person walks " + "very " * 80 + "slowly"
    assert validate_annotation(text, POLICY).reason == REASON_TOO_MANY_WORDS


def test_digits_count_as_correct_words():
    verdict = validate_annotation("a person walks 4 steps taking 180 degree turns", POLICY)
    assert verdict.accepted


def test_ellipsis_counts_as_single_terminator():
    verdict = validate_annotation("a person walks forward... then stops.", POLICY)
    assert verdict.accepted


def test_determinism():
    text = "a person walks forward and stops"
    results = {validate_annotation(text, POLICY) for _ in range(5)}
    assert len(results) == 1


@given(
    st.sampled_from(REALISTIC_SENTENCES),
    st.floats(min_value=0.05, max_value=0.7),
)
@settings(max_examples=30)
def test_lowering_dictionary_threshold_is_monotone(sentence, fraction):
    # Anything accepted at 0.7 stays accepted at any lower threshold.
    relaxed = ValidationPolicy(min_dictionary_fraction=fraction)
    assert validate_annotation(sentence, relaxed).accepted


def test_policy_invariants():
    with pytest.raises(ValueError):
        ValidationPolicy(min_words=0)
    with pytest.raises(ValueError):
        ValidationPolicy(min_dictionary_fraction=0.0)
    with pytest.raises(ValueError):
        ValidationPolicy(min_words=10, max_words=5)


def test_wordlist_loading(tmp_path):
    path = tmp_path / "words.txt"
    path.write_text("alpha\nbeta\n\ngamma\n")
    assert load_wordlist(path) == frozenset({"alpha", "beta", "gamma"})


def test_bundled_dictionary_is_lowercase():
    words = bundled_dictionary()
    assert len(words) > 1000
    assert all(w == w.lower() for w in words)
