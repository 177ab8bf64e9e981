"""Heuristic validation of submitted annotations.

Submissions are checked before they are saved so that obvious noise
(empty input, keyboard mash, multi-sentence essays) stays out of the
corpus. The heuristics look at the word count, the fraction of
dictionary words, and the sentence punctuation, and are deliberately
lenient: a borderline but plausible sentence must pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from . import corpus_lm

REASON_TOO_FEW_WORDS = "too-few-words"
REASON_TOO_MANY_WORDS = "too-many-words"
REASON_TOO_MANY_SENTENCES = "too-many-sentences"
REASON_SPELLING = "spelling-fraction"

_TERMINATORS = frozenset(".!?")


@lru_cache(maxsize=None)
def bundled_dictionary() -> frozenset[str]:
    """American-English word list shipped with the package."""
    text = resources.files("annotool").joinpath("data/american_english.txt").read_text()
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def load_wordlist(path: str | Path) -> frozenset[str]:
    """Plain-text word list: one lowercase word per line."""
    words = {line.strip() for line in Path(path).read_text().splitlines()}
    words.discard("")
    return frozenset(words)


@dataclass(frozen=True)
class ValidationPolicy:
    min_words: int = 4
    max_words: int = 80
    min_dictionary_fraction: float = 0.7
    max_sentence_terminators: int = 2
    dictionary: frozenset[str] = field(default_factory=bundled_dictionary)

    def __post_init__(self) -> None:
        if self.min_words < 1:
            raise ValueError("min_words must be at least 1")
        if self.max_words < self.min_words:
            raise ValueError("max_words must be >= min_words")
        if not 0.0 < self.min_dictionary_fraction <= 1.0:
            raise ValueError("min_dictionary_fraction must be in (0, 1]")
        if self.max_sentence_terminators < 1:
            raise ValueError("max_sentence_terminators must be at least 1")


@dataclass(frozen=True)
class ValidationResult:
    accepted: bool
    reason: str | None = None
    message: str | None = None

    def __bool__(self) -> bool:
        return self.accepted


ACCEPTED = ValidationResult(accepted=True)


def validate_annotation(text: str, policy: ValidationPolicy) -> ValidationResult:
    """Accept or reject one annotation; rejection carries a reason code."""
    try:
        tokens = corpus_lm.normalize(text)
    except corpus_lm.EmptyAnnotationError:
        tokens = ()
    if len(tokens) < policy.min_words:
        return ValidationResult(
            accepted=False,
            reason=REASON_TOO_FEW_WORDS,
            message=f"{len(tokens)} words; at least {policy.min_words} required",
        )
    if len(tokens) > policy.max_words:
        return ValidationResult(
            accepted=False,
            reason=REASON_TOO_MANY_WORDS,
            message=f"{len(tokens)} words; at most {policy.max_words} allowed",
        )
    terminators = _terminator_runs(text)
    if terminators > policy.max_sentence_terminators:
        return ValidationResult(
            accepted=False,
            reason=REASON_TOO_MANY_SENTENCES,
            message=(
                f"{terminators} sentence terminators; please describe the motion "
                f"in a single sentence (at most {policy.max_sentence_terminators})"
            ),
        )
    hits = sum(1 for t in tokens if t.isdigit() or t in policy.dictionary)
    fraction = hits / len(tokens)
    if fraction < policy.min_dictionary_fraction:
        return ValidationResult(
            accepted=False,
            reason=REASON_SPELLING,
            message=(
                f"only {hits} of {len(tokens)} words look like English "
                f"({fraction:.0%} < {policy.min_dictionary_fraction:.0%})"
            ),
        )
    return ACCEPTED


def _terminator_runs(text: str) -> int:
    """Number of maximal runs of . ! ? -- an ellipsis counts once."""
    runs = 0
    in_run = False
    for ch in text:
        if ch in _TERMINATORS:
            if not in_run:
                runs += 1
                in_run = True
        else:
            in_run = False
    return runs
