"""Annotation text normalization and count-based n-gram language modeling.

Sentences are scored by an interpolated n-gram model: at each level the
maximum-likelihood estimate is mixed with the next-shorter context
(Jelinek-Mercer), bottoming out in an add-one unigram distribution over
the closed alphabet. Every sentence over the alphabet therefore gets a
strictly positive probability and a finite perplexity, including
sentences containing words never seen in training (mapped to UNK).
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

DEFAULT_ORDER = 4
DEFAULT_LAMBDA = 0.8

SentenceTokens = tuple[str, ...]


class EmptyAnnotationError(ValueError):
    """Text contains no usable tokens after normalization."""


_APOSTROPHES = "'’‘`´"
_NON_WORD = re.compile(r"[^a-z0-9]+")


def normalize(text: str) -> SentenceTokens:
    """Lowercase ``text``, strip punctuation, and split into word tokens.

    Apostrophes are deleted so contractions stay a single token
    ("doesn't" -> "doesnt"); every other non-alphanumeric character acts
    as a separator. Digit tokens ("4", "180") are kept as words.
    """
    lowered = text.lower()
    for ch in _APOSTROPHES:
        if ch in lowered:
            lowered = lowered.replace(ch, "")
    tokens = _NON_WORD.sub(" ", lowered).split()
    if not tokens:
        raise EmptyAnnotationError(f"no tokens left after normalizing {text!r}")
    return tuple(tokens)


@dataclass
class NGramCounts:
    """Occurrence counts of all k-grams (k <= order) over padded sentences.

    Each sentence is padded with order-1 BOS tokens and closed with one
    EOS. ``grams`` counts windows ending at a scored position (a real
    token or the EOS); ``contexts`` counts the windows preceding a
    scored position, so ``contexts[ctx]`` is the number of prediction
    events whose history ends in ``ctx``. ``contexts[()]`` is the total
    number of scored positions.
    """

    order: int
    grams: Counter = field(default_factory=Counter)
    contexts: Counter = field(default_factory=Counter)
    sentences: int = 0

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")

    def add_sentence(self, tokens: Sequence[str]) -> None:
        if not tokens:
            raise ValueError("cannot count an empty sentence")
        padded = (BOS,) * (self.order - 1) + tuple(tokens) + (EOS,)
        grams = self.grams
        contexts = self.contexts
        for i in range(self.order - 1, len(padded)):
            for k in range(1, self.order + 1):
                gram = padded[i - k + 1 : i + 1]
                grams[gram] += 1
                contexts[gram[:-1]] += 1
        self.sentences += 1

    @property
    def total_events(self) -> int:
        """Scored positions counted so far (tokens plus one EOS per sentence)."""
        return self.contexts.get((), 0)


@dataclass(frozen=True)
class LanguageModel:
    """Immutable interpolated n-gram model over a closed vocabulary.

    ``vocabulary`` holds every token observed in training plus UNK. The
    prediction alphabet additionally contains EOS, so for any context
    the conditional probabilities over the alphabet sum to one and
    sentence probabilities sum to one over all finite sentences.
    """

    counts: NGramCounts
    vocabulary: frozenset[str]
    lam: float = DEFAULT_LAMBDA

    def __post_init__(self) -> None:
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"interpolation weight must be in (0, 1), got {self.lam}")
        if UNK not in self.vocabulary:
            raise ValueError("vocabulary must contain the unknown-word class")
        if BOS in self.vocabulary or EOS in self.vocabulary:
            raise ValueError("boundary markers cannot be vocabulary words")
        object.__setattr__(self, "_alphabet_size", len(self.vocabulary) + 1)

    @property
    def order(self) -> int:
        return self.counts.order

    @property
    def alphabet(self) -> frozenset[str]:
        """Every symbol the model can predict: vocabulary plus EOS."""
        return self.vocabulary | {EOS}

    def map_token(self, token: str) -> str:
        """Map out-of-vocabulary words to UNK; boundary markers pass through."""
        if token in self.vocabulary or token == EOS or token == BOS:
            return token
        return UNK

    def conditional_probability(self, word: str, context: Sequence[str]) -> float:
        """P(word | context) for a context of exactly order-1 symbols.

        Unknown words in either position are mapped to UNK first. The
        result is always in (0, 1].
        """
        if len(context) != self.order - 1:
            raise ValueError(
                f"context must have {self.order - 1} symbols, got {len(context)}"
            )
        mapped = tuple(self.map_token(t) for t in context)
        return self._interpolated(self.order, self.map_token(word), mapped)

    def _interpolated(self, k: int, word: str, context: tuple[str, ...]) -> float:
        if k == 0:
            seen = self.counts.grams.get((word,), 0)
            return (seen + 1) / (self.counts.total_events + self._alphabet_size)
        ctx = context[len(context) - (k - 1) :] if k > 1 else ()
        denominator = self.counts.contexts.get(ctx, 0)
        if denominator == 0:
            return self._interpolated(k - 1, word, context)
        ml = self.counts.grams.get(ctx + (word,), 0) / denominator
        return self.lam * ml + (1.0 - self.lam) * self._interpolated(k - 1, word, context)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "lambda": self.lam,
            "sentences": self.counts.sentences,
            "vocabulary": sorted(self.vocabulary),
            "grams": {" ".join(g): c for g, c in sorted(self.counts.grams.items())},
            "contexts": {" ".join(g): c for g, c in sorted(self.counts.contexts.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LanguageModel":
        counts = NGramCounts(order=int(data["order"]))
        counts.grams = Counter(
            {tuple(k.split(" ")) if k else (): v for k, v in data["grams"].items()}
        )
        counts.contexts = Counter(
            {tuple(k.split(" ")) if k else (): v for k, v in data["contexts"].items()}
        )
        counts.sentences = int(data["sentences"])
        return cls(
            counts=counts,
            vocabulary=frozenset(data["vocabulary"]),
            lam=float(data["lambda"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def loads(cls, payload: str) -> "LanguageModel":
        return cls.from_dict(json.loads(payload))


def train(
    corpus: Iterable[Sequence[str]],
    order: int = DEFAULT_ORDER,
    lam: float = DEFAULT_LAMBDA,
) -> LanguageModel:
    """Train an order-n model on a corpus of normalized token sequences."""
    sentences = [tuple(s) for s in corpus]
    if not sentences:
        raise ValueError("cannot train on an empty corpus")
    counts = NGramCounts(order=order)
    vocabulary: set[str] = set()
    for sentence in sentences:
        counts.add_sentence(sentence)
        vocabulary.update(sentence)
    return LanguageModel(counts=counts, vocabulary=frozenset(vocabulary | {UNK}), lam=lam)


class CorpusAccumulator:
    """Grow-only corpus with incremental counts, for repeated retraining.

    ``model()`` returns a view over the live counters: score with it
    before adding more sentences, and drop it afterwards. Replay and
    simulation loops retrain after every batch, where rebuilding the
    counts from scratch each time would dominate the runtime.
    """

    def __init__(self, order: int = DEFAULT_ORDER, lam: float = DEFAULT_LAMBDA):
        self._counts = NGramCounts(order=order)
        self._vocabulary: set[str] = set()
        self._lam = lam

    def add(self, tokens: Sequence[str]) -> None:
        self._counts.add_sentence(tokens)
        self._vocabulary.update(tokens)

    @property
    def sentences(self) -> int:
        return self._counts.sentences

    def model(self) -> LanguageModel:
        if self._counts.sentences == 0:
            raise ValueError("cannot build a model before any sentence was added")
        return LanguageModel(
            counts=self._counts,
            vocabulary=frozenset(self._vocabulary | {UNK}),
            lam=self._lam,
        )


def sentence_probability(model, tokens: Sequence[str]) -> float:
    """Probability of the sentence followed by EOS, with BOS padding.

    ``model`` is any object exposing ``order`` and
    ``conditional_probability(word, context)``.
    """
    probability = 1.0
    for word, context in _prediction_events(model.order, tokens):
        probability *= model.conditional_probability(word, context)
    return probability


def sentence_logprob(model, tokens: Sequence[str]) -> float:
    """Natural-log probability of the sentence; robust to long inputs."""
    total = 0.0
    for word, context in _prediction_events(model.order, tokens):
        total += math.log(model.conditional_probability(word, context))
    return total


def perplexity(model, tokens: Sequence[str]) -> float:
    """Sentence probability raised to -1/length.

    The length counts only the real tokens; the EOS event contributes to
    the probability but not the exponent. Always >= 1.
    """
    if not tokens:
        raise ValueError("perplexity requires at least one token")
    return math.exp(-sentence_logprob(model, tokens) / len(tokens))


def _prediction_events(order: int, tokens: Sequence[str]):
    if not tokens:
        raise ValueError("cannot score an empty sentence")
    padded = (BOS,) * (order - 1) + tuple(tokens) + (EOS,)
    for i in range(order - 1, len(padded)):
        yield padded[i], padded[i - order + 1 : i]
