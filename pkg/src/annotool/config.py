"""Runtime configuration for the annotation service."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .engage import DEFAULT_LADDER, LevelStep, validate_ladder
from .selection import STRATEGY_AUTO, STRATEGY_PERPLEXITY, STRATEGY_RANDOM


@dataclass(frozen=True)
class AppConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    seed: int | None = None
    selection_strategy: str = STRATEGY_AUTO  # auto | random | perplexity
    recompute_interval_secs: float = 3600.0
    lm_order: int = 4
    lm_lambda: float = 0.8
    min_words: int = 4
    max_words: int = 80
    min_dictionary_fraction: float = 0.7
    max_sentence_terminators: int = 2
    dictionary_path: str | None = None
    ladder: tuple[LevelStep, ...] = DEFAULT_LADDER
    playback_default_fps: float = 25.0
    session_ttl_secs: float = 86400.0

    def __post_init__(self) -> None:
        if self.selection_strategy not in (
            STRATEGY_AUTO,
            STRATEGY_RANDOM,
            STRATEGY_PERPLEXITY,
        ):
            raise ValueError(f"unknown selection strategy {self.selection_strategy!r}")
        if self.recompute_interval_secs <= 0:
            raise ValueError("recompute interval must be positive")
        validate_ladder(self.ladder)

    @classmethod
    def from_file(cls, path: str | Path) -> "AppConfig":
        """Load the nested JSON config file documented in the README."""
        data = json.loads(Path(path).read_text())
        server = data.get("server", {})
        selection = data.get("selection", {})
        lm = data.get("language_model", {})
        validation = data.get("validation", {})
        ladder = data.get("ladder")
        kwargs = {}
        if "host" in server:
            kwargs["host"] = server["host"]
        if "port" in server:
            kwargs["port"] = int(server["port"])
        if "playback_default_fps" in server:
            kwargs["playback_default_fps"] = float(server["playback_default_fps"])
        if "session_ttl_secs" in server:
            kwargs["session_ttl_secs"] = float(server["session_ttl_secs"])
        if "seed" in selection:
            kwargs["seed"] = selection["seed"]
        if "strategy" in selection:
            kwargs["selection_strategy"] = selection["strategy"]
        if "recompute_interval_secs" in selection:
            kwargs["recompute_interval_secs"] = float(selection["recompute_interval_secs"])
        if "order" in lm:
            kwargs["lm_order"] = int(lm["order"])
        if "lambda" in lm:
            kwargs["lm_lambda"] = float(lm["lambda"])
        if "min_words" in validation:
            kwargs["min_words"] = int(validation["min_words"])
        if "max_words" in validation:
            kwargs["max_words"] = int(validation["max_words"])
        if "min_dictionary_fraction" in validation:
            kwargs["min_dictionary_fraction"] = float(validation["min_dictionary_fraction"])
        if "max_sentence_terminators" in validation:
            kwargs["max_sentence_terminators"] = int(validation["max_sentence_terminators"])
        if "dictionary_path" in validation:
            kwargs["dictionary_path"] = validation["dictionary_path"]
        if ladder is not None:
            kwargs["ladder"] = tuple(
                LevelStep(threshold=int(s["threshold"]), title=str(s["title"]))
                for s in ladder
            )
        return cls(**kwargs)
