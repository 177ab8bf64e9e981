"""Crowd-sourced motion annotation platform with perplexity-driven selection."""

__version__ = "0.1.0"
