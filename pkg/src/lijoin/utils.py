from __future__ import annotations

import itertools
import os
from typing import Iterator, Sequence

import progressbar

__all__ = [
    "Word",
    "InvalidInputError",
    "CriterionError",
    "ConsistencyError",
    "CapExceededError",
    "as_word",
    "parse_word",
    "format_word",
    "iter_words",
    "env_int",
    "progress_bar",
]

Word = tuple[str, ...]


class InvalidInputError(ValueError):
    """Raised for malformed user input: tables, automata, words, identities."""


class CriterionError(InvalidInputError):
    """Raised when a join decision is requested for a variety that is not
    known to satisfy criterion (A)."""


class CapExceededError(InvalidInputError):
    """Raised when a construction would exceed a configured size cap."""

    def __init__(self, message: str, cap: int) -> None:
        super().__init__(message)
        self.cap = cap


class ConsistencyError(RuntimeError):
    """Raised when a property that the theory guarantees does not hold.

    This always signals a bug in the toolkit, never bad input.
    """


def as_word(w: Sequence[str], alphabet: Sequence[str] | None = None) -> Word:
    """Converts a sequence of symbols to a word tuple.

    A plain string is read as a sequence of one-character symbols, so
    ``as_word("ab") == ("a", "b")``. When `alphabet` is given, every symbol
    is checked against it.
    """
    word = tuple(w)
    if alphabet is not None:
        known = set(alphabet)
        for position, symbol in enumerate(word):
            if symbol not in known:
                raise InvalidInputError(
                    f"Unknown symbol {symbol!r} at position {position}"
                    f" (alphabet is {list(alphabet)})"
                )
    return word


def parse_word(text: str, alphabet: Sequence[str]) -> Word:
    """Parses a word given on the command line.

    Commas or whitespace separate symbols when present; otherwise, if every
    symbol of the alphabet is a single character, the text is split into
    characters. The strings ``""``, ``"eps"`` and ``"ε"`` denote the empty word.
    """
    text = text.strip()
    if text in ("", "eps", "ε"):
        return ()
    if any(sep in text for sep in ", "):
        parts = [p for p in text.replace(",", " ").split() if p]
        return as_word(parts, alphabet)
    if all(len(symbol) == 1 for symbol in alphabet):
        return as_word(text, alphabet)
    return as_word([text], alphabet)


def format_word(w: Sequence[str], alphabet: Sequence[str] | None = None) -> str:
    """Renders a word, letters joined without spaces when every symbol of
    `alphabet` (or of `w`, when no alphabet is given) is one character long.
    Words over one alphabet therefore render distinctly."""
    if not w:
        return "ε"
    symbols = w if alphabet is None else alphabet
    if all(len(symbol) == 1 for symbol in symbols):
        return "".join(w)
    return " ".join(w)


def iter_words(
    alphabet: Sequence[str], max_length: int, min_length: int = 0
) -> Iterator[Word]:
    """Yields all words with length in ``[min_length, max_length]`` in
    length-lexicographic order (shorter first, then by alphabet order)."""
    for n in range(min_length, max_length + 1):
        yield from itertools.product(alphabet, repeat=n)


def env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise InvalidInputError(
            f"Environment variable {name} must be an integer, got {raw!r}"
        ) from e


def progress_bar(max_value: int, label: str) -> progressbar.ProgressBar:
    return progressbar.ProgressBar(
        max_value=max_value,
        widgets=[
            f"{label} ",
            progressbar.Percentage(),  # type: ignore[no-untyped-call]
            " ",
            progressbar.Bar(),  # type: ignore[no-untyped-call]
            " [",
            progressbar.AdaptiveETA(),  # type: ignore[no-untyped-call]
            "]",
        ],
    )
