"""Stamps: surjective morphisms from a free monoid onto a finite monoid.

A stamp is given by the images of the letters. The syntactic stamp of a
language is computed as the transition monoid of its minimal automaton.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy

from lijoin.algebra import (
    FiniteMonoid,
    generated_submonoid,
    make_monoid,
    monoid_from_dict,
    monoid_to_dict,
)
from lijoin.automata import Dfa, crawl, minimize
from lijoin.utils import CapExceededError, InvalidInputError, Word, format_word

__all__ = [
    "Stamp",
    "EventualImage",
    "DEFAULT_MONOID_CAP",
    "make_stamp",
    "syntactic_stamp",
    "eval_word",
    "level_sets",
    "stability_index",
    "eventual_image",
    "image_semigroup",
    "language_of",
    "stamp_from_dict",
    "stamp_to_dict",
]

logger = logging.getLogger(__name__)

DEFAULT_MONOID_CAP = 2_000

# mixed-radix row codes fit in int64 up to this many states
_MAX_RADIX_STATES = 15


@dataclass(frozen=True, eq=False)
class Stamp:
    """A stamp ``φ: Σ* → M``.

    :param alphabet: the letters of Σ, in order.
    :param monoid: the target monoid, generated by the letter images.
    :param letter_image: ``φ(a)`` for every letter.
    :param accepting: when the stamp is the syntactic morphism of a language
        L, the set ``φ(L)``.
    """

    alphabet: tuple[str, ...]
    monoid: FiniteMonoid
    letter_image: dict[str, int]
    accepting: frozenset[int] | None = None

    @property
    def generators(self) -> list[int]:
        return [self.letter_image[a] for a in self.alphabet]

    def __repr__(self) -> str:
        return f"Stamp(alphabet={list(self.alphabet)}, size={self.monoid.size})"


def make_stamp(
    alphabet: Sequence[str],
    monoid: FiniteMonoid,
    letter_image: dict[str, int],
    accepting: Iterable[int] | None = None,
) -> Stamp:
    alphabet = tuple(alphabet)
    if not alphabet:
        raise InvalidInputError("Alphabet must not be empty")
    if set(letter_image) != set(alphabet):
        raise InvalidInputError(
            f"Letter images {sorted(letter_image)} do not match alphabet"
            f" {list(alphabet)}"
        )
    images = {a: int(m) for a, m in letter_image.items()}
    generated = generated_submonoid(monoid, images.values())
    if len(generated) != monoid.size:
        missing = sorted(set(monoid.elements) - generated)
        raise InvalidInputError(
            f"Letter images do not generate the monoid; elements {missing}"
            " are never reached"
        )
    acc = None
    if accepting is not None:
        acc = frozenset(int(m) for m in accepting)
        if any(not 0 <= m < monoid.size for m in acc):
            raise InvalidInputError(f"Accepting set {sorted(acc)} out of range")
    return Stamp(alphabet=alphabet, monoid=monoid, letter_image=images, accepting=acc)


class _RowIndex:
    """Maps state functions (rows) back to element indices."""

    def __init__(self, elements: numpy.ndarray) -> None:
        n = elements.shape[1]
        self.radix: numpy.ndarray | None = None
        self.by_bytes: dict[bytes, int] = {}
        if n <= _MAX_RADIX_STATES:
            self.radix = n ** numpy.arange(n, dtype=numpy.int64)
            codes = elements.astype(numpy.int64) @ self.radix
            self.order = numpy.argsort(codes)
            self.sorted_codes = codes[self.order]
        else:
            self.by_bytes = {e.tobytes(): i for i, e in enumerate(elements)}

    def lookup(self, rows: numpy.ndarray) -> numpy.ndarray:
        if self.radix is not None:
            codes = rows.astype(numpy.int64) @ self.radix
            return self.order[numpy.searchsorted(self.sorted_codes, codes)]
        return numpy.array(
            [self.by_bytes[r.tobytes()] for r in rows], dtype=numpy.intp
        )


def syntactic_stamp(d: Dfa, max_size: int = DEFAULT_MONOID_CAP) -> Stamp:
    """Computes the syntactic stamp of the language of `d`.

    The automaton is minimized and its transition monoid is built: elements
    are functions on states, the letter `a` acts as ``q ↦ delta[q, a]`` and
    ``(f·g)(q) = g(f(q))``. Elements are numbered in breadth-first order, so
    the identity is element 0; each element is named by the shortest
    (length-lexicographically least) word realizing it.

    :param max_size: cap on the monoid size.
    :raises CapExceededError: when the monoid has more than `max_size` elements.
    """
    d = minimize(d)
    n = d.states
    identity = numpy.arange(n, dtype=numpy.intp)
    elements = [identity]
    words: list[Word] = [()]
    index = {identity.tobytes(): 0}
    i = 0
    while i < len(elements):
        f = elements[i]
        for a, symbol in enumerate(d.alphabet):
            g = d.delta[f, a]
            key = g.tobytes()
            if key not in index:
                if len(elements) >= max_size:
                    raise CapExceededError(
                        f"Syntactic monoid has more than {max_size} elements",
                        max_size,
                    )
                index[key] = len(elements)
                elements.append(g)
                words.append(words[i] + (symbol,))
        i += 1

    E = numpy.array(elements, dtype=numpy.intp)
    m = len(elements)
    rows = _RowIndex(E)
    table = numpy.empty((m, m), dtype=numpy.intp)
    for i in range(m):
        # row i: (e_i · e_j)(q) = e_j(e_i(q))
        table[i] = rows.lookup(E[:, E[i]])
    names = [format_word(w, d.alphabet) for w in words]
    letters = {a: index[d.delta[:, i].tobytes()] for i, a in enumerate(d.alphabet)}
    monoid = make_monoid(table, 0, names, letters.values())
    accepting = [j for j in range(m) if int(E[j, d.initial]) in d.finals]
    logger.debug("Syntactic monoid of a %d-state automaton has size %d", n, m)
    return make_stamp(d.alphabet, monoid, letters, accepting)


def eval_word(s: Stamp, w: Sequence[str]) -> int:
    """``φ(w)``; the empty word maps to the identity."""
    result = s.monoid.identity
    for symbol in w:
        try:
            image = s.letter_image[symbol]
        except KeyError as e:
            raise InvalidInputError(
                f"Unknown symbol {symbol!r} (alphabet is {list(s.alphabet)})"
            ) from e
        result = s.monoid.mul(result, image)
    return result


@dataclass(frozen=True, eq=False)
class EventualImage:
    """The level sets ``A_n = φ(Σ^n)`` of a stamp and the set
    ``T = φ(Σ^{≥s})``.

    ``level_sets`` holds the distinct sets ``A_1, ..., A_{j-1}``; ``A_j`` is
    the first repetition, equal to ``A_i`` with ``i = preperiod`` and
    ``j - i = period``.
    """

    stamp: Stamp
    stability_index: int
    level_sets: tuple[frozenset[int], ...]
    preperiod: int
    period: int
    T: frozenset[int]

    def level(self, n: int) -> frozenset[int]:
        """``A_n`` for any ``n >= 1``."""
        if n < 1:
            raise InvalidInputError("Level sets are indexed from 1")
        return _level(self.level_sets, self.preperiod, self.period, n)


def level_sets(s: Stamp) -> tuple[tuple[frozenset[int], ...], int, int]:
    """Computes ``A_1, A_2, ...`` until the first repetition.

    :returns: tuple ``(distinct level sets, preperiod, period)``.
    """
    M = s.monoid
    first = numpy.zeros(M.size, dtype=bool)
    first[s.generators] = True
    generators = numpy.flatnonzero(first)
    cap = 2 ** min(M.size, 62)
    seen: dict[bytes, int] = {}
    sets: list[frozenset[int]] = []
    current = first
    while current.tobytes() not in seen:
        if len(sets) >= cap:
            raise CapExceededError("Level sets did not repeat within the cap", cap)
        seen[current.tobytes()] = len(sets) + 1
        sets.append(frozenset(int(m) for m in numpy.flatnonzero(current)))
        following = numpy.zeros(M.size, dtype=bool)
        following[M.table[numpy.ix_(numpy.flatnonzero(current), generators)]] = True
        current = following
    preperiod = seen[current.tobytes()]
    period = len(sets) + 1 - preperiod
    return tuple(sets), preperiod, period


def _level(
    sets: tuple[frozenset[int], ...], preperiod: int, period: int, n: int
) -> frozenset[int]:
    if n > len(sets):
        n = preperiod + (n - preperiod) % period
    return sets[n - 1]


def _stability_index(
    sets: tuple[frozenset[int], ...], preperiod: int, period: int
) -> int:
    k = 1
    while _level(sets, preperiod, period, 2 * k) != _level(sets, preperiod, period, k):
        k += 1
    return k


def stability_index(s: Stamp) -> int:
    """Least ``k >= 1`` with ``φ(Σ^{2k}) = φ(Σ^k)``."""
    return _stability_index(*level_sets(s))


def eventual_image(s: Stamp) -> EventualImage:
    """Computes the level sets and ``T = ⋃ A_n`` over ``n >= s``; by eventual
    periodicity it suffices to take one period from ``max(s, preperiod)``."""
    sets, preperiod, period = level_sets(s)
    index = _stability_index(sets, preperiod, period)
    start = max(index, preperiod)
    T = frozenset[int]().union(
        *(_level(sets, preperiod, period, n) for n in range(start, start + period))
    )
    logger.debug(
        "Stability index %d, preperiod %d, period %d, |T| = %d",
        index,
        preperiod,
        period,
        len(T),
    )
    return EventualImage(
        stamp=s,
        stability_index=index,
        level_sets=sets,
        preperiod=preperiod,
        period=period,
        T=T,
    )


def image_semigroup(s: Stamp) -> frozenset[int]:
    """``φ(Σ⁺)``, the union of all level sets."""
    sets, _, _ = level_sets(s)
    return frozenset[int]().union(*sets)


def language_of(s: Stamp, accept: Iterable[int]) -> Dfa:
    """The minimal automaton of ``φ⁻¹(accept)``."""
    accept = frozenset(int(m) for m in accept)
    if any(not 0 <= m < s.monoid.size for m in accept):
        raise InvalidInputError(f"Accepting set {sorted(accept)} out of range")
    table = s.monoid.table
    d = crawl(
        s.alphabet,
        s.monoid.identity,
        lambda m: m in accept,
        lambda m, a: int(table[m, s.letter_image[a]]),
    )
    return minimize(d)


def stamp_from_dict(data: dict[str, Any]) -> Stamp:
    """Reads the stamp JSON format
    ``{"alphabet": [...], "monoid": {...}, "letters": {...}, "accepting": [...]}``.
    """
    try:
        alphabet = [str(a) for a in data["alphabet"]]
        monoid = monoid_from_dict(data["monoid"])
        letters = {str(a): int(m) for a, m in data["letters"].items()}
    except (KeyError, TypeError, AttributeError, ValueError) as e:
        raise InvalidInputError(f"Malformed stamp JSON: {e}") from e
    return make_stamp(alphabet, monoid, letters, data.get("accepting"))


def stamp_to_dict(s: Stamp) -> dict[str, Any]:
    result: dict[str, Any] = {
        "alphabet": list(s.alphabet),
        "monoid": monoid_to_dict(s.monoid),
        "letters": dict(s.letter_image),
    }
    if s.accepting is not None:
        result["accepting"] = sorted(s.accepting)
    return result
