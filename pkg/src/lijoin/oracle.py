"""Brute-force oracles.

Everything here works on explicit words and tables and shares no code with
the decision procedures it is used to check, beyond automaton runs and
``eval_word``.
"""

from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from lijoin.algebra import FiniteMonoid, exponent, make_monoid
from lijoin.automata import AlphabetMismatchError, Dfa, minimize
from lijoin.identities import IdentityStatement, Mode, OmegaTerm, Var
from lijoin.stamps import Stamp, eval_word
from lijoin.utils import CapExceededError, Word, iter_words, progress_bar

__all__ = [
    "WordEnumeration",
    "MAX_ENUMERATION_SIZE",
    "approx_equal",
    "syntactic_classes_bruteforce",
    "enumerate_monoids",
    "satisfies_bruteforce",
    "eventual_image_bruteforce",
    "essential_classes_bruteforce",
    "is_prefix_suffix_determined",
    "is_locally_trivial_language",
]

logger = logging.getLogger(__name__)

MAX_ENUMERATION_SIZE = 4


@dataclass(frozen=True)
class WordEnumeration:
    """All words over `alphabet` of length at most `max_length`, in
    length-lexicographic order."""

    alphabet: tuple[str, ...]
    max_length: int
    min_length: int = 0

    def __post_init__(self) -> None:
        if self.max_length < 0 or self.min_length < 0:
            raise ValueError("Word lengths must be non-negative")

    def __iter__(self) -> Iterator[Word]:
        return iter_words(self.alphabet, self.max_length, self.min_length)

    def __len__(self) -> int:
        k = len(self.alphabet)
        return sum(k**n for n in range(self.min_length, self.max_length + 1))


def approx_equal(d1: Dfa, d2: Dfa, n: int) -> bool:
    """Whether the automata agree on every word of length at most `n`.

    Agreement is conclusive once ``n >= 2 · states₁ · states₂``; a positive
    answer below that bound is reported with a warning.
    """
    if set(d1.alphabet) != set(d2.alphabet):
        raise AlphabetMismatchError(
            f"Alphabets differ: {list(d1.alphabet)} vs {list(d2.alphabet)}"
        )
    for w in WordEnumeration(d1.alphabet, n):
        if d1.accepts(w) != d2.accepts(w):
            return False
    if n < 2 * d1.states * d2.states:
        warnings.warn(
            f"Agreement up to length {n} is below the bound"
            f" {2 * d1.states * d2.states} and is not conclusive",
            stacklevel=2,
        )
    return True


def syntactic_classes_bruteforce(
    d: Dfa, n: int, context_length: int | None = None
) -> list[list[Word]]:
    """Partitions the words of length at most `n` by their behaviour in all
    contexts ``x _ y`` with ``|x|, |y| <= context_length`` (default `n`)."""
    if context_length is None:
        context_length = n
    contexts = list(WordEnumeration(d.alphabet, context_length))
    # after_state[q] = membership of q·y for every suffix context y
    after_state = [
        tuple(d.run(q, y) in d.finals for y in contexts) for q in range(d.states)
    ]
    prefixes = [d.run(d.initial, x) for x in contexts]
    classes: dict[tuple[tuple[bool, ...], ...], list[Word]] = {}
    for u in WordEnumeration(d.alphabet, n):
        signature = tuple(after_state[d.run(p, u)] for p in prefixes)
        classes.setdefault(signature, []).append(u)
    return list(classes.values())


def _is_associative(t: list[list[int]], n: int) -> bool:
    for a in range(n):
        for b in range(n):
            ab = t[a][b]
            if ab < 0:
                continue
            for c in range(n):
                bc = t[b][c]
                if bc < 0:
                    continue
                left, right = t[ab][c], t[a][bc]
                if left >= 0 and right >= 0 and left != right:
                    return False
    return True


def _canonical(t: list[list[int]], n: int) -> tuple[int, ...]:
    """Least relabelled table over the permutations fixing the identity 0."""
    best: tuple[int, ...] | None = None
    for perm in itertools.permutations(range(1, n)):
        p = (0,) + perm
        relabelled = [0] * (n * n)
        for a in range(n):
            for b in range(n):
                relabelled[p[a] * n + p[b]] = p[t[a][b]]
        candidate = tuple(relabelled)
        if best is None or candidate < best:
            best = candidate
    assert best is not None
    return best


def _tables(n: int) -> Iterator[list[list[int]]]:
    t = [[-1] * n for _ in range(n)]
    for a in range(n):
        t[0][a] = a
        t[a][0] = a
    cells = [(a, b) for a in range(1, n) for b in range(1, n)]

    def fill(i: int) -> Iterator[list[list[int]]]:
        if i == len(cells):
            yield [row[:] for row in t]
            return
        a, b = cells[i]
        for v in range(n):
            t[a][b] = v
            if _is_associative(t, n):
                yield from fill(i + 1)
        t[a][b] = -1

    yield from fill(0)


def enumerate_monoids(
    max_size: int, progress: bool = False
) -> Iterator[FiniteMonoid]:
    """Yields every monoid of size 1 to `max_size` exactly once up to
    isomorphism, smaller sizes first. The identity is element 0.

    :raises CapExceededError: when `max_size` exceeds
        :data:`MAX_ENUMERATION_SIZE`.
    """
    if max_size > MAX_ENUMERATION_SIZE:
        raise CapExceededError(
            f"Monoid enumeration is limited to size {MAX_ENUMERATION_SIZE}",
            MAX_ENUMERATION_SIZE,
        )
    bar = progress_bar(max_size, "sizes") if progress else None
    for n in range(1, max_size + 1):
        seen: set[tuple[int, ...]] = set()
        for t in _tables(n):
            key = _canonical(t, n)
            if key not in seen:
                seen.add(key)
                yield make_monoid(t, 0)
        logger.debug("%d monoids of size %d", len(seen), n)
        if bar is not None:
            bar.update(n)
    if bar is not None:
        bar.finish()


def _term_word(t: OmegaTerm, words: Mapping[str, Word], power: int) -> Word:
    result: Word = ()
    for f in t.factors:
        if isinstance(f, Var):
            result += words[f.name]
        else:
            result += _term_word(f.inner, words, power) * power
    return result


def satisfies_bruteforce(
    s: Stamp, identity: IdentityStatement, mode: Mode = "all", max_length: int = 3
) -> bool:
    """Checks `identity` by substituting words for the variables: words of
    length 1 to `max_length` for ``mode="ne"``, 0 to `max_length` for
    ``mode="all"``. An ω-power of a word ``w`` is realized as ``w^e`` with
    ``e`` the exponent of the monoid.

    Only a violation is conclusive: a positive answer covers the words
    enumerated.
    """
    power = exponent(s.monoid)
    names = identity.variables
    words = list(WordEnumeration(s.alphabet, max_length, 1 if mode == "ne" else 0))
    # words with the same image behave the same
    representatives: dict[int, Word] = {}
    for w in words:
        representatives.setdefault(eval_word(s, w), w)
    choices = list(representatives.values())
    for chosen in itertools.product(choices, repeat=len(names)):
        assignment = dict(zip(names, chosen, strict=True))
        left = eval_word(s, _term_word(identity.lhs, assignment, power))
        right = eval_word(s, _term_word(identity.rhs, assignment, power))
        if left != right:
            return False
    return True


def eventual_image_bruteforce(s: Stamp, max_length: int) -> list[frozenset[int]]:
    """``[φ(Σ¹), ..., φ(Σ^max_length)]`` by enumerating every word."""
    return [
        frozenset(eval_word(s, w) for w in iter_words(s.alphabet, n, n))
        for n in range(1, max_length + 1)
    ]


def essential_classes_bruteforce(
    s: Stamp, n: int, min_context: int, max_context: int
) -> list[list[Word]]:
    """Partitions the words of length at most `n` by the values
    ``φ(x u y)`` over all contexts with ``min_context <= |x|, |y| <= max_context``.
    """
    contexts = list(WordEnumeration(s.alphabet, max_context, min_context))
    left = sorted({eval_word(s, x) for x in contexts})
    right = sorted({eval_word(s, y) for y in contexts})
    M = s.monoid
    classes: dict[tuple[int, ...], list[Word]] = {}
    for u in WordEnumeration(s.alphabet, n):
        m = eval_word(s, u)
        signature = tuple(M.mul(M.mul(a, m), b) for a in left for b in right)
        classes.setdefault(signature, []).append(u)
    return list(classes.values())


def is_prefix_suffix_determined(d: Dfa, k: int) -> bool:
    """Whether membership of the words of length at least ``2k`` depends only
    on their prefix and suffix of length k: for every ``p, s ∈ Σ^k``, the
    words ``p w s`` are either all in the language or all outside it."""
    for p in iter_words(d.alphabet, k, k):
        q = d.run(d.initial, p)
        for suffix in iter_words(d.alphabet, k, k):
            # states reachable from q, each followed by the suffix
            outcomes = set()
            stack, seen = [q], {q}
            while stack and len(outcomes) < 2:
                r = stack.pop()
                outcomes.add(d.run(r, suffix) in d.finals)
                for i in range(len(d.alphabet)):
                    t = int(d.delta[r, i])
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
            if len(outcomes) > 1:
                return False
    return True


def is_locally_trivial_language(d: Dfa) -> bool:
    """Whether the language of `d` is prefix-suffix determined for some k;
    ``k`` up to the number of states of the minimal automaton is tried."""
    d = minimize(d)
    return any(is_prefix_suffix_determined(d, k) for k in range(d.states + 1))
