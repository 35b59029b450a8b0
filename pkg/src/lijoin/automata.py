"""Complete deterministic automata over a finite alphabet.

Every operation returns a minimized automaton in canonical form: unreachable
states removed, states numbered in breadth-first order from the initial state,
letters explored in alphabet order. Two automata over the same alphabet
recognize the same language iff their canonical forms are identical.
"""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Literal, Sequence

import numpy

from lijoin.utils import (
    CapExceededError,
    InvalidInputError,
    Word,
    as_word,
    parse_word,
)

__all__ = [
    "Dfa",
    "NeMorphism",
    "AlphabetMismatchError",
    "MonomialError",
    "Prefix",
    "Suffix",
    "Single",
    "Subword",
    "InfixLI",
    "Monomial",
    "ModCount",
    "Universal",
    "Empty",
    "FamilySpec",
    "make_dfa",
    "explore",
    "crawl",
    "minimize",
    "bool_op",
    "word_quotient",
    "concat_words",
    "ne_preimage",
    "equivalent",
    "reverse",
    "shortest_accepted",
    "build_family",
    "parse_family",
    "dfa_from_dict",
    "dfa_to_dict",
]

logger = logging.getLogger(__name__)

BoolOp = Literal[
    "union", "intersection", "difference", "symmetric_difference", "complement"
]


class AlphabetMismatchError(InvalidInputError):
    pass


class MonomialError(InvalidInputError):
    """A monomial violates the requested normal form."""


@dataclass(frozen=True, eq=False)
class Dfa:
    """A complete DFA. ``delta[q, i]`` is the successor of state `q` on the
    letter ``alphabet[i]``. Build instances with :func:`make_dfa`."""

    alphabet: tuple[str, ...]
    delta: numpy.ndarray
    initial: int
    finals: frozenset[int]
    _letter_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_letter_index", {c: i for i, c in enumerate(self.alphabet)}
        )

    @property
    def states(self) -> int:
        return int(self.delta.shape[0])

    def letter(self, symbol: str) -> int:
        try:
            return self._letter_index[symbol]
        except KeyError as e:
            raise InvalidInputError(
                f"Unknown symbol {symbol!r} (alphabet is {list(self.alphabet)})"
            ) from e

    def run(self, state: int, word: Sequence[str]) -> int:
        for symbol in word:
            state = int(self.delta[state, self.letter(symbol)])
        return state

    def accepts(self, word: Sequence[str]) -> bool:
        return self.run(self.initial, word) in self.finals

    def key(self) -> tuple[Hashable, ...]:
        return (
            self.alphabet,
            self.delta.shape,
            self.delta.tobytes(),
            self.initial,
            tuple(sorted(self.finals)),
        )

    def __repr__(self) -> str:
        return (
            f"Dfa(alphabet={list(self.alphabet)}, states={self.states},"
            f" finals={sorted(self.finals)})"
        )


def make_dfa(
    alphabet: Sequence[str],
    delta: Sequence[Sequence[int]] | numpy.ndarray,
    initial: int,
    finals: Iterable[int],
) -> Dfa:
    alphabet = tuple(alphabet)
    if not alphabet:
        raise InvalidInputError("Alphabet must not be empty")
    if len(set(alphabet)) != len(alphabet):
        raise InvalidInputError(f"Alphabet symbols must be distinct: {list(alphabet)}")
    if any(not isinstance(c, str) or c == "" for c in alphabet):
        raise InvalidInputError("Alphabet symbols must be non-empty strings")
    d = numpy.array(delta, dtype=numpy.intp)
    if d.ndim != 2 or d.shape[0] == 0 or d.shape[1] != len(alphabet):
        raise InvalidInputError(
            f"Transition array must have shape (states, {len(alphabet)}), got {d.shape}"
        )
    n = d.shape[0]
    bad = numpy.argwhere((d < 0) | (d >= n))
    if len(bad):
        q, i = (int(z) for z in bad[0])
        raise InvalidInputError(
            f"Transition from state {q} on {alphabet[i]!r}"
            f" goes to missing state {d[q, i]}"
        )
    if not 0 <= initial < n:
        raise InvalidInputError(f"Initial state {initial} is out of range")
    finals = frozenset(int(f) for f in finals)
    if any(not 0 <= f < n for f in finals):
        raise InvalidInputError(f"Final states {sorted(finals)} out of range")
    d.setflags(write=False)
    return Dfa(alphabet=alphabet, delta=d, initial=int(initial), finals=finals)


def explore(
    alphabet: Sequence[str],
    initial: Hashable,
    follow: Callable[[Any, str], Hashable],
    max_states: int | None = None,
) -> tuple[list[Any], list[list[int]]]:
    """Breadth-first exploration of the states reachable from `initial`.

    :returns: tuple ``(states, rows)``; ``rows[i][j]`` is the index of the
        successor of ``states[i]`` on ``alphabet[j]``.
    :raises CapExceededError: when more than `max_states` states are reached.
    """
    index: dict[Hashable, int] = {initial: 0}
    states = [initial]
    rows: list[list[int]] = []
    i = 0
    while i < len(states):
        row = []
        for symbol in alphabet:
            nxt = follow(states[i], symbol)
            if nxt not in index:
                if max_states is not None and len(states) >= max_states:
                    raise CapExceededError(
                        f"More than {max_states} states reached", max_states
                    )
                index[nxt] = len(states)
                states.append(nxt)
            row.append(index[nxt])
        rows.append(row)
        i += 1
    return states, rows


def crawl(
    alphabet: Sequence[str],
    initial: Hashable,
    final: Callable[[Any], bool],
    follow: Callable[[Any, str], Hashable],
) -> Dfa:
    """The (unminimized) automaton over the states reachable from `initial`,
    numbered in discovery order."""
    states, rows = explore(alphabet, initial, follow)
    return make_dfa(alphabet, rows, 0, [i for i, q in enumerate(states) if final(q)])


def _bfs_order(delta: numpy.ndarray, initial: int) -> list[int]:
    order = [initial]
    seen = {initial}
    i = 0
    while i < len(order):
        for t in delta[order[i]]:
            t = int(t)
            if t not in seen:
                seen.add(t)
                order.append(t)
        i += 1
    return order


def minimize(d: Dfa) -> Dfa:
    """Returns the canonical minimal automaton for the language of `d`.

    Unreachable states are dropped, then states are merged by Moore partition
    refinement, then renumbered breadth-first from the initial state.
    """
    order = _bfs_order(d.delta, d.initial)
    renumber = numpy.full(d.states, -1, dtype=numpy.intp)
    renumber[order] = numpy.arange(len(order))
    delta = renumber[d.delta[order]]
    is_final = numpy.array([q in d.finals for q in order], dtype=numpy.intp)

    classes = is_final
    count = len(numpy.unique(classes))
    while True:
        signature = numpy.column_stack([classes, classes[delta]])
        _, refined = numpy.unique(signature, axis=0, return_inverse=True)
        refined = refined.reshape(-1)
        refined_count = int(refined.max()) + 1
        classes = refined
        if refined_count == count:
            break
        count = refined_count

    _, representative = numpy.unique(classes, return_index=True)
    block_delta = classes[delta[representative]]
    block_finals = [b for b in range(count) if is_final[representative[b]]]

    order = _bfs_order(block_delta, int(classes[0]))
    renumber = numpy.full(count, -1, dtype=numpy.intp)
    renumber[order] = numpy.arange(count)
    canonical = numpy.empty((count, len(d.alphabet)), dtype=numpy.intp)
    canonical[renumber] = renumber[block_delta]
    return make_dfa(
        d.alphabet, canonical, 0, (int(renumber[b]) for b in block_finals)
    )


def _align(d1: Dfa, d2: Dfa) -> Dfa:
    """Returns `d2` with its columns reordered to follow `d1`'s alphabet."""
    if d1.alphabet == d2.alphabet:
        return d2
    if set(d1.alphabet) != set(d2.alphabet):
        raise AlphabetMismatchError(
            f"Alphabets differ: {list(d1.alphabet)} vs {list(d2.alphabet)}"
        )
    columns = [d2.letter(c) for c in d1.alphabet]
    return make_dfa(d1.alphabet, d2.delta[:, columns], d2.initial, d2.finals)


def _product(d1: Dfa, d2: Dfa, final: Callable[[bool, bool], bool]) -> Dfa:
    d2 = _align(d1, d2)
    n2 = d2.states
    delta = d1.delta[:, None, :] * n2 + d2.delta[None, :, :]
    delta = delta.reshape(-1, len(d1.alphabet))
    finals = [
        p * n2 + q
        for p in range(d1.states)
        for q in range(n2)
        if final(p in d1.finals, q in d2.finals)
    ]
    return make_dfa(d1.alphabet, delta, d1.initial * n2 + d2.initial, finals)


_BOOL_OPS: dict[str, Callable[[bool, bool], bool]] = {
    "union": lambda a, b: a or b,
    "intersection": lambda a, b: a and b,
    "difference": lambda a, b: a and not b,
    "symmetric_difference": lambda a, b: a != b,
}


def bool_op(op: BoolOp, d1: Dfa, d2: Dfa | None = None) -> Dfa:
    """Boolean operation on languages.

    :param op: one of 'union', 'intersection', 'difference',
        'symmetric_difference' or 'complement'.
    :param d1: first operand.
    :param d2: second operand; must be omitted for 'complement'.
    :raises AlphabetMismatchError: when the operands' alphabets differ.
    """
    if op == "complement":
        if d2 is not None:
            raise InvalidInputError("complement takes a single operand")
        flipped = frozenset(range(d1.states)) - d1.finals
        return minimize(make_dfa(d1.alphabet, d1.delta, d1.initial, flipped))
    if op not in _BOOL_OPS:
        raise InvalidInputError(
            f"Unknown operation {op!r}, expected one of"
            f" {sorted(_BOOL_OPS) + ['complement']}"
        )
    if d2 is None:
        raise InvalidInputError(f"{op} takes two operands")
    return minimize(_product(d1, d2, _BOOL_OPS[op]))


def _state_map(d: Dfa, word: Sequence[str]) -> numpy.ndarray:
    """The action of `word` on all states at once."""
    cur = numpy.arange(d.states)
    for symbol in word:
        cur = d.delta[cur, d.letter(symbol)]
    return cur


def word_quotient(d: Dfa, u: Sequence[str], v: Sequence[str]) -> Dfa:
    """Recognizes ``u⁻¹ L v⁻¹ = {w : u w v ∈ L}``."""
    initial = d.run(d.initial, u)
    after_v = _state_map(d, v)
    finals = [q for q in range(d.states) if int(after_v[q]) in d.finals]
    return minimize(make_dfa(d.alphabet, d.delta, initial, finals))


_DEAD = ("dead",)


def concat_words(x: Sequence[str], d: Dfa, y: Sequence[str]) -> Dfa:
    """Recognizes ``x L y = {x w y : w ∈ L}``.

    The automaton first checks the prefix `x`, then runs `d` on the input
    delayed by ``|y|`` letters, keeping the last ``|y|`` letters in a buffer;
    it accepts when the buffer equals `y` and `d` accepts what came before it.
    """
    x = as_word(x, d.alphabet)
    y = as_word(y, d.alphabet)

    def follow(state: Any, symbol: str) -> Hashable:
        if state == _DEAD:
            return _DEAD
        if state[0] == "x":
            i = state[1]
            if x[i] != symbol:
                return _DEAD
            if i + 1 < len(x):
                return ("x", i + 1)
            return ("w", d.initial, ())
        _, q, buffer = state
        buffer = buffer + (symbol,)
        if len(buffer) > len(y):
            q = d.run(q, buffer[:1])
            buffer = buffer[1:]
        return ("w", q, buffer)

    def final(state: Any) -> bool:
        if state == _DEAD or state[0] != "w":
            return False
        return bool(state[2] == y and state[1] in d.finals)

    initial = ("x", 0) if x else ("w", d.initial, ())
    return minimize(crawl(d.alphabet, initial, final, follow))


@dataclass(frozen=True)
class NeMorphism:
    """A non-erasing morphism ``f: source* → target*`` given by letter images."""

    source: tuple[str, ...]
    target: tuple[str, ...]
    image: dict[str, Word]

    def __post_init__(self) -> None:
        for symbol in self.source:
            if symbol not in self.image:
                raise InvalidInputError(f"No image given for {symbol!r}")
            w = as_word(self.image[symbol], self.target)
            if not w:
                raise InvalidInputError(
                    f"Image of {symbol!r} is empty (f must be non-erasing)"
                )
            self.image[symbol] = w

    def apply(self, word: Sequence[str]) -> Word:
        return tuple(c for symbol in word for c in self.image[symbol])


def ne_preimage(f: NeMorphism, d: Dfa) -> Dfa:
    """Recognizes ``f⁻¹(L)``: the transition on a source letter is the run of
    its image."""
    if set(f.target) != set(d.alphabet):
        raise AlphabetMismatchError(
            f"Morphism target {list(f.target)} differs from alphabet {list(d.alphabet)}"
        )
    delta = numpy.column_stack([_state_map(d, f.image[c]) for c in f.source])
    return minimize(make_dfa(f.source, delta, d.initial, d.finals))


def equivalent(d1: Dfa, d2: Dfa) -> bool:
    """Whether two automata over the same alphabet recognize the same language."""
    d2 = _align(d1, d2)
    return minimize(d1).key() == minimize(d2).key()


def reverse(d: Dfa) -> Dfa:
    """Recognizes the mirror image of the language of `d`."""
    predecessors = [
        [numpy.flatnonzero(d.delta[:, i] == q) for q in range(d.states)]
        for i in range(len(d.alphabet))
    ]

    def follow(state: frozenset[int], symbol: str) -> frozenset[int]:
        pre = predecessors[d.letter(symbol)]
        return frozenset(int(p) for q in state for p in pre[q])

    return minimize(
        crawl(d.alphabet, d.finals, lambda s: d.initial in s, follow)
    )


def shortest_accepted(d: Dfa) -> Word | None:
    """A shortest accepted word (length-lexicographically least), or None."""
    parent: dict[int, tuple[int, str] | None] = {d.initial: None}
    queue = deque([d.initial])
    while queue:
        q = queue.popleft()
        if q in d.finals:
            word: list[str] = []
            node = parent[q]
            while node is not None:
                q, symbol = node
                word.append(symbol)
                node = parent[q]
            return tuple(reversed(word))
        for i, symbol in enumerate(d.alphabet):
            t = int(d.delta[q, i])
            if t not in parent:
                parent[t] = (q, symbol)
                queue.append(t)
    return None


# Language families


@dataclass(frozen=True)
class Universal:
    pass


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Prefix:
    """``u Σ*``"""

    u: Word


@dataclass(frozen=True)
class Suffix:
    """``Σ* u``"""

    u: Word


@dataclass(frozen=True)
class Single:
    """``{w}``"""

    w: Word


@dataclass(frozen=True)
class Subword:
    """``Σ* u₁ Σ* u₂ ⋯ Σ* uₙ Σ*``"""

    u: Word


@dataclass(frozen=True)
class InfixLI:
    """``U Σ* V ∪ W`` for finite word sets."""

    U: tuple[Word, ...]
    V: tuple[Word, ...]
    W: tuple[Word, ...] = ()


@dataclass(frozen=True)
class Monomial:
    """``A₀* a₁ A₁* ⋯ a_k A_k*``.

    `normal` optionally enforces ``aᵢ ∉ Aᵢ₋₁`` ('R')
    or ``aᵢ ∉ Aᵢ`` ('L').
    """

    sets: tuple[frozenset[str], ...]
    letters: Word
    normal: Literal["R", "L"] | None = None

    def __post_init__(self) -> None:
        if len(self.sets) != len(self.letters) + 1:
            raise MonomialError(
                f"A monomial with {len(self.letters)} letters needs"
                f" {len(self.letters) + 1} sets, got {len(self.sets)}"
            )
        for i, a in enumerate(self.letters, start=1):
            if self.normal == "R" and a in self.sets[i - 1]:
                raise MonomialError(
                    f"Not R-normal at index {i}: letter {a!r} belongs to A_{i - 1}"
                )
            if self.normal == "L" and a in self.sets[i]:
                raise MonomialError(
                    f"Not L-normal at index {i}: letter {a!r} belongs to A_{i}"
                )


@dataclass(frozen=True)
class ModCount:
    """Words whose number of occurrences of letters from `letters` is
    congruent to one of `residues` modulo `modulus`."""

    letters: frozenset[str]
    modulus: int
    residues: frozenset[int]


FamilySpec = (
    Universal
    | Empty
    | Prefix
    | Suffix
    | Single
    | Subword
    | InfixLI
    | Monomial
    | ModCount
)


def _monomial_dfa(spec: Monomial, alphabet: tuple[str, ...]) -> Dfa:
    k = len(spec.letters)

    def follow(state: frozenset[int], symbol: str) -> frozenset[int]:
        nxt = set()
        for i in state:
            if symbol in spec.sets[i]:
                nxt.add(i)
            if i < k and spec.letters[i] == symbol:
                nxt.add(i + 1)
        return frozenset(nxt)

    return crawl(alphabet, frozenset({0}), lambda s: k in s, follow)


def _check_words(alphabet: tuple[str, ...], *words: Sequence[str]) -> None:
    for w in words:
        as_word(w, alphabet)


def build_family(spec: FamilySpec, alphabet: Sequence[str]) -> Dfa:
    """Builds the minimal automaton of a language from one of the fixed
    families: :class:`Prefix`, :class:`Suffix`, :class:`Single`,
    :class:`Subword`, :class:`InfixLI`, :class:`Monomial`, :class:`ModCount`,
    :class:`Universal` or :class:`Empty`."""
    alphabet = tuple(alphabet)
    if isinstance(spec, Universal):
        d = make_dfa(alphabet, [[0] * len(alphabet)], 0, [0])
    elif isinstance(spec, Empty):
        d = make_dfa(alphabet, [[0] * len(alphabet)], 0, [])
    elif isinstance(spec, Prefix):
        _check_words(alphabet, spec.u)
        n = len(spec.u)
        dead = n + 1
        rows = [
            [(i + 1 if spec.u[i] == c else dead) for c in alphabet] for i in range(n)
        ]
        rows += [[n] * len(alphabet), [dead] * len(alphabet)]
        d = make_dfa(alphabet, rows, 0, [n])
    elif isinstance(spec, Suffix):
        _check_words(alphabet, spec.u)
        u = tuple(spec.u)
        d = crawl(
            alphabet,
            (),
            lambda s: s == u,
            lambda s, c: (s + (c,))[-len(u) :] if u else (),
        )
    elif isinstance(spec, Single):
        _check_words(alphabet, spec.w)
        n = len(spec.w)
        dead = n + 1
        rows = [
            [(i + 1 if spec.w[i] == c else dead) for c in alphabet] for i in range(n)
        ]
        rows += [[dead] * len(alphabet), [dead] * len(alphabet)]
        d = make_dfa(alphabet, rows, 0, [n])
    elif isinstance(spec, Subword):
        _check_words(alphabet, spec.u)
        n = len(spec.u)
        rows = [
            [(i + 1 if i < n and spec.u[i] == c else i) for c in alphabet]
            for i in range(n + 1)
        ]
        d = make_dfa(alphabet, rows, 0, [n])
    elif isinstance(spec, InfixLI):
        _check_words(alphabet, *spec.U, *spec.V, *spec.W)
        d = build_family(Empty(), alphabet)
        everything = build_family(Universal(), alphabet)
        for u in spec.U:
            for v in spec.V:
                d = bool_op("union", d, concat_words(u, everything, v))
        for w in spec.W:
            d = bool_op("union", d, build_family(Single(tuple(w)), alphabet))
    elif isinstance(spec, Monomial):
        _check_words(alphabet, spec.letters, *spec.sets)
        d = _monomial_dfa(spec, alphabet)
    elif isinstance(spec, ModCount):
        _check_words(alphabet, tuple(spec.letters))
        if spec.modulus < 1:
            raise InvalidInputError("Modulus must be positive")
        p = spec.modulus
        rows = [
            [((r + 1) % p if c in spec.letters else r) for c in alphabet]
            for r in range(p)
        ]
        d = make_dfa(alphabet, rows, 0, [r % p for r in spec.residues])
    else:
        raise InvalidInputError(f"Unknown language family {spec!r}")
    return minimize(d)


_FAMILY_RE = re.compile(r"^\s*([a-z]+)\s*(?:\((.*)\))?\s*$", re.DOTALL)


def _parse_set(text: str, alphabet: tuple[str, ...]) -> frozenset[str]:
    text = text.strip()
    if text in ("", "{}", "-"):
        return frozenset()
    return frozenset(parse_word(text, alphabet))


def _parse_words(text: str, alphabet: tuple[str, ...]) -> tuple[Word, ...]:
    text = text.strip()
    if text in ("", "{}", "-"):
        return ()
    return tuple(parse_word(w, alphabet) for w in text.split(","))


def parse_family(text: str, alphabet: Sequence[str]) -> FamilySpec:
    """Parses the textual family syntax used by the command line.

    ``all``, ``empty``, ``prefix(u)``, ``suffix(u)``, ``single(w)``,
    ``subword(u)``, ``infix(U|V|W)`` with comma-separated word lists,
    ``monomial(A0;a1;A1;...)`` (also ``rmonomial``/``lmonomial`` to enforce a
    normal form; sets are written as letter strings, ``-`` for the empty set)
    and ``modcount(A;p;r1,r2,...)``.
    """
    alphabet = tuple(alphabet)
    match = _FAMILY_RE.match(text)
    if match is None:
        raise InvalidInputError(f"Cannot parse language family {text!r}")
    name, args = match.group(1), match.group(2) or ""
    if name == "all":
        return Universal()
    if name == "empty":
        return Empty()
    if name in ("prefix", "suffix", "single", "subword"):
        w = parse_word(args, alphabet)
        if name == "prefix":
            return Prefix(w)
        if name == "suffix":
            return Suffix(w)
        if name == "single":
            return Single(w)
        return Subword(w)
    if name == "infix":
        parts = args.split("|")
        if len(parts) not in (2, 3):
            raise InvalidInputError("infix expects U|V or U|V|W")
        U, V = _parse_words(parts[0], alphabet), _parse_words(parts[1], alphabet)
        W = _parse_words(parts[2], alphabet) if len(parts) == 3 else ()
        return InfixLI(U, V, W)
    if name in ("monomial", "rmonomial", "lmonomial"):
        parts = args.split(";")
        if len(parts) % 2 != 1:
            raise InvalidInputError("monomial expects A0;a1;A1;...;ak;Ak")
        sets = tuple(_parse_set(p, alphabet) for p in parts[0::2])
        letters = tuple(parse_word(p, alphabet) for p in parts[1::2])
        if any(len(a) != 1 for a in letters):
            raise InvalidInputError("monomial letters must be single symbols")
        normal: Literal["R", "L"] | None = None
        if name == "rmonomial":
            normal = "R"
        elif name == "lmonomial":
            normal = "L"
        return Monomial(sets, tuple(a[0] for a in letters), normal)
    if name == "modcount":
        parts = args.split(";")
        if len(parts) != 3:
            raise InvalidInputError("modcount expects A;p;r1,r2,...")
        try:
            modulus = int(parts[1])
            residues = frozenset(int(r) for r in parts[2].split(",") if r.strip())
        except ValueError as e:
            raise InvalidInputError(f"modcount: {e}") from e
        return ModCount(_parse_set(parts[0], alphabet), modulus, residues)
    raise InvalidInputError(f"Unknown language family {name!r}")


def dfa_from_dict(data: dict[str, Any]) -> Dfa:
    """Reads the DFA JSON format. Missing transitions (``null`` or ``-1``) are
    sent to a fresh non-accepting sink state."""
    try:
        alphabet = [str(c) for c in data["alphabet"]]
        n = int(data["states"])
        initial = int(data["initial"])
        finals = [int(f) for f in data["finals"]]
        raw = data["delta"]
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInputError(f"Malformed DFA JSON: {e}") from e
    if len(raw) != n:
        raise InvalidInputError(f"DFA JSON declares {n} states but has {len(raw)} rows")
    sink = n
    rows = []
    partial = False
    for row in raw:
        if len(row) != len(alphabet):
            raise InvalidInputError("Every delta row needs one entry per letter")
        completed = []
        for t in row:
            if t is None or t == -1:
                partial = True
                completed.append(sink)
            else:
                completed.append(int(t))
        rows.append(completed)
    if partial:
        rows.append([sink] * len(alphabet))
    return make_dfa(alphabet, rows, initial, finals)


def dfa_to_dict(d: Dfa) -> dict[str, Any]:
    return {
        "alphabet": list(d.alphabet),
        "states": d.states,
        "initial": d.initial,
        "finals": sorted(d.finals),
        "delta": d.delta.tolist(),
    }
